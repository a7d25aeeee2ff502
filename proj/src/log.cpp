#include "defrost/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace defrost {
namespace {

LogLevel parse_level() {
  const char* env = std::getenv("DEFROST_LOG");
  if (!env) return LogLevel::Info;
  const std::string value(env);
  if (value == "error") return LogLevel::Error;
  if (value == "info") return LogLevel::Info;
  if (value == "debug") return LogLevel::Debug;
  std::cerr << "[defrost] unknown DEFROST_LOG value '" << value << "', using info\n";
  return LogLevel::Info;
}

std::mutex& log_mutex() {
  static std::mutex mu;
  return mu;
}

void emit(const char* tag, const std::string& message) {
  std::lock_guard<std::mutex> lock(log_mutex());
  std::cerr << "[defrost " << tag << "] " << message << '\n';
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = parse_level();
  return level;
}

void log_error(const std::string& message) { emit("error", message); }

void log_info(const std::string& message) {
  if (log_level() >= LogLevel::Info) emit("info", message);
}

void log_debug(const std::string& message) {
  if (log_level() >= LogLevel::Debug) emit("debug", message);
}

}  // namespace defrost
