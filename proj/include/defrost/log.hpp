#pragma once

#include <string>

namespace defrost {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Current level, from the DEFROST_LOG environment variable
/// (error|info|debug); defaults to info.
LogLevel log_level();

void log_error(const std::string& message);
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace defrost
