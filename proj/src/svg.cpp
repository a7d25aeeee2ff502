#include "defrost/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace defrost {
namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 64.0, kRight = 24.0, kTop = 32.0, kBottom = 48.0;

std::string num(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

std::string star_points(double cx, double cy, double outer, double inner) {
  std::ostringstream ss;
  for (int i = 0; i < 10; ++i) {
    const double r = (i % 2 == 0) ? outer : inner;
    const double angle = -std::numbers::pi / 2.0 + i * std::numbers::pi / 5.0;
    if (i) ss << ' ';
    ss << num(cx + r * std::cos(angle)) << ',' << num(cy + r * std::sin(angle));
  }
  return ss.str();
}

}  // namespace

void emit_profile_svg(const DefrostingProfile& profile, const std::string& path) {
  if (profile.entries.empty()) throw std::invalid_argument("emit_profile_svg: empty profile");

  double cut_min = static_cast<double>(profile.entries.front().cut);
  double cut_max = static_cast<double>(profile.entries.back().cut);
  double acc_min = 1.0, acc_max = 0.0;
  for (const auto& e : profile.entries) {
    acc_min = std::min(acc_min, e.mean_accuracy - e.std_accuracy);
    acc_max = std::max(acc_max, e.mean_accuracy + e.std_accuracy);
  }
  if (cut_max == cut_min) { cut_min -= 1.0; cut_max += 1.0; }
  const double pad = std::max(0.02, 0.08 * (acc_max - acc_min));
  acc_min = std::max(0.0, acc_min - pad);
  acc_max = std::min(1.0, acc_max + pad);
  if (acc_max <= acc_min) { acc_min = std::max(0.0, acc_min - 0.05); acc_max = std::min(1.0, acc_max + 0.05); }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double cut) { return kLeft + (cut - cut_min) / (cut_max - cut_min) * plot_w; };
  auto sy = [&](double acc) { return kTop + (acc_max - acc) / (acc_max - acc_min) * plot_h; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_profile_svg: cannot open " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"14\">frozen layers (cut)</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\">test accuracy</text>\n";

  // x ticks at integer cuts, y ticks at 5 even levels
  for (const auto& e : profile.entries) {
    const double x = sx(static_cast<double>(e.cut));
    out << "<line x1=\"" << x << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << x << "\" y2=\""
        << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 20
        << "\" text-anchor=\"middle\" font-size=\"12\">" << e.cut << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double acc = acc_min + (acc_max - acc_min) * t / 4.0;
    const double y = sy(acc);
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kLeft - 9 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"12\">" << num(std::round(acc * 1000.0) / 1000.0)
        << "</text>\n";
  }

  // whiskers
  for (const auto& e : profile.entries) {
    const double x = sx(static_cast<double>(e.cut));
    const double y_lo = sy(e.mean_accuracy - e.std_accuracy);
    const double y_hi = sy(e.mean_accuracy + e.std_accuracy);
    out << "<line x1=\"" << x << "\" y1=\"" << y_lo << "\" x2=\"" << x << "\" y2=\"" << y_hi
        << "\" stroke=\"#888888\"/>\n"
        << "<line x1=\"" << x - 4 << "\" y1=\"" << y_lo << "\" x2=\"" << x + 4 << "\" y2=\"" << y_lo
        << "\" stroke=\"#888888\"/>\n"
        << "<line x1=\"" << x - 4 << "\" y1=\"" << y_hi << "\" x2=\"" << x + 4 << "\" y2=\"" << y_hi
        << "\" stroke=\"#888888\"/>\n";
  }

  // profile polyline and points
  if (profile.entries.size() > 1) {
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < profile.entries.size(); ++i) {
      if (i) out << ' ';
      out << num(sx(static_cast<double>(profile.entries[i].cut))) << ','
          << num(sy(profile.entries[i].mean_accuracy));
    }
    out << "\"/>\n";
  }
  for (const auto& e : profile.entries)
    out << "<circle cx=\"" << sx(static_cast<double>(e.cut)) << "\" cy=\"" << sy(e.mean_accuracy)
        << "\" r=\"4\" fill=\"#1f77b4\"/>\n";

  // optimum star
  const std::size_t best = optimal_depth(profile);
  for (const auto& e : profile.entries) {
    if (e.cut != best) continue;
    out << "<polygon points=\"" << star_points(sx(static_cast<double>(e.cut)), sy(e.mean_accuracy), 11.0, 4.5)
        << "\" fill=\"#d62728\" stroke=\"#7a1416\"/>\n";
  }

  out << "</svg>\n";
  if (!out) throw std::runtime_error("emit_profile_svg: write failed: " + path);
}

}  // namespace defrost
