#pragma once

// Deterministic static SVG figures of disc-valued data, each paired with a
// CSV twin carrying the raw coordinates. Fixed 600x600 viewport, unit circle,
// legend.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "embolic/util.hpp"

namespace embolic {

/// Distinct hex colors, deterministic for a given count (golden-angle hues).
inline std::vector<std::string> color_palette(std::size_t count) {
  std::vector<std::string> colors;
  colors.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double hue = reduce_angle(2.39996322972865332 * double(i)) / kTwoPi * 360.0;
    // HSV (hue, 0.85, 0.80) -> RGB
    double s = 0.85, v = 0.80;
    double c = v * s;
    double hp = hue / 60.0;
    double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    double m = v - c;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>((r + m) * 255.0 + 0.5),
                  static_cast<int>((g + m) * 255.0 + 0.5),
                  static_cast<int>((b + m) * 255.0 + 0.5));
    colors.emplace_back(buf);
  }
  return colors;
}

class DiscSvg {
 public:
  explicit DiscSvg(const std::string& title) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" "
             "height=\"600\" viewBox=\"0 0 600 600\">\n"
          << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n"
          << "<circle cx=\"" << kCx << "\" cy=\"" << kCy << "\" r=\"" << kR
          << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n"
          << "<text x=\"12\" y=\"20\" font-size=\"14\" "
             "font-family=\"sans-serif\">"
          << escape(title) << "</text>\n";
  }

  void point(double re, double im, const std::string& color,
             double radius = 3.0) {
    body_ << "<circle cx=\"" << fmt_fixed(x(re), 2) << "\" cy=\""
          << fmt_fixed(y(im), 2) << "\" r=\"" << fmt_fixed(radius, 1)
          << "\" fill=\"" << color << "\"/>\n";
  }

  /// Radius of the disc drawn from the center toward angle psi.
  void radius_line(double psi, const std::string& color) {
    body_ << "<line x1=\"" << kCx << "\" y1=\"" << kCy << "\" x2=\""
          << fmt_fixed(x(std::cos(psi)), 2) << "\" y2=\""
          << fmt_fixed(y(std::sin(psi)), 2) << "\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"/>\n";
  }

  void label(double re, double im, const std::string& text) {
    body_ << "<text x=\"" << fmt_fixed(x(re) + 4.0, 2) << "\" y=\""
          << fmt_fixed(y(im) - 4.0, 2)
          << "\" font-size=\"10\" font-family=\"sans-serif\">" << escape(text)
          << "</text>\n";
  }

  void legend(const std::vector<std::pair<std::string, std::string>>&
                  name_color_pairs) {
    double ly = 36.0;
    body_ << "<g font-size=\"11\" font-family=\"sans-serif\">\n";
    for (const auto& [name, color] : name_color_pairs) {
      body_ << "<rect x=\"12\" y=\"" << fmt_fixed(ly - 9.0, 1)
            << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n"
            << "<text x=\"26\" y=\"" << fmt_fixed(ly, 1) << "\">"
            << escape(name) << "</text>\n";
      ly += 14.0;
    }
    body_ << "</g>\n";
  }

  std::string finish() {
    body_ << "</svg>\n";
    return body_.str();
  }

 private:
  static constexpr double kCx = 300.0;
  static constexpr double kCy = 300.0;
  static constexpr double kR = 280.0;

  static double x(double re) { return kCx + kR * re; }
  static double y(double im) { return kCy - kR * im; }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
      }
    }
    return out;
  }

  std::ostringstream body_;
};

/// CSV rows with locale-independent number formatting.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) {
    append_row(header);
  }

  void append_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

}  // namespace embolic
