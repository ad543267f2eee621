#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "famine/numeric.hpp"

namespace famine::svg {

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string coord(double v) { return format_fixed(v, 2); }

struct Range {
  double lo;
  double hi;
};

// Pads a data range by 5% and widens degenerate ones.
inline Range padded(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

class Canvas {
 public:
  static constexpr double kWidth = 640, kHeight = 480;
  static constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 90;

  explicit Canvas(std::string_view title) {
    body_ += "<text x=\"" + coord(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
             escape(title) + "</text>\n";
  }

  void set_x(Range r) { x_ = r; }
  void set_y(Range r) { y_ = r; }

  double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const { return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  void axes(std::string_view xlabel, std::string_view ylabel, bool x_ticks = true) {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    body_ += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(y0) + "\" x2=\"" + coord(x1) + "\" y2=\"" + coord(y0) +
             "\" stroke=\"#444\"/>\n";
    body_ += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(y0) + "\" x2=\"" + coord(x0) + "\" y2=\"" + coord(y1) +
             "\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double v = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      body_ += "<text x=\"" + coord(x0 - 6) + "\" y=\"" + coord(py(v) + 4) +
               "\" text-anchor=\"end\" font-size=\"10\">" + format_fixed(v, 1) + "</text>\n";
      if (x_ticks) {
        const double u = x_.lo + (x_.hi - x_.lo) * i / 4.0;
        body_ += "<text x=\"" + coord(px(u)) + "\" y=\"" + coord(y0 + 14) +
                 "\" text-anchor=\"middle\" font-size=\"10\">" + format_fixed(u, 1) + "</text>\n";
      }
    }
    body_ += "<text x=\"" + coord((x0 + x1) / 2) + "\" y=\"" + coord(kHeight - 12) +
             "\" text-anchor=\"middle\" font-size=\"12\">" + escape(xlabel) + "</text>\n";
    body_ += "<text x=\"16\" y=\"" + coord((y0 + y1) / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
             coord((y0 + y1) / 2) + ")\">" + escape(ylabel) + "</text>\n";
  }

  void point(double x, double y, std::string_view color = "#1f77b4") {
    body_ += "<circle cx=\"" + coord(px(x)) + "\" cy=\"" + coord(py(y)) + "\" r=\"3\" fill=\"" + std::string(color) +
             "\" fill-opacity=\"0.7\"/>\n";
  }

  void labelled_point(double x, double y, std::string_view label) {
    point(x, y);
    body_ += "<text x=\"" + coord(px(x) + 5) + "\" y=\"" + coord(py(y) - 5) + "\" font-size=\"9\">" + escape(label) +
             "</text>\n";
  }

  // y = x across the shared extent of both axes.
  void identity_line() {
    const double lo = std::max(x_.lo, y_.lo), hi = std::min(x_.hi, y_.hi);
    if (!(hi > lo)) return;
    body_ += "<line class=\"identity\" x1=\"" + coord(px(lo)) + "\" y1=\"" + coord(py(lo)) + "\" x2=\"" + coord(px(hi)) +
             "\" y2=\"" + coord(py(hi)) + "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  }

  void bar(double x_left, double x_right, double value, std::string_view label) {
    const double top = py(value), base = py(std::max(0.0, y_.lo));
    body_ += "<rect x=\"" + coord(px(x_left)) + "\" y=\"" + coord(std::min(top, base)) + "\" width=\"" +
             coord(px(x_right) - px(x_left)) + "\" height=\"" + coord(std::abs(base - top)) + "\" fill=\"#2ca02c\"/>\n";
    const double cx = px((x_left + x_right) / 2), ly = kHeight - kBottom + 8;
    body_ += "<text x=\"" + coord(cx) + "\" y=\"" + coord(ly) + "\" font-size=\"9\" text-anchor=\"end\" transform=\"rotate(-60 " +
             coord(cx) + " " + coord(ly) + ")\">" + escape(label) + "</text>\n";
  }

  std::string str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           coord(kWidth) + "\" height=\"" + coord(kHeight) + "\" viewBox=\"0 0 " + coord(kWidth) + " " + coord(kHeight) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
  }

 private:
  std::string body_;
  Range x_{0, 1};
  Range y_{0, 1};
};

struct Bar {
  std::string label;
  double value;
};

inline std::string bar_chart(std::string_view title, std::string_view ylabel, std::span<const Bar> bars) {
  Canvas c(title);
  double hi = 0.0;
  for (const auto& b : bars) hi = std::max(hi, b.value);
  c.set_x({0.0, static_cast<double>(std::max<std::size_t>(bars.size(), 1))});
  c.set_y({0.0, hi > 0.0 ? hi * 1.1 : 1.0});
  c.axes("", ylabel, false);
  for (std::size_t i = 0; i < bars.size(); ++i) c.bar(i + 0.15, i + 0.85, bars[i].value, bars[i].label);
  return c.str();
}

struct Point {
  double x;
  double y;
  std::string label;  // empty = unlabelled
};

/// Scatter with a black y = x reference line; both axes share one range.
inline std::string identity_scatter(std::string_view title, std::string_view xlabel, std::string_view ylabel,
                                    std::span<const Point> points) {
  Canvas c(title);
  double lo = 0.0, hi = 1.0;
  if (!points.empty()) {
    lo = hi = points.front().x;
    for (const auto& p : points) {
      lo = std::min({lo, p.x, p.y});
      hi = std::max({hi, p.x, p.y});
    }
  }
  const auto r = padded(lo, hi);
  c.set_x(r);
  c.set_y(r);
  c.axes(xlabel, ylabel);
  c.identity_line();
  for (const auto& p : points) {
    if (p.label.empty()) c.point(p.x, p.y);
    else c.labelled_point(p.x, p.y, p.label);
  }
  return c.str();
}

}  // namespace famine::svg
