#include "simmatch/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "simmatch/csv.hpp"
#include "simmatch/errors.hpp"

namespace simmatch::svg {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_line_plot(std::ostream& out, const LinePlot& plot) {
  for (const auto& s : plot.series) {
    if (s.y.size() != plot.x.size()) throw InvalidInput("svg: series '" + s.label + "' length differs from x");
  }
  auto xt = [&](double x) { return plot.log_x ? std::log10(x) : x; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (double x : plot.x) {
    if (std::isfinite(xt(x))) x0 = std::min(x0, xt(x)), x1 = std::max(x1, xt(x));
  }
  for (const auto& s : plot.series) {
    for (double y : s.y) {
      if (std::isfinite(y)) y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  y0 = std::min(y0, 0.0);
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (xt(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double fx = x0 + (x1 - x0) * i / 5.0;
    const double sx = kLeft + pw * i / 5.0;
    const double label = plot.log_x ? std::pow(10.0, fx) : fx;
    out << "<line x1=\"" << num(sx) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(sx) << "\" y2=\""
        << num(kTop + ph + 5) << "\" stroke=\"black\"/>";
    out << "<text x=\"" << num(sx) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << csv::format(std::round(label * 1000) / 1000) << "</text>\n";
    const double fy = y0 + (y1 - y0) * i / 5.0;
    const double sy = py(fy);
    out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(sy) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(sy) << "\" stroke=\"black\"/>";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(sy + 4) << "\" text-anchor=\"end\">"
        << csv::format(std::round(fy * 1000) / 1000) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 10) << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num(kTop + ph / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::string path;
    bool pen_down = false;
    for (std::size_t i = 0; i < plot.x.size(); ++i) {
      const double x = plot.x[i], y = plot.series[s].y[i];
      if (!std::isfinite(xt(x)) || !std::isfinite(y)) {
        pen_down = false;
        continue;
      }
      path += (pen_down ? " L" : " M") + num(px(x)) + "," + num(py(y));
      pen_down = true;
    }
    if (!path.empty()) {
      out << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
    out << "<line x1=\"" << num(kWidth - kRight + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kWidth - kRight + 32) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>";
    out << "<text x=\"" << num(kWidth - kRight + 38) << "\" y=\"" << num(ly + 4) << "\">"
        << escape(plot.series[s].label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace simmatch::svg
