#include "hso/harness/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hso/errors.hpp"

namespace hso::harness {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b",
                                    "#e377c2", "#17becf", "#7f7f7f",
                                    "#bcbd22", "#393b79", "#637939"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

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

}  // namespace

std::string line_chart_svg(const std::vector<double>& x,
                           const std::vector<Series>& series,
                           const ChartOptions& options) {
  for (const Series& s : series) {
    if (s.values.size() != x.size()) {
      throw DimensionMismatch("line_chart_svg: series '" + s.label +
                              "' length differs from x");
    }
  }
  auto usable = [&](double v) {
    return std::isfinite(v) && (!options.log_y || v > 0.0);
  };
  auto map_y = [&](double v) { return options.log_y ? std::log10(v) : v; };

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) continue;
    x_lo = std::min(x_lo, x[i]);
    x_hi = std::max(x_hi, x[i]);
    for (const Series& s : series) {
      if (!usable(s.values[i])) continue;
      y_lo = std::min(y_lo, map_y(s.values[i]));
      y_hi = std::max(y_hi, map_y(s.values[i]));
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0;
  if (!std::isfinite(y_lo)) y_lo = 0.0, y_hi = 1.0;
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;

  const double left = 70, right = 150, top = 40, bottom = 50;
  const double pw = options.width - left - right;
  const double ph = options.height - top - bottom;
  auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
     << "\" height=\"" << options.height << "\" viewBox=\"0 0 "
     << options.width << ' ' << options.height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" "
     << "font-size=\"15\">" << escape(options.title) << "</text>\n"
     << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
     << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * k / 4.0;
    const std::string ylab = options.log_y ? "1e" + fmt(yv) : fmt(yv);
    os << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 18
       << "\" font-family=\"sans-serif\" font-size=\"11\" "
          "text-anchor=\"middle\">"
       << fmt(xv) << "</text>\n"
       << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\" "
          "text-anchor=\"end\">"
       << escape(ylab) << "</text>\n"
       << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\""
       << py(yv) << "\" y2=\"" << py(yv)
       << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << options.height - 10
     << "\" font-family=\"sans-serif\" font-size=\"12\" "
        "text-anchor=\"middle\">"
     << escape(options.x_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::ostringstream pts;
    auto flush = [&] {
      if (pts.tellp() > 0) {
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
      }
      pts.str("");
      pts.clear();
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = series[s].values[i];
      if (!std::isfinite(x[i]) || !usable(v)) {
        flush();
        continue;
      }
      pts << fmt(px(x[i])) << ',' << fmt(py(map_y(v))) << ' ';
    }
    flush();
    const double ly = top + 14.0 + 16.0 * static_cast<double>(s);
    os << "<line x1=\"" << left + pw + 10 << "\" x2=\"" << left + pw + 30
       << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4 << "\" stroke=\""
       << color << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << left + pw + 36 << "\" y=\"" << ly
       << "\" font-family=\"sans-serif\" font-size=\"11\">"
       << escape(series[s].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_line_chart(const std::filesystem::path& path,
                      const std::vector<double>& x,
                      const std::vector<Series>& series,
                      const ChartOptions& options) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << line_chart_svg(x, series, options);
}

}  // namespace hso::harness
