#include "wikiprof/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>


namespace wikiprof::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420, kMargin = 56;
constexpr std::array<const char*, 8> kPalette = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                                 "#66a61e", "#e6ab02", "#a6761d", "#666666"};

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

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Axis {
  double lo, hi;
  double map(double v, double a, double b) const {
    return hi == lo ? (a + b) / 2 : a + (v - lo) / (hi - lo) * (b - a);
  }
};

Axis range_of(std::span<const double> v) {
  if (v.empty()) return {0, 1};
  auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  const double pad = (*mx - *mn) * 0.05;
  return {*mn - pad, *mx + pad};
}

void open(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\"/>\n";
}

// Round steps of 1, 2 or 5 times a power of ten, about five per axis.
std::vector<double> nice_ticks(const Axis& a) {
  const double span = a.hi - a.lo;
  if (!(span > 0)) return {a.lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = 10 * mag;
  for (double m : {1.0, 2.0, 5.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double v = std::ceil(a.lo / step) * step; v <= a.hi + step * 1e-9; v += step)
    out.push_back(std::fabs(v) < step * 1e-9 ? 0.0 : v);
  return out;
}

void ticks(std::ostringstream& out, const Axis& x, const Axis& y, bool x_ticks = true) {
  if (x_ticks)
    for (double fx : nice_ticks(x))
      out << "<text x=\"" << num(x.map(fx, kMargin, kWidth - kMargin)) << "\" y=\"" << kHeight - kMargin + 16
          << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
  for (double fy : nice_ticks(y))
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << num(y.map(fy, kHeight - kMargin, kMargin))
        << "\" text-anchor=\"end\">" << tick_label(fy) << "</text>\n";
}

}  // namespace

std::string scatter(std::span<const double> x, std::span<const double> y, std::span<const int> groups,
                    const std::string& title, const std::string& x_label, const std::string& y_label) {
  std::ostringstream out;
  open(out, title);
  const Axis ax = range_of(x), ay = range_of(y);
  ticks(out, ax, ay);
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n"
      << "<text x=\"14\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 14 " << kHeight / 2
      << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int g = groups.empty() ? 0 : groups[i];
    out << "<circle cx=\"" << num(ax.map(x[i], kMargin, kWidth - kMargin)) << "\" cy=\""
        << num(ay.map(y[i], kHeight - kMargin, kMargin)) << "\" r=\"3\" fill=\""
        << kPalette[static_cast<std::size_t>(std::max(g, 0)) % kPalette.size()]
        << "\" fill-opacity=\"0.75\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string line_chart(std::span<const Series> series, const std::string& title,
                       const std::string& x_label) {
  std::ostringstream out;
  open(out, title);
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Axis ax = range_of(xs), ay = range_of(ys);
  ticks(out, ax, ay);
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto* color = kPalette[s % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i)
      out << num(ax.map(series[s].x[i], kMargin, kWidth - kMargin)) << ','
          << num(ay.map(series[s].y[i], kHeight - kMargin, kMargin)) << ' ';
    out << "\"/>\n<text x=\"" << kWidth - kMargin << "\" y=\"" << kMargin + 14 * s
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(series[s].name)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string boxplots(std::span<const BoxStats> boxes, std::span<const std::string> names,
                     const std::string& title) {
  std::ostringstream out;
  open(out, title);
  std::vector<double> all;
  for (const auto& b : boxes) {
    all.push_back(b.min);
    all.push_back(b.max);
  }
  const Axis ay = range_of(all);
  const Axis ax{0.0, static_cast<double>(boxes.size())};
  ticks(out, ax, ay, false);
  const double slot = (kWidth - 2 * kMargin) / std::max<std::size_t>(1, boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    const double cx = ax.map(i + 0.5, kMargin, kWidth - kMargin);
    const double half = slot * 0.3;
    auto y = [&](double v) { return num(ay.map(v, kHeight - kMargin, kMargin)); };
    const auto* color = kPalette[i % kPalette.size()];
    out << "<line x1=\"" << num(cx) << "\" y1=\"" << y(b.min) << "\" x2=\"" << num(cx) << "\" y2=\""
        << y(b.max) << "\" stroke=\"black\"/>\n"
        << "<rect x=\"" << num(cx - half) << "\" y=\"" << y(b.q3) << "\" width=\"" << num(2 * half)
        << "\" height=\"" << num(ay.map(b.q1, kHeight - kMargin, kMargin) - ay.map(b.q3, kHeight - kMargin, kMargin))
        << "\" fill=\"" << color << "\" fill-opacity=\"0.5\" stroke=\"black\"/>\n"
        << "<line x1=\"" << num(cx - half) << "\" y1=\"" << y(b.median) << "\" x2=\"" << num(cx + half)
        << "\" y2=\"" << y(b.median) << "\" stroke=\"black\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(cx) << "\" y=\"" << kHeight - kMargin + 16
        << "\" text-anchor=\"middle\">" << escape(i < names.size() ? names[i] : "") << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace wikiprof::svg
