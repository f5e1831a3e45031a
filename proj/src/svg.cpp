#include "granuflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace granuflow::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
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

struct Frame {
  double x0, x1, y0, y1;

  static Frame around(std::vector<double> xs, std::vector<double> ys) {
    Frame f{0, 1, 0, 1};
    if (!xs.empty()) {
      auto [xa, xb] = std::minmax_element(xs.begin(), xs.end());
      auto [ya, yb] = std::minmax_element(ys.begin(), ys.end());
      f = {*xa, *xb, *ya, *yb};
    }
    if (!(f.x1 > f.x0)) f.x0 -= 0.5, f.x1 += 0.5;
    if (!(f.y1 > f.y0)) {
      const double pad = std::max(1e-12, std::abs(f.y0) * 0.05 + 0.5 * (f.y0 == 0.0));
      f.y0 -= pad;
      f.y1 += pad;
    }
    const double py = 0.05 * (f.y1 - f.y0);
    f.y0 -= py;
    f.y1 += py;
    return f;
  }
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void open(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
      << "</text>\n";
}

void axes(std::ostringstream& out, const Frame& f, const std::string& x_label, const std::string& y_label) {
  const double l = kLeft, r = kWidth - kRight, t = kTop, b = kHeight - kBottom;
  out << "<rect x=\"" << l << "\" y=\"" << t << "\" width=\"" << r - l << "\" height=\"" << b - t
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
    out << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << b + 16 << "\" text-anchor=\"middle\">" << num(xv)
        << "</text>\n";
    out << "<text x=\"" << l - 6 << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << (l + r) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(x_label)
      << "</text>\n";
  if (!y_label.empty()) {
    out << "<text x=\"16\" y=\"" << (t + b) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (t + b) / 2 << ")\">" << escape(y_label) << "</text>\n";
  }
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label, const std::vector<Series>& series) {
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (std::isfinite(s.x[k]) && std::isfinite(s.y[k])) {
        xs.push_back(s.x[k]);
        ys.push_back(s.y[k]);
      }
    }
  }
  const Frame f = Frame::around(xs, ys);
  std::ostringstream out;
  open(out, title);
  axes(out, f, x_label, "");
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* colour = kColours[si % std::size(kColours)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (std::isfinite(s.x[k]) && std::isfinite(s.y[k])) out << num(f.px(s.x[k])) << ',' << num(f.py(s.y[k])) << ' ';
    }
    out << "\"/>\n";
    const double ly = kTop + 16 + 16 * static_cast<double>(si);
    out << "<line x1=\"" << kWidth - 170 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kWidth - 150 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - 145 << "\" y=\"" << ly << "\">" << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string scatter_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<double>& x, const std::vector<double>& y) {
  const Frame f = Frame::around(x, y);
  std::ostringstream out;
  open(out, title);
  axes(out, f, x_label, y_label);
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    out << "<circle cx=\"" << num(f.px(x[k])) << "\" cy=\"" << num(f.py(y[k])) << "\" r=\"2\" fill=\"" << kColours[0]
        << "\" fill-opacity=\"0.6\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string histogram(const std::string& title, const std::vector<double>& edges, const std::vector<double>& heights) {
  std::vector<double> xs(edges), ys(heights);
  ys.push_back(0.0);
  const Frame f = Frame::around(xs, ys);
  std::ostringstream out;
  open(out, title);
  axes(out, f, "x", "density");
  for (std::size_t k = 0; k + 1 < edges.size() && k < heights.size(); ++k) {
    const double x0 = f.px(edges[k]), x1 = f.px(edges[k + 1]);
    const double y0 = f.py(0.0), y1 = f.py(heights[k]);
    out << "<rect x=\"" << num(x0) << "\" y=\"" << num(std::min(y0, y1)) << "\" width=\"" << num(x1 - x0)
        << "\" height=\"" << num(std::abs(y0 - y1)) << "\" fill=\"" << kColours[0] << "\" stroke=\"white\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace granuflow::svg
