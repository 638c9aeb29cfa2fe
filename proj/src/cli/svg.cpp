#include "mrspec/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mrspec::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

// Draws one panel inside the box (x0, y0, w, h).
void draw(std::ostringstream& out, const Panel& p, double x0, double y0, double w, double h) {
  Range xr, yr;
  for (const auto& l : p.lines) {
    for (double v : l.x) xr.add(v);
    for (double v : l.y) yr.add(v);
  }
  for (const auto& b : p.bands) {
    for (double v : b.x) xr.add(v);
    for (double v : b.lo) yr.add(v);
    for (double v : b.hi) yr.add(v);
  }
  if (p.marker_x) xr.add(*p.marker_x);
  xr.finish();
  yr.finish();
  const double pad = 0.05 * (yr.hi - yr.lo);
  yr.lo -= pad;
  yr.hi += pad;

  const double left = x0 + 56, right = x0 + w - 12, top = y0 + 28, bottom = y0 + h - 40;
  auto px = [&](double v) { return left + (v - xr.lo) / (xr.hi - xr.lo) * (right - left); };
  auto py = [&](double v) { return bottom - (v - yr.lo) / (yr.hi - yr.lo) * (bottom - top); };

  out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(right - left)
      << "\" height=\"" << fmt(bottom - top) << "\" fill=\"white\" stroke=\"#444\"/>\n";
  out << "<text x=\"" << fmt(x0 + w / 2) << "\" y=\"" << fmt(y0 + 18)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(p.title) << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    out << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(bottom + 14)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(xv) << "</text>\n";
    out << "<text x=\"" << fmt(left - 4) << "\" y=\"" << fmt(py(yv) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << tick(yv) << "</text>\n";
  }
  if (!p.x_label.empty())
    out << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(bottom + 30)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(p.x_label) << "</text>\n";
  if (!p.y_label.empty())
    out << "<text transform=\"translate(" << fmt(x0 + 12) << "," << fmt((top + bottom) / 2)
        << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">" << escape(p.y_label) << "</text>\n";

  for (const auto& b : p.bands) {
    out << "<polygon fill=\"" << b.colour << "\" fill-opacity=\"" << fmt(b.opacity) << "\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < b.x.size(); ++i) out << fmt(px(b.x[i])) << ',' << fmt(py(b.hi[i])) << ' ';
    for (std::size_t i = b.x.size(); i-- > 0;) out << fmt(px(b.x[i])) << ',' << fmt(py(b.lo[i])) << ' ';
    out << "\"/>\n";
  }
  std::size_t colour_index = 0;
  for (const auto& l : p.lines) {
    const std::string colour = l.colour.empty() ? kPalette[colour_index++ % 10] : l.colour;
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\""
        << (l.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < l.x.size() && i < l.y.size(); ++i)
      if (std::isfinite(l.y[i])) out << fmt(px(l.x[i])) << ',' << fmt(py(l.y[i])) << ' ';
    out << "\"/>\n";
  }
  if (p.marker_x)
    out << "<line x1=\"" << fmt(px(*p.marker_x)) << "\" x2=\"" << fmt(px(*p.marker_x)) << "\" y1=\"" << fmt(top)
        << "\" y2=\"" << fmt(bottom) << "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";
  if (p.legend) {
    colour_index = 0;
    double ly = top + 12;
    for (const auto& l : p.lines) {
      const std::string colour = l.colour.empty() ? kPalette[colour_index++ % 10] : l.colour;
      if (l.label.empty()) continue;
      out << "<line x1=\"" << fmt(right - 110) << "\" x2=\"" << fmt(right - 92) << "\" y1=\"" << fmt(ly - 4)
          << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
      out << "<text x=\"" << fmt(right - 88) << "\" y=\"" << fmt(ly) << "\" font-size=\"10\">"
          << escape(l.label) << "</text>\n";
      ly += 13;
    }
  }
}

std::string header(int width, int height) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out.str();
}

bool blank(const Panel& p) { return p.title.empty() && p.lines.empty() && p.bands.empty(); }

}  // namespace

std::string render(const Panel& panel, int width, int height) {
  std::ostringstream out;
  out << header(width, height);
  draw(out, panel, 0, 0, width, height);
  out << "</svg>\n";
  return out.str();
}

std::string render_grid(const std::vector<Panel>& panels, int rows, int cols, const std::string& title,
                        int cell_width, int cell_height) {
  const int top = title.empty() ? 0 : 30;
  std::ostringstream out;
  out << header(cols * cell_width, rows * cell_height + top);
  if (!title.empty())
    out << "<text x=\"" << cols * cell_width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(title) << "</text>\n";
  for (std::size_t i = 0; i < panels.size() && static_cast<int>(i) < rows * cols; ++i) {
    if (blank(panels[i])) continue;
    const int r = static_cast<int>(i) / cols;
    const int c = static_cast<int>(i) % cols;
    draw(out, panels[i], c * cell_width, top + r * cell_height, cell_width, cell_height);
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_stack(const Panel& head, const std::vector<Panel>& grid, int rows, int cols, int width) {
  const int head_height = 360;
  const int cell_width = width / cols;
  const int cell_height = 220;
  std::ostringstream out;
  out << header(width, head_height + rows * cell_height);
  draw(out, head, 0, 0, width, head_height);
  for (std::size_t i = 0; i < grid.size() && static_cast<int>(i) < rows * cols; ++i) {
    const int r = static_cast<int>(i) / cols;
    const int c = static_cast<int>(i) % cols;
    draw(out, grid[i], c * cell_width, head_height + r * cell_height, cell_width, cell_height);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace mrspec::svg
