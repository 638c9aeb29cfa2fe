#pragma once

// Minimal self-contained SVG line, band and grid plots.

#include <optional>
#include <string>
#include <vector>

namespace mrspec::svg {

struct Line {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string colour;  // empty picks from the palette
  bool dashed = false;
};

struct Band {
  std::vector<double> x;
  std::vector<double> lo;
  std::vector<double> hi;
  std::string colour = "#1f77b4";
  double opacity = 0.2;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Band> bands;
  std::vector<Line> lines;
  std::optional<double> marker_x;  // red dashed vertical line
  bool legend = true;
};

std::string render(const Panel& panel, int width = 720, int height = 440);

/// Panels laid out row-major; empty titles with no lines leave a blank cell.
std::string render_grid(const std::vector<Panel>& panels, int rows, int cols,
                        const std::string& title = "", int cell_width = 320, int cell_height = 240);

/// Header panel above a grid (as in band plot + principal-direction fans).
std::string render_stack(const Panel& header, const std::vector<Panel>& grid, int rows, int cols,
                         int width = 960);

}  // namespace mrspec::svg
