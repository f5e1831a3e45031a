#pragma once

#include <string>
#include <vector>

namespace granuflow::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG documents with axes, tick labels and a legend.
std::string line_plot(const std::string& title, const std::string& x_label, const std::vector<Series>& series);
std::string scatter_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<double>& x, const std::vector<double>& y);
/// Bars of height `heights` over the bins [edges[k], edges[k + 1]).
std::string histogram(const std::string& title, const std::vector<double>& edges, const std::vector<double>& heights);

}  // namespace granuflow::svg
