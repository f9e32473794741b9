#pragma once

// Minimal static SVG charts for the report stage.

#include <span>
#include <string>
#include <vector>

#include "wikiprof/stats_interpret.hpp"

namespace wikiprof::svg {

std::string scatter(std::span<const double> x, std::span<const double> y, std::span<const int> groups,
                    const std::string& title, const std::string& x_label, const std::string& y_label);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};
std::string line_chart(std::span<const Series> series, const std::string& title,
                       const std::string& x_label);

// One box per entry.
std::string boxplots(std::span<const BoxStats> boxes, std::span<const std::string> names,
                     const std::string& title);

}  // namespace wikiprof::svg
