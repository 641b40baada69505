#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gpc {

// Uniform time grid on [0, t_max] with `steps` intervals, i.e. steps+1 points.
struct UniformGrid {
  double t_max = 0.0;
  std::size_t steps = 0;

  UniformGrid() = default;
  UniformGrid(double t_max_, std::size_t steps_) : t_max(t_max_), steps(steps_) {
    if (!(t_max > 0.0)) throw std::invalid_argument("UniformGrid: t_max must be > 0");
    if (steps < 2) throw std::invalid_argument("UniformGrid: steps must be >= 2");
  }

  double dt() const { return t_max / static_cast<double>(steps); }
  std::size_t size() const { return steps + 1; }
  double time(std::size_t i) const {
    return t_max * static_cast<double>(i) / static_cast<double>(steps);
  }
  std::vector<double> times() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = time(i);
    return out;
  }
};

}  // namespace gpc
