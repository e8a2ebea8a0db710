#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aerial/layout.hpp"

namespace aerial {

/// Anything that maps a probability vector over the one-hot layout to a
/// per-feature-normalized reconstruction. Implementations must be safe for
/// concurrent calls to forward().
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;
  virtual const Layout& layout() const = 0;
  virtual std::vector<double> forward(std::span<const double> input) const = 0;

  /// Row-major batch: `inputs` holds `count` consecutive input vectors.
  virtual std::vector<double> forward_many(std::span<const double> inputs,
                                           std::size_t count) const {
    std::vector<double> out;
    const std::size_t width = count == 0 ? 0 : inputs.size() / count;
    out.reserve(inputs.size());
    for (std::size_t i = 0; i < count; ++i) {
      auto row = forward(inputs.subspan(i * width, width));
      out.insert(out.end(), row.begin(), row.end());
    }
    return out;
  }
};

}  // namespace aerial
