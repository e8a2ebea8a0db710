#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aerial {

/// Contiguous one-hot slot range of one feature.
struct FeatureSlots {
  std::size_t feature = 0;
  std::size_t offset = 0;
  std::size_t count = 0;

  bool operator==(const FeatureSlots&) const = default;
};

using Layout = std::vector<FeatureSlots>;

Layout make_layout(std::span<const std::size_t> class_counts);

inline std::size_t layout_width(const Layout& layout) {
  return layout.empty() ? 0 : layout.back().offset + layout.back().count;
}

}  // namespace aerial
