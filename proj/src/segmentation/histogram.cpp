#include "leafscan/segmentation.hpp"

#include <algorithm>
#include <numeric>

namespace leafscan {

Histogram::Histogram(const std::array<std::uint64_t, kGrayLevels> &counts)
    : counts_(counts), total_(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0})) {}

int Histogram::populated_bins() const noexcept {
  return static_cast<int>(std::count_if(counts_.begin(), counts_.end(), [](std::uint64_t n) { return n > 0; }));
}

Histogram build_histogram(const GrayImage &img) {
  std::array<std::uint64_t, kGrayLevels> counts{};
  for (const auto v : img.pixels()) {
    ++counts[v];
  }
  return Histogram(counts);
}

} // namespace leafscan
