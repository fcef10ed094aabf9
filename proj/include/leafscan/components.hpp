#pragma once

#include "leafscan/image.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace leafscan {

enum class PixelClass { Foreground, Background };
enum class Connectivity { Four = 4, Eight = 8 };

/// Foreground pairs with 8-connectivity, background with 4-connectivity.
constexpr Connectivity default_connectivity(PixelClass which) noexcept {
  return which == PixelClass::Foreground ? Connectivity::Eight : Connectivity::Four;
}

struct BoundingBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = 0;
  int max_y = 0;

  friend bool operator==(const BoundingBox &, const BoundingBox &) = default;
};

struct ComponentStats {
  int label = 0;
  std::size_t size = 0;
  BoundingBox bbox;
  bool touches_image_border = false;

  friend bool operator==(const ComponentStats &, const ComponentStats &) = default;
};

/// Per-pixel component id: 0 = not in the labeled class, 1..N otherwise.
using LabelMap = Plane<std::int32_t>;

struct Labeling {
  LabelMap labels;
  /// stats[i] describes label i + 1.
  std::vector<ComponentStats> components;
};

/// Labels are dense and numbered in raster order of each component's first pixel.
Labeling label_components(const BinaryMask &mask, PixelClass which,
                          std::optional<Connectivity> connectivity = std::nullopt);

/// Clears foreground components smaller than `min_size`. The largest
/// component (lowest label on ties) is always kept.
BinaryMask remove_small_components(const BinaryMask &mask, std::size_t min_size);

/// 0.1% of the image area.
std::size_t default_min_component_size(int width, int height) noexcept;

struct Region {
  ComponentStats stats;
  /// Raster order.
  PixelSet pixels;
};

/// Background components (4-connected) not touching the image border.
/// Holes smaller than `min_hole_size` are omitted.
std::vector<Region> find_holes(const BinaryMask &mask, std::size_t min_hole_size = 0);

/// Copy of `mask` with every hole smaller than `min_hole_size` made foreground.
BinaryMask fill_small_holes(const BinaryMask &mask, std::size_t min_hole_size);

} // namespace leafscan
