#pragma once

#include "leafscan/image.hpp"

#include <cstddef>
#include <optional>
#include <span>

namespace leafscan {

/// Damage accounting for one leaf. The denominator is the reconstructed,
/// pre-herbivory leaf: surviving tissue plus every damaged pixel.
struct DamageReport {
  std::size_t leaf_foreground_px = 0;
  std::size_t internal_damage_px = 0;
  std::size_t border_damage_px = 0;
  std::size_t total_leaf_px = 0;
  double damage_ratio = 0.0;
  std::optional<double> total_cm2;
  std::optional<double> damage_cm2;

  std::size_t damage_px() const noexcept { return internal_damage_px + border_damage_px; }

  friend bool operator==(const DamageReport &, const DamageReport &) = default;
};

/// `holes` and `border_regions` must be disjoint from each other and from
/// the foreground of `mask`; throws OverlapError otherwise.
DamageReport quantify(const BinaryMask &mask, std::span<const PixelSet> holes,
                      std::span<const PixelSet> border_regions,
                      std::optional<ScaleCalibration> calibration = std::nullopt);

} // namespace leafscan
