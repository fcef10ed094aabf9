#include "leafscan/quantify.hpp"

#include "leafscan/error.hpp"

#include <string>
#include <vector>

namespace leafscan {

namespace {

std::string where(Pixel p) { return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")"; }

} // namespace

DamageReport quantify(const BinaryMask &mask, std::span<const PixelSet> holes,
                      std::span<const PixelSet> border_regions, std::optional<ScaleCalibration> calibration) {
  // 0 = free background, 1 = foreground, 2 = claimed by a damage set.
  std::vector<std::uint8_t> claimed(mask.pixels().begin(), mask.pixels().end());
  const auto tally = [&](std::span<const PixelSet> sets, const char *kind) {
    std::size_t n = 0;
    for (const auto &set : sets) {
      for (const auto p : set) {
        if (!mask.contains(p.x, p.y)) {
          throw OverlapError(std::string(kind) + " pixel " + where(p) + " lies outside the image");
        }
        auto &c = claimed[mask.index(p.x, p.y)];
        if (c == 1) {
          throw OverlapError(std::string(kind) + " pixel " + where(p) + " overlaps leaf foreground");
        }
        if (c == 2) {
          throw OverlapError(std::string(kind) + " pixel " + where(p) + " belongs to two damage regions");
        }
        c = 2;
        ++n;
      }
    }
    return n;
  };

  DamageReport r;
  r.leaf_foreground_px = mask.count();
  r.internal_damage_px = tally(holes, "hole");
  r.border_damage_px = tally(border_regions, "border-damage");
  r.total_leaf_px = r.leaf_foreground_px + r.internal_damage_px + r.border_damage_px;
  r.damage_ratio =
      r.total_leaf_px == 0 ? 0.0 : static_cast<double>(r.damage_px()) / static_cast<double>(r.total_leaf_px);
  if (calibration) {
    r.total_cm2 = calibration->area_cm2(r.total_leaf_px);
    r.damage_cm2 = calibration->area_cm2(r.damage_px());
  }
  return r;
}

} // namespace leafscan
