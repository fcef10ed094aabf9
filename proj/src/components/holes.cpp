#include "leafscan/components.hpp"

namespace leafscan {

std::vector<Region> find_holes(const BinaryMask &mask, std::size_t min_hole_size) {
  const auto lab = label_components(mask, PixelClass::Background, Connectivity::Four);

  // Map background label -> slot in the result, or -1 when not a hole.
  std::vector<int> slot(lab.components.size() + 1, -1);
  std::vector<Region> holes;
  for (const auto &c : lab.components) {
    if (!c.touches_image_border && c.size >= min_hole_size) {
      slot[static_cast<std::size_t>(c.label)] = static_cast<int>(holes.size());
      holes.push_back(Region{c, {}});
      holes.back().pixels.reserve(c.size);
    }
  }
  if (holes.empty()) {
    return holes;
  }
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const auto label = lab.labels.at(x, y);
      if (label > 0 && slot[static_cast<std::size_t>(label)] >= 0) {
        holes[static_cast<std::size_t>(slot[static_cast<std::size_t>(label)])].pixels.push_back(Pixel{x, y});
      }
    }
  }
  return holes;
}

BinaryMask fill_small_holes(const BinaryMask &mask, std::size_t min_hole_size) {
  if (min_hole_size == 0) {
    return mask;
  }
  BinaryMask out = mask;
  for (const auto &hole : find_holes(mask)) {
    if (hole.stats.size < min_hole_size) {
      for (const auto p : hole.pixels) {
        out.set(p.x, p.y);
      }
    }
  }
  return out;
}

} // namespace leafscan
