#include "leafscan/render.hpp"

#include "leafscan/error.hpp"

namespace leafscan {

PixelSet leaf_outline(const BinaryMask &mask) {
  PixelSet out;
  const auto fg = [&](int x, int y) { return mask.contains(x, y) && mask.test(x, y); };
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (fg(x, y) && !(fg(x - 1, y) && fg(x + 1, y) && fg(x, y - 1) && fg(x, y + 1))) {
        out.push_back(Pixel{x, y});
      }
    }
  }
  return out;
}

RasterImage render_annotated(const RasterImage &img, const BinaryMask &mask, std::span<const PixelSet> holes,
                             std::span<const PixelSet> border_regions, std::span<const QuadraticBezier> curves) {
  if (!img.same_shape(mask)) {
    throw DimensionMismatch("annotation mask does not match image dimensions");
  }
  RasterImage out = img;
  const auto paint = [&](const PixelSet &set, Rgb color) {
    for (const auto p : set) {
      if (!out.contains(p.x, p.y)) {
        throw DimensionMismatch("overlay pixel outside the image");
      }
      out.at(p.x, p.y) = color;
    }
  };
  paint(leaf_outline(mask), palette::kOutline);
  for (const auto &h : holes) {
    paint(h, palette::kInternalDamage);
  }
  for (const auto &b : border_regions) {
    paint(b, palette::kBorderDamage);
  }
  for (const auto &c : curves) {
    paint(rasterize_curve(c, img.width(), img.height()), palette::kCurve);
  }
  return out;
}

} // namespace leafscan
