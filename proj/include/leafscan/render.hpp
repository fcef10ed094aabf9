#pragma once

#include "leafscan/geometry.hpp"
#include "leafscan/image.hpp"

#include <span>

namespace leafscan {

namespace palette {
inline constexpr Rgb kInternalDamage{255, 0, 255};
inline constexpr Rgb kBorderDamage{255, 128, 0};
inline constexpr Rgb kCurve{0, 64, 255};
inline constexpr Rgb kOutline{255, 230, 0};
} // namespace palette

/// Foreground pixels with a 4-neighbour outside the foreground (or on the image edge).
PixelSet leaf_outline(const BinaryMask &mask);

/// Copy of `img` with the leaf outline, hole pixels, border-damage pixels and
/// rasterized curves painted in the palette colors (in that order). Pixels
/// outside those sets are untouched. Throws DimensionMismatch.
RasterImage render_annotated(const RasterImage &img, const BinaryMask &mask, std::span<const PixelSet> holes,
                             std::span<const PixelSet> border_regions, std::span<const QuadraticBezier> curves);

} // namespace leafscan
