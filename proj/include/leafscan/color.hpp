#pragma once

#include "leafscan/image.hpp"

#include <optional>
#include <string_view>

namespace leafscan {

enum class Channel { L, A, B };

std::string_view to_string(Channel c) noexcept;
/// Accepts "L", "a", "b" (case-insensitive); nullopt otherwise.
std::optional<Channel> parse_channel(std::string_view text) noexcept;

/// sRGB (IEC 61966-2-1 transfer) to CIE L*a*b* with D65 reference white.
Lab srgb_to_lab(Rgb rgb) noexcept;
LabImage rgb_to_lab(const RasterImage &img);

/// Maps one channel to [0,255] using its fixed nominal range
/// (L*: [0,100], a*/b*: [-128,127]), rounding half up and clamping.
std::uint8_t channel_to_gray(const Lab &lab, Channel channel) noexcept;
GrayImage extract_channel(const LabImage &img, Channel channel);

} // namespace leafscan
