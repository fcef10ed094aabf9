#include "leafscan/color.hpp"

#include <array>
#include <cctype>
#include <cmath>

namespace leafscan {

namespace {

// sRGB primaries to XYZ.
constexpr double kM[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// D65 white taken as kM * (1,1,1): neutral inputs map to a* = b* = 0.
constexpr double kWhite[3] = {
    kM[0][0] + kM[0][1] + kM[0][2],
    kM[1][0] + kM[1][1] + kM[1][2],
    kM[2][0] + kM[2][1] + kM[2][2],
};

const std::array<double, 256> &linear_table() {
  static const auto table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double c = i / 255.0;
      t[static_cast<std::size_t>(i)] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return table;
}

double lab_f(double t) noexcept {
  constexpr double delta = 6.0 / 29.0;
  if (t > delta * delta * delta) {
    return std::cbrt(t);
  }
  return t / (3.0 * delta * delta) + 4.0 / 29.0;
}

std::uint8_t to_level(double scaled) noexcept {
  const double r = std::floor(scaled + 0.5);
  if (r <= 0.0) {
    return 0;
  }
  if (r >= 255.0) {
    return 255;
  }
  return static_cast<std::uint8_t>(r);
}

} // namespace

std::string_view to_string(Channel c) noexcept {
  switch (c) {
  case Channel::L:
    return "L";
  case Channel::A:
    return "a";
  case Channel::B:
    return "b";
  }
  return "?";
}

std::optional<Channel> parse_channel(std::string_view text) noexcept {
  if (text.size() != 1) {
    return std::nullopt;
  }
  switch (std::tolower(static_cast<unsigned char>(text[0]))) {
  case 'l':
    return Channel::L;
  case 'a':
    return Channel::A;
  case 'b':
    return Channel::B;
  default:
    return std::nullopt;
  }
}

Lab srgb_to_lab(Rgb rgb) noexcept {
  const auto &lin = linear_table();
  const double r = lin[rgb.r];
  const double g = lin[rgb.g];
  const double b = lin[rgb.b];
  double f[3];
  for (int k = 0; k < 3; ++k) {
    const double v = kM[k][0] * r + kM[k][1] * g + kM[k][2] * b;
    f[k] = lab_f(v / kWhite[k]);
  }
  return Lab{116.0 * f[1] - 16.0, 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])};
}

LabImage rgb_to_lab(const RasterImage &img) {
  LabImage out(img.width(), img.height());
  const auto src = img.pixels();
  auto dst = out.pixels();
  // Runs of identical pixels are common; reuse the previous conversion.
  Rgb last{};
  Lab last_lab = srgb_to_lab(last);
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!(src[i] == last)) {
      last = src[i];
      last_lab = srgb_to_lab(last);
    }
    dst[i] = last_lab;
  }
  return out;
}

std::uint8_t channel_to_gray(const Lab &lab, Channel channel) noexcept {
  switch (channel) {
  case Channel::L:
    return to_level(lab.l * 255.0 / 100.0);
  case Channel::A:
    return to_level(lab.a + 128.0);
  case Channel::B:
    return to_level(lab.b + 128.0);
  }
  return 0;
}

GrayImage extract_channel(const LabImage &img, Channel channel) {
  GrayImage out(img.width(), img.height());
  const auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = channel_to_gray(src[i], channel);
  }
  return out;
}

} // namespace leafscan
