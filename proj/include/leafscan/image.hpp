#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace leafscan {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb &, const Rgb &) = default;
};

struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const Lab &, const Lab &) = default;
};

/// Integer pixel coordinate, origin top-left, y down.
struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel &, const Pixel &) = default;
  friend auto operator<=>(const Pixel &lhs, const Pixel &rhs) {
    if (auto c = lhs.y <=> rhs.y; c != 0) {
      return c;
    }
    return lhs.x <=> rhs.x;
  }
};

using PixelSet = std::vector<Pixel>;

/// Row-major plane of T with validated dimensions (both >= 1).
template <typename T> class Plane {
public:
  Plane(int width, int height, T fill = T{});
  Plane(int width, int height, std::vector<T> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  const T &at(int x, int y) const noexcept { return data_[index(x, y)]; }
  T &at(int x, int y) noexcept { return data_[index(x, y)]; }
  const T &operator[](std::size_t i) const noexcept { return data_[i]; }
  T &operator[](std::size_t i) noexcept { return data_[i]; }

  std::span<const T> pixels() const noexcept { return data_; }
  std::span<T> pixels() noexcept { return data_; }

  bool same_shape(int width, int height) const noexcept { return width_ == width && height_ == height; }
  template <typename U> bool same_shape(const Plane<U> &other) const noexcept {
    return same_shape(other.width(), other.height());
  }

  friend bool operator==(const Plane &, const Plane &) = default;

private:
  int width_;
  int height_;
  std::vector<T> data_;
};

/// 8-bit sRGB image.
using RasterImage = Plane<Rgb>;
/// CIE L*a*b* image (D65).
using LabImage = Plane<Lab>;
/// 8-bit intensity image, L = 256 levels.
using GrayImage = Plane<std::uint8_t>;

/// Two-valued mask; nonzero = leaf foreground.
class BinaryMask : public Plane<std::uint8_t> {
public:
  BinaryMask(int width, int height, bool fill = false) : Plane(width, height, fill ? 1 : 0) {}
  /// Any nonzero value is foreground; values are normalized to 0/1.
  BinaryMask(int width, int height, std::vector<std::uint8_t> values);

  bool test(int x, int y) const noexcept { return at(x, y) != 0; }
  bool test(std::size_t i) const noexcept { return (*this)[i] != 0; }
  void set(int x, int y, bool value = true) noexcept { at(x, y) = value ? 1 : 0; }
  void set(std::size_t i, bool value = true) noexcept { (*this)[i] = value ? 1 : 0; }

  std::size_t count() const noexcept;

  friend bool operator==(const BinaryMask &, const BinaryMask &) = default;
};

/// Pixel-to-area conversion: area_cm2 = pixels / pixels_per_cm^2.
class ScaleCalibration {
public:
  explicit ScaleCalibration(double pixels_per_cm);

  double pixels_per_cm() const noexcept { return pixels_per_cm_; }
  double area_cm2(std::size_t pixel_count) const noexcept {
    return static_cast<double>(pixel_count) / (pixels_per_cm_ * pixels_per_cm_);
  }

private:
  double pixels_per_cm_;
};

} // namespace leafscan
