#include "leafscan/image.hpp"

#include "leafscan/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace leafscan {

namespace {

std::size_t checked_area(int width, int height) {
  if (width < 1 || height < 1) {
    throw OutOfRange("image dimensions must be positive, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

} // namespace

template <typename T>
Plane<T>::Plane(int width, int height, T fill)
    : width_(width), height_(height), data_(checked_area(width, height), fill) {}

template <typename T>
Plane<T>::Plane(int width, int height, std::vector<T> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != checked_area(width, height)) {
    throw DimensionMismatch("pixel buffer holds " + std::to_string(data_.size()) + " values, expected " +
                            std::to_string(checked_area(width, height)));
  }
}

template class Plane<Rgb>;
template class Plane<Lab>;
template class Plane<std::uint8_t>;
template class Plane<std::int32_t>;

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> values)
    : Plane(width, height, std::move(values)) {
  for (auto &v : pixels()) {
    v = v != 0 ? 1 : 0;
  }
}

std::size_t BinaryMask::count() const noexcept {
  const auto px = pixels();
  return static_cast<std::size_t>(std::count_if(px.begin(), px.end(), [](std::uint8_t v) { return v != 0; }));
}

ScaleCalibration::ScaleCalibration(double pixels_per_cm) : pixels_per_cm_(pixels_per_cm) {
  if (!std::isfinite(pixels_per_cm) || pixels_per_cm <= 0.0) {
    throw OutOfRange("pixels_per_cm must be positive and finite");
  }
}

} // namespace leafscan
