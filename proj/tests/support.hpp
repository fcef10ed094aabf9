#pragma once

#include "leafscan/image.hpp"

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <unistd.h>
#include <vector>

namespace testing {

// Removes itself on destruction.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("leafscan-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

// '#' is foreground, anything else background.
inline leafscan::BinaryMask mask_from(std::initializer_list<std::string_view> rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.begin()->size());
  leafscan::BinaryMask m(w, h);
  int y = 0;
  for (const auto row : rows) {
    for (int x = 0; x < w; ++x) {
      m.set(x, y, row[static_cast<std::size_t>(x)] == '#');
    }
    ++y;
  }
  return m;
}

inline leafscan::BinaryMask random_mask(int w, int h, double density, std::mt19937_64 &rng) {
  std::bernoulli_distribution fg(density);
  leafscan::BinaryMask m(w, h);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.set(i, fg(rng));
  }
  return m;
}

inline leafscan::RasterImage solid(int w, int h, leafscan::Rgb c) { return leafscan::RasterImage(w, h, c); }

inline std::vector<leafscan::Pixel> mask_pixels(const leafscan::BinaryMask &m) {
  std::vector<leafscan::Pixel> out;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m.test(x, y)) {
        out.push_back({x, y});
      }
    }
  }
  return out;
}

} // namespace testing
