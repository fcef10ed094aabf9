#include "leafscan/components.hpp"

#include <algorithm>
#include <numeric>

namespace leafscan {

namespace {

class DisjointSet {
public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }

  std::uint32_t find(std::uint32_t x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::uint32_t a, std::uint32_t b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) {
      return;
    }
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

private:
  std::vector<std::uint32_t> parent_;
};

} // namespace

Labeling label_components(const BinaryMask &mask, PixelClass which, std::optional<Connectivity> connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  const bool want = which == PixelClass::Foreground;
  const bool eight = connectivity.value_or(default_connectivity(which)) == Connectivity::Eight;
  const auto in_class = [&](int x, int y) { return mask.test(x, y) == want; };

  // First pass: union each pixel with its already-visited neighbours.
  DisjointSet sets(mask.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!in_class(x, y)) {
        continue;
      }
      const auto here = static_cast<std::uint32_t>(mask.index(x, y));
      if (x > 0 && in_class(x - 1, y)) {
        sets.unite(here, static_cast<std::uint32_t>(mask.index(x - 1, y)));
      }
      if (y == 0) {
        continue;
      }
      if (in_class(x, y - 1)) {
        sets.unite(here, static_cast<std::uint32_t>(mask.index(x, y - 1)));
      }
      if (eight) {
        if (x > 0 && in_class(x - 1, y - 1)) {
          sets.unite(here, static_cast<std::uint32_t>(mask.index(x - 1, y - 1)));
        }
        if (x + 1 < w && in_class(x + 1, y - 1)) {
          sets.unite(here, static_cast<std::uint32_t>(mask.index(x + 1, y - 1)));
        }
      }
    }
  }

  // Second pass: dense ids in raster order of first appearance.
  Labeling out{LabelMap(w, h, 0), {}};
  std::vector<std::int32_t> root_label(mask.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!in_class(x, y)) {
        continue;
      }
      const auto root = sets.find(static_cast<std::uint32_t>(mask.index(x, y)));
      auto &label = root_label[root];
      if (label == 0) {
        out.components.push_back(ComponentStats{static_cast<int>(out.components.size()) + 1, 0,
                                                BoundingBox{x, y, x, y}, false});
        label = out.components.back().label;
      }
      out.labels.at(x, y) = label;
      auto &s = out.components[static_cast<std::size_t>(label - 1)];
      ++s.size;
      s.bbox.min_x = std::min(s.bbox.min_x, x);
      s.bbox.max_x = std::max(s.bbox.max_x, x);
      s.bbox.max_y = y;
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
        s.touches_image_border = true;
      }
    }
  }
  return out;
}

BinaryMask remove_small_components(const BinaryMask &mask, std::size_t min_size) {
  if (min_size == 0) {
    return mask;
  }
  const auto lab = label_components(mask, PixelClass::Foreground);
  if (lab.components.empty()) {
    return mask;
  }
  std::vector<bool> keep(lab.components.size() + 1, false);
  std::size_t largest = 0;
  for (const auto &c : lab.components) {
    keep[static_cast<std::size_t>(c.label)] = c.size >= min_size;
    if (c.size > lab.components[largest].size) {
      largest = static_cast<std::size_t>(c.label - 1);
    }
  }
  keep[largest + 1] = true;

  BinaryMask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto label = lab.labels[i];
    out.set(i, label > 0 && keep[static_cast<std::size_t>(label)]);
  }
  return out;
}

std::size_t default_min_component_size(int width, int height) noexcept {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) / 1000;
}

} // namespace leafscan
