#include "leafscan/synth.hpp"

#include "leafscan/color.hpp"
#include "leafscan/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <string>

namespace leafscan {

namespace {

PixelSet disk_pixels(const Circle &c, int width, int height) {
  PixelSet out;
  if (!(c.radius > 0.0) || !std::isfinite(c.radius) || !std::isfinite(c.center.x) || !std::isfinite(c.center.y)) {
    return out;
  }
  const double r2 = c.radius * c.radius;
  const int x0 = std::max(0, static_cast<int>(std::floor(c.center.x - c.radius)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(c.center.x + c.radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.center.y - c.radius)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(c.center.y + c.radius)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - c.center.x;
      const double dy = y - c.center.y;
      if (dx * dx + dy * dy <= r2) {
        out.push_back(Pixel{x, y});
      }
    }
  }
  return out;
}

// Per-pixel membership, shared by rendering, ground truth and validation.
struct Layout {
  int width;
  int height;
  std::vector<std::uint8_t> leaf;
  // 1-based index of the hole / bite / speckle covering the pixel, 0 if none.
  std::vector<std::int32_t> hole;
  std::vector<std::int32_t> bite;
  std::vector<std::int32_t> speckle;
  std::vector<PixelSet> hole_px;
  std::vector<PixelSet> bite_disk_px;
  std::vector<PixelSet> speckle_px;

  std::size_t idx(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  bool inside(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width && y < height; }
  bool damaged_leaf(std::size_t i) const noexcept { return leaf[i] != 0 && hole[i] == 0 && bite[i] == 0; }
};

Layout build_layout(const SyntheticLeafSpec &spec) {
  Layout l{spec.width, spec.height, {}, {}, {}, {}, {}, {}, {}};
  const auto n = static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height);
  l.leaf.assign(n, 0);
  l.hole.assign(n, 0);
  l.bite.assign(n, 0);
  l.speckle.assign(n, 0);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      l.leaf[l.idx(x, y)] = spec.leaf.contains(Point2{static_cast<double>(x), static_cast<double>(y)}) ? 1 : 0;
    }
  }
  const auto stamp = [&](const std::vector<Circle> &circles, std::vector<std::int32_t> &grid,
                         std::vector<PixelSet> &sets) {
    for (std::size_t k = 0; k < circles.size(); ++k) {
      sets.push_back(disk_pixels(circles[k], spec.width, spec.height));
      for (const auto p : sets.back()) {
        auto &g = grid[l.idx(p.x, p.y)];
        if (g == 0) {
          g = static_cast<std::int32_t>(k + 1);
        }
      }
    }
  };
  stamp(spec.holes, l.hole, l.hole_px);
  stamp(spec.bites, l.bite, l.bite_disk_px);
  stamp(spec.speckles, l.speckle, l.speckle_px);
  return l;
}

int a_star_level(Rgb c) { return channel_to_gray(srgb_to_lab(c), Channel::A); }

// 8-connected component count of the damaged leaf.
int damaged_leaf_components(const Layout &l) {
  std::vector<std::uint8_t> seen(l.leaf.size(), 0);
  int components = 0;
  std::deque<Pixel> queue;
  for (int y = 0; y < l.height; ++y) {
    for (int x = 0; x < l.width; ++x) {
      const auto i = l.idx(x, y);
      if (!l.damaged_leaf(i) || seen[i] != 0) {
        continue;
      }
      ++components;
      seen[i] = 1;
      queue.push_back(Pixel{x, y});
      while (!queue.empty()) {
        const auto p = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx;
            const int ny = p.y + dy;
            if (!l.inside(nx, ny)) {
              continue;
            }
            const auto j = l.idx(nx, ny);
            if (l.damaged_leaf(j) && seen[j] == 0) {
              seen[j] = 1;
              queue.push_back(Pixel{nx, ny});
            }
          }
        }
      }
    }
  }
  return components;
}

void validate_layout(const SyntheticLeafSpec &spec, const Layout &l) {
  const auto fail = [](const std::string &what) { throw SpecError(what); };
  const auto on_edge = [&](Pixel p) { return p.x == 0 || p.y == 0 || p.x == l.width - 1 || p.y == l.height - 1; };

  std::size_t leaf_count = 0;
  for (int y = 0; y < l.height; ++y) {
    for (int x = 0; x < l.width; ++x) {
      if (l.leaf[l.idx(x, y)] != 0) {
        ++leaf_count;
        if (on_edge(Pixel{x, y})) {
          fail("leaf touches the image border");
        }
      }
    }
  }
  if (leaf_count == 0) {
    fail("leaf covers no pixel");
  }

  for (std::size_t k = 0; k < l.hole_px.size(); ++k) {
    const auto name = "hole " + std::to_string(k);
    if (l.hole_px[k].empty()) {
      fail(name + " covers no pixel");
    }
    for (const auto p : l.hole_px[k]) {
      if (l.leaf[l.idx(p.x, p.y)] == 0) {
        fail(name + " extends outside the leaf");
      }
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = p.x + dx;
          const int ny = p.y + dy;
          const auto j = l.idx(nx, ny);
          if (l.hole[j] == static_cast<std::int32_t>(k + 1)) {
            continue;
          }
          if (l.leaf[j] == 0 || l.hole[j] != 0 || l.bite[j] != 0) {
            fail(name + " touches the leaf boundary or another damage region");
          }
        }
      }
    }
  }

  for (std::size_t k = 0; k < l.bite_disk_px.size(); ++k) {
    const auto name = "bite " + std::to_string(k);
    bool hits_leaf = false;
    bool hits_outside = false;
    for (const auto p : l.bite_disk_px[k]) {
      if (on_edge(p)) {
        fail(name + " reaches the image border");
      }
      (l.leaf[l.idx(p.x, p.y)] != 0 ? hits_leaf : hits_outside) = true;
    }
    if (!hits_leaf || !hits_outside) {
      fail(name + " does not cross the leaf boundary");
    }
  }

  for (std::size_t k = 0; k < l.speckle_px.size(); ++k) {
    const auto name = "speckle " + std::to_string(k);
    if (l.speckle_px[k].empty()) {
      fail(name + " covers no pixel");
    }
    for (const auto p : l.speckle_px[k]) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = p.x + dx;
          const int ny = p.y + dy;
          if (!l.inside(nx, ny)) {
            continue;
          }
          const auto j = l.idx(nx, ny);
          if (l.leaf[j] != 0 || l.bite[j] != 0) {
            fail(name + " touches the leaf or a bite");
          }
          if (l.speckle[j] != 0 && l.speckle[j] != static_cast<std::int32_t>(k + 1)) {
            fail(name + " touches another speckle");
          }
        }
      }
    }
  }

  if (damaged_leaf_components(l) != 1) {
    fail("damage splits the leaf into several pieces");
  }

  const int separation = std::abs(a_star_level(spec.leaf_color) - a_star_level(spec.background_color));
  if (separation < spec.min_separation) {
    fail("leaf/background a* separation " + std::to_string(separation) + " below required " +
         std::to_string(spec.min_separation));
  }
}

void validate_header(const SyntheticLeafSpec &spec) {
  if (spec.width < 3 || spec.height < 3) {
    throw SpecError("canvas must be at least 3x3");
  }
  if (static_cast<long long>(spec.width) * spec.height > 1LL << 26) {
    throw SpecError("canvas too large");
  }
  const auto &s = spec.leaf;
  if (!(s.semi_x > 0.0) || !(s.semi_y > 0.0) || !(s.exponent > 0.0) || !std::isfinite(s.semi_x) ||
      !std::isfinite(s.semi_y) || !std::isfinite(s.exponent) || !std::isfinite(s.center.x) ||
      !std::isfinite(s.center.y)) {
    throw SpecError("leaf shape needs finite positive semi-axes and exponent");
  }
  if (spec.color_jitter < 0 || spec.color_jitter > 64) {
    throw SpecError("color_jitter must be in [0, 64]");
  }
}

// Portable draws from a 64-bit engine.
double uniform(std::mt19937_64 &rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

int uniform_int(std::mt19937_64 &rng, int lo, int hi) {
  if (hi <= lo) {
    return lo;
  }
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

bool is_valid(const SyntheticLeafSpec &spec) {
  try {
    validate(spec);
    return true;
  } catch (const SpecError &) {
    return false;
  }
}

} // namespace

bool LeafShape::contains(Point2 p) const noexcept {
  const double u = std::abs(p.x - center.x) / semi_x;
  const double v = std::abs(p.y - center.y) / semi_y;
  if (exponent == 2.0) {
    return u * u + v * v <= 1.0;
  }
  return std::pow(u, exponent) + std::pow(v, exponent) <= 1.0;
}

Point2 LeafShape::boundary(double theta) const noexcept {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double e = 2.0 / exponent;
  return Point2{center.x + semi_x * std::copysign(std::pow(std::abs(c), e), c),
                center.y + semi_y * std::copysign(std::pow(std::abs(s), e), s)};
}

void validate(const SyntheticLeafSpec &spec) {
  validate_header(spec);
  validate_layout(spec, build_layout(spec));
}

SyntheticLeaf generate_leaf(const SyntheticLeafSpec &spec) {
  validate_header(spec);
  const auto l = build_layout(spec);
  validate_layout(spec, l);

  RasterImage img(spec.width, spec.height, spec.background_color);
  GroundTruth gt;
  gt.holes = l.hole_px;
  gt.bites.resize(spec.bites.size());
  for (std::size_t i = 0; i < l.leaf.size(); ++i) {
    if (l.leaf[i] == 0) {
      continue;
    }
    ++gt.leaf_px_total;
    if (l.hole[i] != 0) {
      ++gt.internal_damage_px;
    } else if (l.bite[i] != 0) {
      ++gt.border_damage_px;
    }
  }
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const auto i = l.idx(x, y);
      if (l.leaf[i] != 0 && l.hole[i] == 0 && l.bite[i] != 0) {
        gt.bites[static_cast<std::size_t>(l.bite[i] - 1)].push_back(Pixel{x, y});
      }
      if (l.damaged_leaf(i) || l.speckle[i] != 0) {
        img[i] = spec.leaf_color;
      }
    }
  }
  for (const auto &s : l.speckle_px) {
    gt.speckle_px += s.size();
    gt.max_speckle_px = std::max(gt.max_speckle_px, s.size());
  }
  gt.damage_ratio = static_cast<double>(gt.damage_px()) / static_cast<double>(gt.leaf_px_total);

  if (spec.color_jitter > 0) {
    std::mt19937_64 rng(spec.seed);
    const auto jitter = [&](std::uint8_t v) {
      const int d = uniform_int(rng, -spec.color_jitter, spec.color_jitter);
      return static_cast<std::uint8_t>(std::clamp(static_cast<int>(v) + d, 0, 255));
    };
    for (auto &p : img.pixels()) {
      p = Rgb{jitter(p.r), jitter(p.g), jitter(p.b)};
    }
  }
  return SyntheticLeaf{std::move(img), std::move(gt)};
}

SyntheticLeafSpec sample_leaf_spec(const LeafTemplate &t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SyntheticLeafSpec spec;
  spec.width = t.width;
  spec.height = t.height;
  spec.leaf_color = t.leaf_color;
  spec.background_color = t.background_color;
  spec.min_separation = t.min_separation;
  spec.color_jitter = t.color_jitter;
  spec.seed = seed;

  auto &leaf = spec.leaf;
  leaf.semi_x = uniform(rng, t.semi_x_min, t.semi_x_max);
  leaf.semi_y = uniform(rng, t.semi_y_min, t.semi_y_max);
  leaf.exponent = uniform(rng, t.exponent_min, t.exponent_max);
  const double margin_x = 0.5 * t.width - leaf.semi_x - 3.0;
  const double margin_y = 0.5 * t.height - leaf.semi_y - 3.0;
  if (margin_x < 0.0 || margin_y < 0.0) {
    throw SpecError("leaf template does not fit the canvas");
  }
  leaf.center = Point2{0.5 * t.width + uniform(rng, -margin_x, margin_x) * 0.5,
                       0.5 * t.height + uniform(rng, -margin_y, margin_y) * 0.5};
  validate(spec);

  constexpr int kAttempts = 200;
  const int bites = uniform_int(rng, t.bites_min, t.bites_max);
  for (int placed = 0, attempt = 0; placed < bites && attempt < kAttempts; ++attempt) {
    const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double r = uniform(rng, t.bite_radius_min, t.bite_radius_max);
    const auto on_edge = leaf.boundary(theta);
    const double dx = on_edge.x - leaf.center.x;
    const double dy = on_edge.y - leaf.center.y;
    const double len = std::hypot(dx, dy);
    const double depth = uniform(rng, -0.4, 0.4) * r;
    const Circle bite{Point2{on_edge.x + dx / len * depth, on_edge.y + dy / len * depth}, r};
    bool clear = true;
    for (const auto &other : spec.bites) {
      if (std::hypot(other.center.x - bite.center.x, other.center.y - bite.center.y) < other.radius + r + 4.0) {
        clear = false;
      }
    }
    if (!clear) {
      continue;
    }
    spec.bites.push_back(bite);
    if (is_valid(spec) && bite_reconstruction_curve(spec, spec.bites.size() - 1)) {
      ++placed;
    } else {
      spec.bites.pop_back();
    }
  }

  const int holes = uniform_int(rng, t.holes_min, t.holes_max);
  for (int placed = 0, attempt = 0; placed < holes && attempt < kAttempts; ++attempt) {
    const double r = uniform(rng, t.hole_radius_min, t.hole_radius_max);
    const Point2 c{uniform(rng, leaf.center.x - leaf.semi_x, leaf.center.x + leaf.semi_x),
                   uniform(rng, leaf.center.y - leaf.semi_y, leaf.center.y + leaf.semi_y)};
    spec.holes.push_back(Circle{c, r});
    if (is_valid(spec)) {
      ++placed;
    } else {
      spec.holes.pop_back();
    }
  }

  const int speckles = uniform_int(rng, t.speckles_min, t.speckles_max);
  for (int placed = 0, attempt = 0; placed < speckles && attempt < kAttempts; ++attempt) {
    const double r = uniform(rng, t.speckle_radius_min, t.speckle_radius_max);
    const Point2 c{uniform(rng, 2.0, t.width - 3.0), uniform(rng, 2.0, t.height - 3.0)};
    spec.speckles.push_back(Circle{c, r});
    if (is_valid(spec)) {
      ++placed;
    } else {
      spec.speckles.pop_back();
    }
  }
  return spec;
}

std::optional<QuadraticBezier> bite_reconstruction_curve(const SyntheticLeafSpec &spec, std::size_t index,
                                                         ControlPlacement placement) {
  if (index >= spec.bites.size()) {
    return std::nullopt;
  }
  const auto &bite = spec.bites[index];
  const auto &leaf = spec.leaf;
  const auto inside = [&](double theta) {
    const auto p = leaf.boundary(theta);
    return std::hypot(p.x - bite.center.x, p.y - bite.center.y) < bite.radius;
  };

  constexpr int kSamples = 8192;
  const double step = 2.0 * std::numbers::pi / kSamples;
  std::vector<int> entries;
  std::vector<int> exits;
  for (int i = 0; i < kSamples; ++i) {
    const bool a = inside(i * step);
    const bool b = inside((i + 1) * step);
    if (!a && b) {
      entries.push_back(i);
    } else if (a && !b) {
      exits.push_back(i);
    }
  }
  if (entries.size() != 1 || exits.size() != 1) {
    return std::nullopt;
  }
  // Refine each transition by bisection on [i*step, (i+1)*step].
  const auto refine = [&](int i, bool rising) {
    double lo = i * step;
    double hi = (i + 1) * step;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inside(mid) == rising ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double start = refine(entries.front(), true);
  double end = refine(exits.front(), false);
  if (end < start) {
    end += 2.0 * std::numbers::pi;
  }
  const auto b0 = leaf.boundary(start);
  const auto b2 = leaf.boundary(end);

  // Apex: arc point farthest from the chord.
  const double cx = b2.x - b0.x;
  const double cy = b2.y - b0.y;
  const double chord = std::hypot(cx, cy);
  if (chord == 0.0) {
    return std::nullopt;
  }
  Point2 apex = leaf.boundary(0.5 * (start + end));
  double best = -1.0;
  const int arc_samples = 4096;
  for (int i = 0; i <= arc_samples; ++i) {
    const auto p = leaf.boundary(start + (end - start) * i / arc_samples);
    const double d = std::abs(cx * (p.y - b0.y) - cy * (p.x - b0.x)) / chord;
    if (d > best) {
      best = d;
      apex = p;
    }
  }
  Point2 b1 = apex;
  if (placement == ControlPlacement::ThroughApex) {
    b1 = Point2{2.0 * apex.x - 0.5 * (b0.x + b2.x), 2.0 * apex.y - 0.5 * (b0.y + b2.y)};
  }
  return QuadraticBezier{b0, b1, b2};
}

} // namespace leafscan
