#include "leafscan/error.hpp"
#include "leafscan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace leafscan {

namespace {

// Power-basis coefficients of one coordinate: a t^2 + b t + c.
struct Quadratic {
  double a;
  double b;
  double c;
};

Quadratic coordinate(double p0, double p1, double p2) noexcept { return {p0 - 2.0 * p1 + p2, 2.0 * (p1 - p0), p0}; }

// Roots of q(t) = level strictly inside (0, 1).
void crossings(const Quadratic &q, double level, std::vector<double> &out) {
  const double a = q.a;
  const double b = q.b;
  const double c = q.c - level;
  const auto keep = [&out](double t) {
    if (t > 0.0 && t < 1.0) {
      out.push_back(t);
    }
  };
  if (std::abs(a) < 1e-12 * (std::abs(b) + std::abs(c) + 1.0)) {
    if (b != 0.0) {
      keep(-c / b);
    }
    return;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    return;
  }
  // Numerically stable pair of roots.
  const double s = std::sqrt(disc);
  const double qq = -0.5 * (b + std::copysign(s, b));
  if (qq != 0.0) {
    keep(qq / a);
    keep(c / qq);
  } else {
    keep(-b / (2.0 * a));
  }
}

// Half-integer grid lines between lo and hi, clipped to the lines that
// bound cells of [0, extent).
void grid_crossings(const Quadratic &q, double lo, double hi, int extent, std::vector<double> &out) {
  const double first = std::max(std::floor(lo) - 1.0, -1.0);
  const double last = std::min(std::ceil(hi) + 1.0, static_cast<double>(extent));
  for (double k = first; k <= last; k += 1.0) {
    crossings(q, k + 0.5, out);
  }
}

bool adjacent(Pixel a, Pixel b) noexcept { return std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1; }

} // namespace

PixelSet rasterize_curve(const QuadraticBezier &qb, int width, int height) {
  if (width < 1 || height < 1) {
    throw OutOfRange("raster dimensions must be positive");
  }
  for (const auto p : {qb.b0, qb.b1, qb.b2}) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw OutOfRange("control point has non-finite coordinates");
    }
  }
  const auto qx = coordinate(qb.b0.x, qb.b1.x, qb.b2.x);
  const auto qy = coordinate(qb.b0.y, qb.b1.y, qb.b2.y);
  const auto eval = [&](double t) { return pixel_of(quadratic_point(qb, t)); };

  // Between consecutive crossings of pixel-boundary lines the curve stays in
  // one pixel; the sorted crossing parameters therefore enumerate every
  // pixel the curve visits.
  std::vector<double> ts{0.0, 1.0};
  grid_crossings(qx, std::min({qb.b0.x, qb.b1.x, qb.b2.x}), std::max({qb.b0.x, qb.b1.x, qb.b2.x}), width, ts);
  grid_crossings(qy, std::min({qb.b0.y, qb.b1.y, qb.b2.y}), std::max({qb.b0.y, qb.b1.y, qb.b2.y}), height, ts);
  std::sort(ts.begin(), ts.end());

  struct Sample {
    double t;
    Pixel px;
  };
  std::vector<Sample> samples;
  samples.reserve(ts.size() + 1);
  samples.push_back({0.0, eval(0.0)});
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] > ts[i - 1]) {
      const double mid = 0.5 * (ts[i - 1] + ts[i]);
      samples.push_back({mid, eval(mid)});
    }
  }
  samples.push_back({1.0, eval(1.0)});

  const auto in_bounds = [&](Pixel p) { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; };
  PixelSet chain;
  const auto emit = [&](Pixel p) {
    if (in_bounds(p) && (chain.empty() || !(chain.back() == p))) {
      chain.push_back(p);
    }
  };

  // Bisect whenever rounding placed two consecutive samples more than one
  // pixel apart (near-coincident crossings).
  const auto fill = [&](auto &&self, Sample a, Sample b, int depth) -> void {
    if (adjacent(a.px, b.px) || depth == 0 || !(in_bounds(a.px) && in_bounds(b.px))) {
      emit(b.px);
      return;
    }
    const double mid = 0.5 * (a.t + b.t);
    const Sample m{mid, eval(mid)};
    self(self, a, m, depth - 1);
    self(self, m, b, depth - 1);
  };

  emit(samples.front().px);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    fill(fill, samples[i - 1], samples[i], 48);
  }
  return chain;
}

} // namespace leafscan
