#include "doctest.h"

#include "oracles.hpp"
#include "support.hpp"

#include "leafscan/error.hpp"
#include "leafscan/segmentation.hpp"
#include "leafscan/synth.hpp"

#include <random>

using namespace leafscan;

namespace {

Histogram from_counts(std::initializer_list<std::pair<int, std::uint64_t>> bins) {
  std::array<std::uint64_t, kGrayLevels> c{};
  for (const auto &[level, n] : bins) {
    c[static_cast<std::size_t>(level)] = n;
  }
  return Histogram(c);
}

oracle::Counts random_counts(std::mt19937_64 &rng) {
  oracle::Counts c{};
  std::uniform_int_distribution<int> bins(2, 40), level(0, 255), count(1, 500);
  const int k = bins(rng);
  for (int i = 0; i < k; ++i) {
    c[static_cast<std::size_t>(level(rng))] += static_cast<std::uint64_t>(count(rng));
  }
  return c;
}

GrayImage gray(int w, int h, std::vector<std::uint8_t> v) { return GrayImage(w, h, std::move(v)); }

} // namespace

TEST_SUITE("segmentation") {

TEST_CASE("histogram of a 2x2 image") {
  const auto h = build_histogram(gray(2, 2, {0, 0, 255, 255}));
  CHECK(h.count(0) == 2);
  CHECK(h.count(255) == 2);
  CHECK(h.density(0) == 0.5);
  CHECK(h.density(255) == 0.5);
  CHECK(h.total() == 4);
}

TEST_CASE("histogram of a single pixel") {
  const auto h = build_histogram(gray(1, 1, {7}));
  CHECK(h.count(7) == 1);
  CHECK(h.density(7) == 1.0);
  CHECK(h.populated_bins() == 1);
}

TEST_CASE("histogram conserves pixels and density") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(0, 255);
  std::vector<std::uint8_t> px(64 * 64);
  for (auto &p : px) {
    p = static_cast<std::uint8_t>(v(rng));
  }
  const auto h = build_histogram(gray(64, 64, px));
  std::uint64_t sum = 0;
  double dens = 0.0;
  for (int i = 0; i < kGrayLevels; ++i) {
    sum += h.count(i);
    dens += h.density(i);
  }
  CHECK(sum == 4096);
  CHECK(std::abs(dens - 1.0) < 1e-9);
}

TEST_CASE("otsu on two extreme bins picks the smallest k") {
  const auto d = otsu_threshold(from_counts({{0, 2}, {255, 2}}));
  CHECK(d.threshold == 1);
  CHECK(d.variance == doctest::Approx(16256.25).epsilon(1e-12));
  // every candidate ties
  for (const double v : d.variance_curve) {
    CHECK(v == d.variance);
  }
}

TEST_CASE("otsu on bins 10 and 200") {
  const auto d = otsu_threshold(from_counts({{10, 50}, {200, 50}}));
  CHECK(d.threshold == 11);
  const auto ref = oracle::otsu_scan([] {
    oracle::Counts c{};
    c[10] = 50;
    c[200] = 50;
    return c;
  }());
  CHECK(ref.threshold == 11);
  CHECK(std::abs(d.variance - ref.variance.convert_to<double>()) < 1e-9);
  CHECK(std::isnan(d.variance_curve[9]));
  CHECK(std::isnan(d.variance_curve[200]));
  CHECK(d.variance_curve[10] == d.variance);
  CHECK(d.variance_curve[199] == d.variance);
}

TEST_CASE("uniform histogram has no threshold") {
  CHECK_THROWS_WITH_AS(otsu_threshold(from_counts({{42, 100}})), doctest::Contains("uniform image"),
                       UniformImageError);
}

TEST_CASE("otsu equals the exhaustive scan on random histograms") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_counts(rng);
    const auto d = otsu_threshold(Histogram(c));
    const auto ref = oracle::otsu_scan(c);
    CHECK(d.threshold == ref.threshold);
    CHECK(std::abs(d.variance - ref.variance.convert_to<double>()) < 1e-9);
    for (int k = 1; k <= 255; ++k) {
      const auto it = ref.curve.find(k);
      const double got = d.variance_curve[static_cast<std::size_t>(k - 1)];
      if (it == ref.curve.end()) {
        CHECK(std::isnan(got));
      } else {
        CHECK(std::abs(got - it->second.convert_to<double>()) < 1e-9);
      }
    }
  }
}

TEST_CASE("between-class maximum equals within-class minimum") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_counts(rng);
    CHECK(otsu_threshold(Histogram(c)).threshold == oracle::otsu_intra_scan(c));
  }
}

TEST_CASE("class statistics are consistent at every candidate") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_counts(rng);
    const Histogram h(c);
    const auto d = otsu_threshold(h);
    CHECK(std::abs(d.omega0 + d.omega1 - 1.0) < 1e-9);
    CHECK(std::abs(d.omega0 * d.mu0 + d.omega1 * d.mu1 - d.global_mean) < 1e-6);
    double mx = 0.0;
    for (const double v : d.variance_curve) {
      if (!std::isnan(v)) {
        mx = std::max(mx, v);
      }
    }
    CHECK(d.variance == mx);
    // weights and means from scratch at every k
    for (int k = 1; k <= 255; ++k) {
      double n0 = 0, s0 = 0, n1 = 0, s1 = 0;
      for (int i = 0; i < 256; ++i) {
        (i < k ? n0 : n1) += static_cast<double>(c[i]);
        (i < k ? s0 : s1) += static_cast<double>(c[i]) * i;
      }
      if (n0 == 0 || n1 == 0) {
        continue;
      }
      const double N = n0 + n1;
      CHECK(std::abs(n0 / N + n1 / N - 1.0) < 1e-9);
      CHECK(std::abs(s0 / N + s1 / N - d.global_mean) < 1e-6);
    }
  }
}

TEST_CASE("shifting every pixel shifts the threshold") {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> lo(0, 150), span(2, 90), shift(1, 60);
  for (int trial = 0; trial < 100; ++trial) {
    const int a = lo(rng), b = a + span(rng);
    const int c = shift(rng);
    if (b + c > 255) {
      continue;
    }
    std::uniform_int_distribution<int> v(a, b);
    std::vector<std::uint8_t> px(32 * 32), moved(32 * 32);
    for (std::size_t i = 0; i < px.size(); ++i) {
      px[i] = static_cast<std::uint8_t>(v(rng));
      moved[i] = static_cast<std::uint8_t>(px[i] + c);
    }
    const auto h = build_histogram(gray(32, 32, px));
    if (h.populated_bins() < 2) {
      continue;
    }
    const int t = otsu_threshold(h).threshold;
    CHECK(otsu_threshold(build_histogram(gray(32, 32, moved))).threshold == t + c);
  }
}

TEST_CASE("apply_threshold polarities") {
  const auto img = gray(2, 2, {0, 0, 255, 255});
  const auto below = apply_threshold(img, 1, Polarity::Below);
  CHECK(below.test(0, 0));
  CHECK(below.test(1, 0));
  CHECK(below.count() == 2);
  const auto above = apply_threshold(img, 1, Polarity::Above);
  CHECK(above.test(0, 1));
  CHECK(above.test(1, 1));
  CHECK(above.count() == 2);
  CHECK_NOTHROW(apply_threshold(img, 1, Polarity::Below));
  CHECK_THROWS_AS(apply_threshold(img, 256, Polarity::Below), OutOfRange);
  CHECK_THROWS_AS(apply_threshold(img, 0, Polarity::Below), OutOfRange);
}

TEST_CASE("polarity masks partition the image") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> v(0, 255), t(1, 255);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> px(20 * 15);
    for (auto &p : px) {
      p = static_cast<std::uint8_t>(v(rng));
    }
    const auto img = gray(20, 15, px);
    const int T = t(rng);
    const auto a = apply_threshold(img, T, Polarity::Below);
    const auto b = apply_threshold(img, T, Polarity::Above);
    for (std::size_t i = 0; i < px.size(); ++i) {
      CHECK(a.test(i) != b.test(i));
      CHECK(a.test(i) == (px[i] < T));
    }
  }
}

TEST_CASE("default polarity per channel") {
  CHECK(default_polarity(Channel::A) == Polarity::Below);
  CHECK(default_polarity(Channel::L) == Polarity::Below);
  CHECK(default_polarity(Channel::B) == Polarity::Above);
  CHECK(parse_polarity("above") == Polarity::Above);
  CHECK_FALSE(parse_polarity("sideways").has_value());
}

TEST_CASE("segmenting a synthetic ellipse recovers its pixels exactly") {
  SyntheticLeafSpec spec;
  spec.leaf = LeafShape{{200, 150}, 100, 60, 2.0};
  const auto leaf = generate_leaf(spec);
  const auto seg = segment_leaf(rgb_to_lab(leaf.image), {});
  CHECK_FALSE(seg.decision.overridden);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const bool inside = std::pow((x - 200.0) / 100.0, 2) + std::pow((y - 150.0) / 60.0, 2) <= 1.0;
      REQUIRE(seg.mask.test(x, y) == inside);
    }
  }
  CHECK(seg.mask.count() == oracle::count_superellipse(200, 150, 100, 60, 2.0, spec.width, spec.height));

  SegmentationConfig manual;
  manual.manual_threshold = seg.decision.threshold;
  const auto again = segment_leaf(rgb_to_lab(leaf.image), manual);
  CHECK(again.mask == seg.mask);
  CHECK(again.decision.overridden);
  REQUIRE(again.decision.automatic.has_value());
  CHECK(again.decision.automatic->threshold == seg.decision.threshold);
}

TEST_CASE("uniform image needs a manual threshold") {
  const auto lab = rgb_to_lab(RasterImage(10, 10, Rgb{255, 255, 255}));
  CHECK_THROWS_AS(segment_leaf(lab, {}), UniformImageError);
  SegmentationConfig manual;
  manual.manual_threshold = 100;
  const auto seg = segment_leaf(lab, manual);
  CHECK(seg.decision.overridden);
  CHECK_FALSE(seg.decision.automatic.has_value());
  CHECK(seg.mask.count() == 0);
}

}
