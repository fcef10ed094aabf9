#include "leafscan/segmentation.hpp"

#include "leafscan/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace leafscan {

namespace {

struct ClassSplit {
  double omega0;
  double omega1;
  double mu0;
  double mu1;
};

// Class weights and means for C0 = [0, k-1], C1 = [k, L-1], computed from
// exact integer tallies so identical splits give bit-identical results.
ClassSplit split_at(std::uint64_t n0, std::uint64_t s0, std::uint64_t total, std::uint64_t sum) {
  const std::uint64_t n1 = total - n0;
  const std::uint64_t s1 = sum - s0;
  const double N = static_cast<double>(total);
  return ClassSplit{
      static_cast<double>(n0) / N,
      static_cast<double>(n1) / N,
      static_cast<double>(s0) / static_cast<double>(n0),
      static_cast<double>(s1) / static_cast<double>(n1),
  };
}

using Wide = boost::multiprecision::int256_t;

// sigma^2_k * N^2 = (N s0 - n0 S)^2 / (n0 n1); kept as an exact fraction to
// settle near-ties that double rounding could order wrongly.
struct ExactVariance {
  Wide num;
  Wide den;
};

ExactVariance exact_variance(std::uint64_t n0, std::uint64_t s0, std::uint64_t total, std::uint64_t sum) {
  const Wide d = Wide(total) * Wide(s0) - Wide(n0) * Wide(sum);
  return {d * d, Wide(n0) * Wide(total - n0)};
}

} // namespace

OtsuDiagnostics otsu_threshold(const Histogram &h) {
  if (h.populated_bins() < 2) {
    throw UniformImageError();
  }
  const auto &n = h.counts();
  const std::uint64_t total = h.total();
  std::uint64_t sum = 0;
  for (int i = 0; i < kGrayLevels; ++i) {
    sum += static_cast<std::uint64_t>(i) * n[static_cast<std::size_t>(i)];
  }

  OtsuDiagnostics d;
  d.global_mean = static_cast<double>(sum) / static_cast<double>(total);
  d.variance_curve.fill(std::numeric_limits<double>::quiet_NaN());

  double best = -1.0;
  ExactVariance best_exact{0, 1};
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  for (int k = 1; k < kGrayLevels; ++k) {
    n0 += n[static_cast<std::size_t>(k - 1)];
    s0 += static_cast<std::uint64_t>(k - 1) * n[static_cast<std::size_t>(k - 1)];
    if (n0 == 0 || n0 == total) {
      continue;
    }
    const auto c = split_at(n0, s0, total, sum);
    const double d0 = c.mu0 - d.global_mean;
    const double d1 = c.mu1 - d.global_mean;
    const double sigma2 = c.omega0 * d0 * d0 + c.omega1 * d1 * d1;
    d.variance_curve[static_cast<std::size_t>(k - 1)] = sigma2;
    bool better = sigma2 > best * (1.0 + 1e-9);
    if (!better && sigma2 >= best * (1.0 - 1e-9)) {
      const auto e = exact_variance(n0, s0, total, sum);
      better = e.num * best_exact.den > best_exact.num * e.den;
    }
    if (better) {
      best_exact = exact_variance(n0, s0, total, sum);
      best = sigma2;
      d.threshold = k;
      d.variance = sigma2;
      d.omega0 = c.omega0;
      d.omega1 = c.omega1;
      d.mu0 = c.mu0;
      d.mu1 = c.mu1;
    }
  }
  return d;
}

std::string_view to_string(Polarity p) noexcept { return p == Polarity::Below ? "below" : "above"; }

std::optional<Polarity> parse_polarity(std::string_view text) noexcept {
  if (text == "below") {
    return Polarity::Below;
  }
  if (text == "above") {
    return Polarity::Above;
  }
  return std::nullopt;
}

Polarity default_polarity(Channel channel) noexcept {
  return channel == Channel::B ? Polarity::Above : Polarity::Below;
}

BinaryMask apply_threshold(const GrayImage &img, int threshold, Polarity polarity) {
  if (threshold < 1 || threshold > kGrayLevels - 1) {
    throw OutOfRange("threshold " + std::to_string(threshold) + " outside [1, 255]");
  }
  BinaryMask mask(img.width(), img.height());
  const auto src = img.pixels();
  const bool below = polarity == Polarity::Below;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const bool low = src[i] < threshold;
    mask.set(i, low == below);
  }
  return mask;
}

} // namespace leafscan
