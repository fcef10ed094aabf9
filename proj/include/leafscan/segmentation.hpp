#pragma once

#include "leafscan/color.hpp"
#include "leafscan/image.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace leafscan {

inline constexpr int kGrayLevels = 256;

/// Gray-level histogram: counts n_i and densities P_i = n_i / (M*N).
class Histogram {
public:
  Histogram() = default;
  explicit Histogram(const std::array<std::uint64_t, kGrayLevels> &counts);

  std::uint64_t count(int level) const noexcept { return counts_[static_cast<std::size_t>(level)]; }
  double density(int level) const noexcept {
    return total_ == 0 ? 0.0 : static_cast<double>(count(level)) / static_cast<double>(total_);
  }
  std::uint64_t total() const noexcept { return total_; }
  const std::array<std::uint64_t, kGrayLevels> &counts() const noexcept { return counts_; }
  int populated_bins() const noexcept;

private:
  std::array<std::uint64_t, kGrayLevels> counts_{};
  std::uint64_t total_ = 0;
};

Histogram build_histogram(const GrayImage &img);

/// Otsu's threshold with the full inter-class variance curve.
///
/// `variance_curve[k - 1]` holds sigma^2_k for candidate k in [1, 255];
/// candidates leaving a class empty are NaN. The class statistics describe
/// the split at `threshold`: C0 = [0, T-1], C1 = [T, 255].
struct OtsuDiagnostics {
  int threshold = 1;
  double variance = 0.0;
  std::array<double, kGrayLevels - 1> variance_curve{};
  double omega0 = 0.0;
  double omega1 = 0.0;
  double mu0 = 0.0;
  double mu1 = 0.0;
  double global_mean = 0.0;
};

/// Picks the smallest k maximizing sigma^2_k. Throws UniformImageError when
/// fewer than two bins are populated.
OtsuDiagnostics otsu_threshold(const Histogram &h);

enum class Polarity {
  /// foreground iff intensity < T
  Below,
  /// foreground iff intensity >= T
  Above,
};

std::string_view to_string(Polarity p) noexcept;
std::optional<Polarity> parse_polarity(std::string_view text) noexcept;

/// Leaves are below threshold on a* and L* (green/dark on white) and above
/// it on b* (yellow-green on neutral).
Polarity default_polarity(Channel channel) noexcept;

/// T must lie in [1, 255]; throws OutOfRange otherwise.
BinaryMask apply_threshold(const GrayImage &img, int threshold, Polarity polarity);

struct SegmentationConfig {
  Channel channel = Channel::A;
  std::optional<Polarity> polarity;
  std::optional<int> manual_threshold;

  Polarity effective_polarity() const noexcept { return polarity.value_or(default_polarity(channel)); }
};

/// Threshold actually applied, plus the automatic result when one exists.
struct ThresholdDecision {
  int threshold = 1;
  bool overridden = false;
  /// Absent only when the image is uniform and a manual threshold was given.
  std::optional<OtsuDiagnostics> automatic;
};

struct Segmentation {
  BinaryMask mask;
  ThresholdDecision decision;
};

/// extract_channel -> build_histogram -> Otsu (or manual T) -> apply_threshold.
Segmentation segment_leaf(const LabImage &lab, const SegmentationConfig &config);
Segmentation segment_gray(const GrayImage &gray, const SegmentationConfig &config);

} // namespace leafscan
