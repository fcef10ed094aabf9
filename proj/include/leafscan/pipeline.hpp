#pragma once

#include "leafscan/color.hpp"
#include "leafscan/components.hpp"
#include "leafscan/geometry.hpp"
#include "leafscan/image.hpp"
#include "leafscan/quantify.hpp"
#include "leafscan/segmentation.hpp"

#include <optional>
#include <span>
#include <vector>

namespace leafscan {

/// Everything that shapes one analysis besides the image and the curves.
struct AnalysisConfig {
  Channel channel = Channel::A;
  std::optional<Polarity> polarity;
  /// Manual threshold override in [1, 255].
  std::optional<int> threshold;
  /// Noise-removal size; defaults to 0.1% of the image area.
  std::optional<std::size_t> min_size;
  /// Holes smaller than this are filled as leaf; 0 keeps every hole.
  std::size_t min_hole_size = 0;
  std::optional<double> pixels_per_cm;

  SegmentationConfig segmentation() const { return {channel, polarity, threshold}; }
  std::size_t effective_min_size(int width, int height) const noexcept {
    return min_size.value_or(default_min_component_size(width, height));
  }
  /// Throws OutOfRange on an invalid field.
  void validate() const;

  friend bool operator==(const AnalysisConfig &, const AnalysisConfig &) = default;
};

struct AnalysisResult {
  ThresholdDecision decision;
  std::size_t min_size = 0;
  /// Segmented mask after noise removal and small-hole filling, before curves.
  BinaryMask cleaned;
  BorderClosure closure;
  /// Enclosed background of the final mask that is not border damage.
  std::vector<Region> holes;
  DamageReport report;

  std::vector<PixelSet> hole_sets() const;
  std::vector<PixelSet> border_sets() const;
  /// Final leaf mask: cleaned foreground plus curve pixels.
  const BinaryMask &leaf_mask() const noexcept { return closure.stamped; }
};

/// segment -> remove small components -> fill small holes -> close border
/// -> find holes -> quantify. Throws UniformImageError when no threshold
/// can be chosen automatically.
AnalysisResult analyze(const RasterImage &img, const AnalysisConfig &config,
                       std::span<const QuadraticBezier> curves = {});
AnalysisResult analyze_lab(const LabImage &lab, const AnalysisConfig &config,
                           std::span<const QuadraticBezier> curves = {});

/// Annotated rendering of a finished analysis.
RasterImage annotate(const RasterImage &img, const AnalysisResult &result);

} // namespace leafscan
