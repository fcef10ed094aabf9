#include "leafscan/error.hpp"
#include "leafscan/segmentation.hpp"

#include <string>

namespace leafscan {

Segmentation segment_gray(const GrayImage &gray, const SegmentationConfig &config) {
  const auto hist = build_histogram(gray);
  ThresholdDecision decision;
  if (config.manual_threshold) {
    if (*config.manual_threshold < 1 || *config.manual_threshold > kGrayLevels - 1) {
      throw OutOfRange("threshold " + std::to_string(*config.manual_threshold) + " outside [1, 255]");
    }
    if (hist.populated_bins() >= 2) {
      decision.automatic = otsu_threshold(hist);
    }
    decision.threshold = *config.manual_threshold;
    decision.overridden = true;
  } else {
    decision.automatic = otsu_threshold(hist);
    decision.threshold = decision.automatic->threshold;
  }
  auto mask = apply_threshold(gray, decision.threshold, config.effective_polarity());
  return Segmentation{std::move(mask), std::move(decision)};
}

Segmentation segment_leaf(const LabImage &lab, const SegmentationConfig &config) {
  return segment_gray(extract_channel(lab, config.channel), config);
}

} // namespace leafscan
