#include "leafscan/pipeline.hpp"

#include "leafscan/error.hpp"
#include "leafscan/render.hpp"

#include <cmath>
#include <string>

namespace leafscan {

void AnalysisConfig::validate() const {
  if (threshold && (*threshold < 1 || *threshold > kGrayLevels - 1)) {
    throw OutOfRange("threshold " + std::to_string(*threshold) + " outside [1, 255]");
  }
  if (pixels_per_cm && (!std::isfinite(*pixels_per_cm) || *pixels_per_cm <= 0.0)) {
    throw OutOfRange("pixels_per_cm must be positive and finite");
  }
}

std::vector<PixelSet> AnalysisResult::hole_sets() const {
  std::vector<PixelSet> out;
  out.reserve(holes.size());
  for (const auto &h : holes) {
    out.push_back(h.pixels);
  }
  return out;
}

std::vector<PixelSet> AnalysisResult::border_sets() const {
  std::vector<PixelSet> out;
  for (const auto &c : closure.curves) {
    if (!c.enclosed.empty()) {
      out.push_back(c.enclosed);
    }
  }
  return out;
}

AnalysisResult analyze_lab(const LabImage &lab, const AnalysisConfig &config,
                           std::span<const QuadraticBezier> curves) {
  config.validate();
  auto seg = segment_leaf(lab, config.segmentation());
  const auto min_size = config.effective_min_size(lab.width(), lab.height());
  auto cleaned = fill_small_holes(remove_small_components(seg.mask, min_size), config.min_hole_size);
  auto closure = close_border(cleaned, curves);

  // Border damage was outer background before stamping, so every hole of the
  // stamped mask is either wholly border damage or wholly internal.
  BinaryMask border(lab.width(), lab.height());
  for (const auto &c : closure.curves) {
    for (const auto p : c.enclosed) {
      border.set(p.x, p.y);
    }
  }
  std::vector<Region> holes;
  for (auto &h : find_holes(closure.stamped)) {
    if (!border.test(h.pixels.front().x, h.pixels.front().y)) {
      holes.push_back(std::move(h));
    }
  }

  AnalysisResult result{std::move(seg.decision), min_size, std::move(cleaned), std::move(closure),
                        std::move(holes), {}};
  std::optional<ScaleCalibration> calibration;
  if (config.pixels_per_cm) {
    calibration.emplace(*config.pixels_per_cm);
  }
  const auto hole_sets = result.hole_sets();
  const auto border_sets = result.border_sets();
  result.report = quantify(result.closure.stamped, hole_sets, border_sets, calibration);
  return result;
}

AnalysisResult analyze(const RasterImage &img, const AnalysisConfig &config, std::span<const QuadraticBezier> curves) {
  config.validate();
  return analyze_lab(rgb_to_lab(img), config, curves);
}

RasterImage annotate(const RasterImage &img, const AnalysisResult &result) {
  std::vector<QuadraticBezier> drawn;
  for (const auto &c : result.closure.curves) {
    if (c.status != CurveStatus::Rejected) {
      drawn.push_back(c.placed);
    }
  }
  return render_annotated(img, result.cleaned, result.hole_sets(), result.border_sets(), drawn);
}

} // namespace leafscan
