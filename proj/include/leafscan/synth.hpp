#pragma once

#include "leafscan/geometry.hpp"
#include "leafscan/image.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace leafscan {

struct Circle {
  Point2 center;
  double radius = 0.0;
};

/// Superellipse |dx/semi_x|^p + |dy/semi_y|^p <= 1; p = 2 is an ellipse.
struct LeafShape {
  Point2 center;
  double semi_x = 1.0;
  double semi_y = 1.0;
  double exponent = 2.0;

  bool contains(Point2 p) const noexcept;
  /// Boundary point at parameter angle theta.
  Point2 boundary(double theta) const noexcept;
};

/// Hard-edged synthetic leaf. A pixel belongs to a shape iff its centre
/// (integer coordinates) satisfies the shape's inequality.
struct SyntheticLeafSpec {
  int width = 400;
  int height = 300;
  LeafShape leaf;
  Rgb leaf_color{30, 170, 30};
  Rgb background_color{255, 255, 255};
  /// Required distance between leaf and background on the a* gray scale.
  int min_separation = 60;
  /// Interior damage; must lie strictly inside the leaf.
  std::vector<Circle> holes;
  /// Border damage; each must cross the leaf boundary.
  std::vector<Circle> bites;
  /// Leaf-colored blobs in the background, not touching the leaf.
  std::vector<Circle> speckles;
  std::uint64_t seed = 0;
  /// Per-channel uniform noise amplitude drawn from `seed`; 0 = flat colors.
  int color_jitter = 0;
};

struct GroundTruth {
  /// Pre-damage leaf area.
  std::size_t leaf_px_total = 0;
  std::size_t internal_damage_px = 0;
  std::size_t border_damage_px = 0;
  std::size_t speckle_px = 0;
  /// Largest single speckle, for choosing a removal size.
  std::size_t max_speckle_px = 0;
  std::vector<PixelSet> holes;
  /// Leaf pixels removed by each bite (first bite wins on overlap).
  std::vector<PixelSet> bites;
  double damage_ratio = 0.0;

  std::size_t damage_px() const noexcept { return internal_damage_px + border_damage_px; }
};

struct SyntheticLeaf {
  RasterImage image;
  GroundTruth truth;
};

/// Throws SpecError naming the first violated invariant.
void validate(const SyntheticLeafSpec &spec);

SyntheticLeaf generate_leaf(const SyntheticLeafSpec &spec);

/// Ranges for drawing random specs.
struct LeafTemplate {
  int width = 400;
  int height = 300;
  double semi_x_min = 110.0;
  double semi_x_max = 160.0;
  double semi_y_min = 70.0;
  double semi_y_max = 110.0;
  double exponent_min = 2.0;
  double exponent_max = 2.0;
  int holes_min = 0;
  int holes_max = 4;
  double hole_radius_min = 4.0;
  double hole_radius_max = 14.0;
  int bites_min = 0;
  int bites_max = 0;
  double bite_radius_min = 20.0;
  double bite_radius_max = 35.0;
  int speckles_min = 0;
  int speckles_max = 3;
  double speckle_radius_min = 0.5;
  double speckle_radius_max = 2.5;
  Rgb leaf_color{30, 170, 30};
  Rgb background_color{255, 255, 255};
  int min_separation = 60;
  int color_jitter = 0;
};

/// Deterministic per (template, seed); the result always validates.
SyntheticLeafSpec sample_leaf_spec(const LeafTemplate &tmpl, std::uint64_t seed);

enum class ControlPlacement {
  /// B1 chosen so the curve passes through the arc apex at t = 1/2.
  ThroughApex,
  /// B1 placed on the apex itself.
  AtApex,
};

/// Curve an expert would draw over bite `index`: endpoints where the bite
/// circle meets the leaf boundary, bulge at the removed arc's apex (the arc
/// point farthest from the chord). nullopt if the bite does not cross the
/// boundary in exactly two places.
std::optional<QuadraticBezier> bite_reconstruction_curve(const SyntheticLeafSpec &spec, std::size_t index,
                                                         ControlPlacement placement = ControlPlacement::ThroughApex);

} // namespace leafscan
