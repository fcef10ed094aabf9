#pragma once

#include "leafscan/image.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace leafscan {

/// Pixel-space point, origin top-left, y down. Pixel (x, y) covers
/// [x - 0.5, x + 0.5) x [y - 0.5, y + 0.5).
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2 &, const Point2 &) = default;
};

/// Bezier curve of arbitrary degree n >= 1 (n + 1 control points).
class BezierCurve {
public:
  explicit BezierCurve(std::vector<Point2> control_points);

  int degree() const noexcept { return static_cast<int>(points_.size()) - 1; }
  std::span<const Point2> control_points() const noexcept { return points_; }

private:
  std::vector<Point2> points_;
};

/// Three control points; b0 and b2 are the curve endpoints.
struct QuadraticBezier {
  Point2 b0;
  Point2 b1;
  Point2 b2;

  QuadraticBezier reversed() const noexcept { return {b2, b1, b0}; }
  BezierCurve general() const { return BezierCurve({b0, b1, b2}); }

  friend bool operator==(const QuadraticBezier &, const QuadraticBezier &) = default;
};

/// Bernstein-form evaluation, sum over i of C(n,i) (1-t)^(n-i) t^i B_i.
/// Throws OutOfRange unless t is in [0, 1].
Point2 bezier_point(const BezierCurve &curve, double t);

/// (1-t)^2 B0 + 2t(1-t) B1 + t^2 B2. Throws OutOfRange unless t is in [0, 1].
Point2 quadratic_point(const QuadraticBezier &qb, double t);

/// Pixel containing `p` (coordinates rounded half up).
Pixel pixel_of(Point2 p) noexcept;

/// Ordered chain of every pixel the curve passes through, from pixel_of(b0)
/// to pixel_of(b2). Consecutive pixels differ by at most 1 per coordinate;
/// pixels outside width x height are dropped.
PixelSet rasterize_curve(const QuadraticBezier &qb, int width, int height);

/// Endpoints within this distance of foreground snap onto it.
inline constexpr double kSnapRadius = 3.0;

enum class CurveStatus { Accepted, NoOp, Rejected };
std::string_view to_string(CurveStatus s) noexcept;

struct CurveOutcome {
  std::size_t index = 0;
  CurveStatus status = CurveStatus::Accepted;
  /// Rejection reason or no-op warning; empty when accepted.
  std::string message;
  /// Curve after endpoint snapping (equals the input when rejected).
  QuadraticBezier placed;
  /// Rasterized chain stamped into the mask.
  PixelSet pixels;
  /// Border damage first enclosed by this curve, raster order.
  PixelSet enclosed;
};

struct BorderClosure {
  /// Input foreground plus all curve pixels.
  BinaryMask stamped;
  /// stamped plus all border-damage pixels.
  BinaryMask reconstructed;
  std::vector<CurveOutcome> curves;

  std::size_t border_damage_px() const noexcept;
  /// Union of every curve's enclosed set.
  PixelSet border_damage() const;
};

class CurveRejected : public std::runtime_error {
public:
  CurveRejected(std::size_t index, const std::string &reason);
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

enum class OnReject { Report, Throw };

/// Stamps each curve (in list order) into `mask` and classifies background
/// that becomes enclosed, having previously been connected to the image
/// border, as border damage attributed to the first curve that enclosed it.
/// Curves with both endpoints farther than kSnapRadius from foreground are
/// rejected: skipped and reported, or thrown as CurveRejected.
BorderClosure close_border(const BinaryMask &mask, std::span<const QuadraticBezier> curves,
                           OnReject on_reject = OnReject::Report);

} // namespace leafscan
