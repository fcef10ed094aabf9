#include "leafscan/error.hpp"
#include "leafscan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace leafscan {

namespace {

void check_parameter(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw OutOfRange("curve parameter t = " + std::to_string(t) + " outside [0, 1]");
  }
}

void check_finite(Point2 p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw OutOfRange("control point has non-finite coordinates");
  }
}

} // namespace

BezierCurve::BezierCurve(std::vector<Point2> control_points) : points_(std::move(control_points)) {
  if (points_.size() < 2) {
    throw OutOfRange("a Bezier curve needs at least two control points");
  }
  for (const auto p : points_) {
    check_finite(p);
  }
}

Point2 bezier_point(const BezierCurve &curve, double t) {
  check_parameter(t);
  const auto pts = curve.control_points();
  const int n = curve.degree();
  Point2 out;
  double binom = 1.0;
  for (int i = 0; i <= n; ++i) {
    const double w = binom * std::pow(1.0 - t, n - i) * std::pow(t, i);
    out.x += w * pts[static_cast<std::size_t>(i)].x;
    out.y += w * pts[static_cast<std::size_t>(i)].y;
    binom = binom * (n - i) / (i + 1);
  }
  return out;
}

Point2 quadratic_point(const QuadraticBezier &qb, double t) {
  check_parameter(t);
  const double s = 1.0 - t;
  const double w0 = s * s;
  const double w1 = 2.0 * t * s;
  const double w2 = t * t;
  return Point2{w0 * qb.b0.x + w1 * qb.b1.x + w2 * qb.b2.x, w0 * qb.b0.y + w1 * qb.b1.y + w2 * qb.b2.y};
}

Pixel pixel_of(Point2 p) noexcept {
  const double limit = 1e9;
  const auto round = [limit](double v) { return static_cast<int>(std::clamp(std::floor(v + 0.5), -limit, limit)); };
  return Pixel{round(p.x), round(p.y)};
}

} // namespace leafscan
