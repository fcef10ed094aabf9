#include "leafscan/components.hpp"
#include "leafscan/geometry.hpp"

#include <algorithm>
#include <optional>

namespace leafscan {

namespace {

// Nearest foreground pixel centre within kSnapRadius of p (raster order on
// ties), or nullopt. A point already inside a foreground pixel stays put.
std::optional<Point2> snap_to_foreground(const BinaryMask &mask, Point2 p) {
  const auto c = pixel_of(p);
  if (mask.contains(c.x, c.y) && mask.test(c.x, c.y)) {
    return p;
  }
  const int r = static_cast<int>(kSnapRadius) + 1;
  std::optional<Point2> best;
  double best_d2 = kSnapRadius * kSnapRadius;
  for (int y = c.y - r; y <= c.y + r; ++y) {
    for (int x = c.x - r; x <= c.x + r; ++x) {
      if (!mask.contains(x, y) || !mask.test(x, y)) {
        continue;
      }
      const double dx = x - p.x;
      const double dy = y - p.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2 || (!best && d2 <= best_d2)) {
        best_d2 = d2;
        best = Point2{static_cast<double>(x), static_cast<double>(y)};
      }
    }
  }
  return best;
}

// 1 where the background pixel is 4-connected to the image border.
std::vector<std::uint8_t> outer_background(const BinaryMask &mask) {
  const auto lab = label_components(mask, PixelClass::Background, Connectivity::Four);
  std::vector<std::uint8_t> outer(mask.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto label = lab.labels[i];
    outer[i] = label > 0 && lab.components[static_cast<std::size_t>(label - 1)].touches_image_border ? 1 : 0;
  }
  return outer;
}

} // namespace

std::string_view to_string(CurveStatus s) noexcept {
  switch (s) {
  case CurveStatus::Accepted:
    return "accepted";
  case CurveStatus::NoOp:
    return "noop";
  case CurveStatus::Rejected:
    return "rejected";
  }
  return "?";
}

CurveRejected::CurveRejected(std::size_t index, const std::string &reason)
    : std::runtime_error("curve " + std::to_string(index) + " rejected: " + reason), index_(index) {}

std::size_t BorderClosure::border_damage_px() const noexcept {
  std::size_t n = 0;
  for (const auto &c : curves) {
    n += c.enclosed.size();
  }
  return n;
}

PixelSet BorderClosure::border_damage() const {
  PixelSet all;
  for (const auto &c : curves) {
    all.insert(all.end(), c.enclosed.begin(), c.enclosed.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

BorderClosure close_border(const BinaryMask &mask, std::span<const QuadraticBezier> curves, OnReject on_reject) {
  BorderClosure out{mask, mask, {}};
  if (curves.empty()) {
    return out;
  }
  const auto outer = outer_background(mask);
  // Curve index (1-based) that first enclosed each pixel; 0 = unattributed.
  std::vector<std::size_t> owner(mask.size(), 0);

  for (std::size_t i = 0; i < curves.size(); ++i) {
    CurveOutcome outcome;
    outcome.index = i;
    outcome.placed = curves[i];
    const auto start = snap_to_foreground(out.stamped, curves[i].b0);
    const auto end = snap_to_foreground(out.stamped, curves[i].b2);
    if (!start && !end) {
      outcome.status = CurveStatus::Rejected;
      outcome.message = "curve does not touch the leaf: both endpoints are farther than 3 px from foreground";
      if (on_reject == OnReject::Throw) {
        throw CurveRejected(i, outcome.message);
      }
      out.curves.push_back(std::move(outcome));
      continue;
    }
    if (start) {
      outcome.placed.b0 = *start;
    }
    if (end) {
      outcome.placed.b2 = *end;
    }
    outcome.pixels = rasterize_curve(outcome.placed, mask.width(), mask.height());
    for (const auto p : outcome.pixels) {
      out.stamped.set(p.x, p.y);
    }

    bool enclosed_any = false;
    for (const auto &hole : find_holes(out.stamped)) {
      for (const auto p : hole.pixels) {
        const auto k = mask.index(p.x, p.y);
        if (outer[k] != 0 && owner[k] == 0) {
          owner[k] = i + 1;
          enclosed_any = true;
        }
      }
    }
    if (!enclosed_any) {
      outcome.status = CurveStatus::NoOp;
      outcome.message = "curve encloses no new region";
    }
    out.curves.push_back(std::move(outcome));
  }

  // Later curves may stamp over pixels an earlier one enclosed; those are leaf now.
  out.reconstructed = out.stamped;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const auto k = mask.index(x, y);
      if (owner[k] != 0 && !out.stamped.test(k)) {
        out.curves[owner[k] - 1].enclosed.push_back(Pixel{x, y});
        out.reconstructed.set(k);
      }
    }
  }
  return out;
}

} // namespace leafscan
