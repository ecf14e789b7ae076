#include <cmath>

#include "umbra/morphology.h"
#include "umbra/penumbra.h"

namespace umbra {
namespace {

// Clockwise in image coordinates (y down), starting west.
constexpr int kDirX[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kDirY[8] = {0, -1, -1, -1, 0, 1, 1, 1};

int DirectionOf(int dx, int dy) {
  for (int d = 0; d < 8; ++d) {
    if (kDirX[d] == dx && kDirY[d] == dy) return d;
  }
  return 0;
}

}  // namespace

std::vector<std::array<int, 2>> TraceContour(const Mask& mask, int start_x,
                                             int start_y) {
  std::vector<std::array<int, 2>> contour{{start_x, start_y}};
  auto inside = [&](int x, int y) { return mask.Contains(x, y) && mask.at(x, y); };

  int cx = start_x;
  int cy = start_y;
  int back = 0;  // west of the first raster pixel is background
  int second_x = -1;
  int second_y = -1;
  const std::size_t limit = 4 * mask.pixel_count() + 8;
  for (std::size_t step = 0; step < limit; ++step) {
    int found = -1;
    for (int i = 0; i < 8; ++i) {
      const int d = (back + i) % 8;
      if (inside(cx + kDirX[d], cy + kDirY[d])) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    const int nx = cx + kDirX[found];
    const int ny = cy + kDirY[found];
    if (cx == start_x && cy == start_y && nx == second_x && ny == second_y) {
      break;
    }
    const int prev = (found + 7) % 8;
    const int bx = cx + kDirX[prev];
    const int by = cy + kDirY[prev];
    if (second_x < 0) {
      second_x = nx;
      second_y = ny;
    }
    cx = nx;
    cy = ny;
    back = DirectionOf(bx - cx, by - cy);
    if (cx == start_x && cy == start_y) continue;
    contour.push_back({cx, cy});
  }
  return contour;
}

std::vector<BoundaryPoint> ExtractBoundary(const Mask& mask, int spacing) {
  if (spacing < 1) {
    throw Error(ErrorCode::kInvalidParameter, "boundary spacing must be >= 1");
  }
  if (!mask.Any()) throw Error(ErrorCode::kNoShadow, "shadow mask is empty");
  const Components comps = LabelComponents(mask);
  std::vector<bool> traced(comps.count + 1, false);
  std::vector<BoundaryPoint> out;
  const int w = mask.width();
  for (std::size_t i = 0; i < comps.labels.size(); ++i) {
    const int label = comps.labels[i];
    if (label == 0 || traced[label]) continue;
    traced[label] = true;
    const int sx = static_cast<int>(i % w);
    const int sy = static_cast<int>(i / w);
    const auto contour = TraceContour(mask, sx, sy);
    const int n = static_cast<int>(contour.size());
    if (n < kMinPerimeter) continue;

    // Orientation from the signed area; tracing is clockwise on screen for
    // outer contours, which puts the outward normal at (t.y, -t.x).
    double area = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto& a = contour[k];
      const auto& b = contour[(k + 1) % n];
      area += static_cast<double>(a[0]) * b[1] - static_cast<double>(b[0]) * a[1];
    }
    const double orientation = area >= 0.0 ? 1.0 : -1.0;

    constexpr int kTangentReach = 3;
    for (int k = 0; k < n; k += spacing) {
      const auto& ahead = contour[(k + kTangentReach) % n];
      const auto& behind = contour[(k - kTangentReach + n) % n];
      const Vec2 tangent{static_cast<double>(ahead[0] - behind[0]),
                         static_cast<double>(ahead[1] - behind[1])};
      Vec2 normal{tangent.y * orientation, -tangent.x * orientation};
      const double len = normal.Norm();
      if (len > 0.0) normal = normal * (1.0 / len);
      out.push_back({contour[k][0], contour[k][1], normal, label});
    }
  }
  return out;
}

}  // namespace umbra
