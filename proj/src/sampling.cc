#include <cmath>

#include "umbra/penumbra.h"

namespace umbra {

SamplingLine GrowSamplingLine(const BoundaryPoint& b,
                              const VectorField& gradient,
                              const RasterImage& log_rgb, double h5) {
  if (!(h5 > 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "gradient ratio h5 must be > 1");
  }
  const Vec2 origin{static_cast<double>(b.x), static_cast<double>(b.y)};
  const Vec2 g = gradient.at(b.x, b.y);
  const double strength = g.Norm();
  if (!(strength > 0.0)) {
    throw Error(ErrorCode::kDegenerateSample,
                "zero fusion gradient at boundary point");
  }
  // The fused image may be darker on the lit side; follow the sign that
  // points out of the shadow and measure projections of that signed field.
  const double sign = g.Dot(b.normal) < 0.0 ? -1.0 : 1.0;
  const Vec2 dir = g * (sign / strength);

  int steps = 0;
  while (true) {
    const Vec2 ps = origin - dir * static_cast<double>(steps);
    const Vec2 pe = origin + dir * static_cast<double>(steps);
    const double ls = sign * gradient.Sample(ps.x, ps.y).Dot(dir);
    const double le = sign * gradient.Sample(pe.x, pe.y).Dot(dir);
    ++steps;
    const Vec2 ns = origin - dir * static_cast<double>(steps);
    const Vec2 ne = origin + dir * static_cast<double>(steps);
    if (!gradient.Contains(ns.x, ns.y) || !gradient.Contains(ne.x, ne.y)) {
      --steps;  // keep both ends inside the image
      break;
    }
    if (h5 * ls < strength && h5 * le < strength) break;
  }
  if (2 * steps + 1 < 4) {
    throw Error(ErrorCode::kDegenerateSample, "sampling line too short");
  }

  SamplingLine line;
  line.boundary = origin;
  line.direction = dir;
  line.half_steps = steps;
  line.component = b.component;
  line.start = origin - dir * static_cast<double>(steps);
  line.end = origin + dir * static_cast<double>(steps);
  line.profile.resize(2 * steps + 1);
  for (int t = 0; t <= 2 * steps; ++t) {
    const Vec2 p = line.PointAt(t);
    for (int c = 0; c < 3; ++c) line.profile[t][c] = log_rgb.Sample(p.x, p.y, c);
  }
  return line;
}

}  // namespace umbra
