#include "umbra/morphology.h"

#include <cmath>
#include <limits>

namespace umbra {
namespace {

constexpr double kFar = 1e20;

// One-dimensional squared distance transform of a sampled function
// (lower envelope of parabolas).
void Transform1d(const std::vector<double>& f, std::vector<double>& d,
                 std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    auto intersect = [&](int p) {
      return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) /
             (2.0 * q - 2.0 * p);
    };
    double s = intersect(v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<double> SquaredDistanceTransform(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<double> dist(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = mask.at(i) ? 0 : kFar;

  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int x = 0; x < w; ++x) {
    f.resize(h); d.resize(h);
    for (int y = 0; y < h; ++y) f[y] = dist[static_cast<std::size_t>(y) * w + x];
    Transform1d(f, d, v, z);
    for (int y = 0; y < h; ++y) dist[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  for (int y = 0; y < h; ++y) {
    f.resize(w); d.resize(w);
    for (int x = 0; x < w; ++x) f[x] = dist[static_cast<std::size_t>(y) * w + x];
    Transform1d(f, d, v, z);
    for (int x = 0; x < w; ++x) dist[static_cast<std::size_t>(y) * w + x] = d[x];
  }
  return dist;
}

Mask Dilate(const Mask& mask, double radius) {
  if (radius <= 0) return mask;
  const std::vector<double> dist = SquaredDistanceTransform(mask);
  const double r2 = radius * radius + 1e-9;
  Mask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < dist.size(); ++i) out.set(i, dist[i] <= r2);
  return out;
}

Mask Erode(const Mask& mask, double radius) {
  if (radius <= 0) return mask;
  return Dilate(mask.Not(), radius).Not();
}

Components LabelComponents(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  Components comps;
  comps.labels.assign(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < comps.labels.size(); ++start) {
    if (!mask.at(start) || comps.labels[start] != 0) continue;
    const int label = ++comps.count;
    std::size_t size = 0;
    stack.push_back(start);
    comps.labels[start] = label;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const int px = static_cast<int>(p % w);
      const int py = static_cast<int>(p / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = px + dx;
          const int ny = py + dy;
          if (!mask.Contains(nx, ny)) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (mask.at(q) && comps.labels[q] == 0) {
            comps.labels[q] = label;
            stack.push_back(q);
          }
        }
      }
    }
    comps.sizes.push_back(size);
  }
  return comps;
}

Mask ComponentMask(const Components& comps, int width, int height, int label) {
  Mask out(width, height);
  for (std::size_t i = 0; i < comps.labels.size(); ++i) {
    out.set(i, comps.labels[i] == label);
  }
  return out;
}

Mask RemoveSmallComponents(const Mask& mask, std::size_t min_pixels) {
  const Components comps = LabelComponents(mask);
  Mask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < comps.labels.size(); ++i) {
    const int label = comps.labels[i];
    out.set(i, label > 0 && comps.sizes[label - 1] >= min_pixels);
  }
  return out;
}

}  // namespace umbra
