#include "umbra/clustering.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace umbra {

double Distance(const Point3& a, const Point3& b) {
  const double d0 = a[0] - b[0];
  const double d1 = a[1] - b[1];
  const double d2 = a[2] - b[2];
  return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

std::vector<int> Dbscan(const std::vector<Point3>& points, double radius,
                        int min_points) {
  const int n = static_cast<int>(points.size());
  std::vector<std::vector<int>> neighbours(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (Distance(points[i], points[j]) <= radius) neighbours[i].push_back(j);
    }
  }
  std::vector<bool> core(n);
  for (int i = 0; i < n; ++i) {
    core[i] = static_cast<int>(neighbours[i].size()) >= min_points;
  }

  // Union-find over core points linked within the radius.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (int j : neighbours[i]) {
      if (!core[j]) continue;
      const int a = find(i);
      const int b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  // Roots are the lowest core index of each component; number them in
  // increasing order.
  std::vector<int> label_of_root(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (core[i] && find(i) == i) label_of_root[i] = next++;
  }
  std::vector<int> labels(n, -1);
  for (int i = 0; i < n; ++i) {
    if (core[i]) {
      labels[i] = label_of_root[find(i)];
      continue;
    }
    int best = -1;
    for (int j : neighbours[i]) {
      if (!core[j]) continue;
      const int l = label_of_root[find(j)];
      if (best < 0 || l < best) best = l;
    }
    labels[i] = best;
  }
  return labels;
}

std::vector<int> MeanShift(const std::vector<Point3>& points,
                           double bandwidth) {
  const int n = static_cast<int>(points.size());
  std::vector<Point3> modes;
  std::vector<int> labels(n, -1);
  for (int i = 0; i < n; ++i) {
    Point3 y = points[i];
    for (int iter = 0; iter < 500; ++iter) {
      Point3 sum{0, 0, 0};
      int count = 0;
      for (const Point3& p : points) {
        if (Distance(p, y) <= bandwidth) {
          for (int a = 0; a < 3; ++a) sum[a] += p[a];
          ++count;
        }
      }
      if (count == 0) break;
      const Point3 next{sum[0] / count, sum[1] / count, sum[2] / count};
      const double moved = Distance(next, y);
      y = next;
      if (moved < 1e-9 * std::max(bandwidth, 1e-12)) break;
    }
    int label = -1;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      if (Distance(modes[m], y) < 0.5 * bandwidth) {
        label = static_cast<int>(m);
        break;
      }
    }
    if (label < 0) {
      label = static_cast<int>(modes.size());
      modes.push_back(y);
    }
    labels[i] = label;
  }
  return labels;
}

int LargestLabel(const std::vector<int>& labels) {
  const int max_label = labels.empty()
                            ? -1
                            : *std::max_element(labels.begin(), labels.end());
  if (max_label < 0) return -1;
  std::vector<int> counts(max_label + 1, 0);
  for (int l : labels) {
    if (l >= 0) ++counts[l];
  }
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                          counts.begin());
}

}  // namespace umbra
