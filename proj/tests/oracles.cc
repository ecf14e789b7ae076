#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "umbra/color.h"

using namespace umbra;

namespace oracles {

// Exhaustive K=3 vote: stable ordering by (squared distance, pixel index).
KnnResult BruteForceKnn(const RasterImage& img, const StrokePixels& px) {
  const RasterImage f = ColorConvert(img, ColorSpace::kLogRGB);
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (px.shadow.at(i) || px.lit.at(i)) train.push_back(i);
  }
  KnnResult out{RasterImage(img.width(), img.height(), 1), Mask(img.width(), img.height())};
  const std::size_t k = std::min<std::size_t>(3, train.size());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t t : train) {
      const double d0 = f.at(i, 0) - f.at(t, 0);
      const double d1 = f.at(i, 1) - f.at(t, 1);
      const double d2 = f.at(i, 2) - f.at(t, 2);
      d.push_back({d0 * d0 + d1 * d1 + d2 * d2, t});
    }
    std::partial_sort(d.begin(), d.begin() + k, d.end());
    std::size_t shadow = 0;
    for (std::size_t j = 0; j < k; ++j) shadow += px.shadow.at(d[j].second) ? 1 : 0;
    out.posterior.at(i, 0) = static_cast<double>(shadow) / k;
    bool label = 2 * shadow > k;
    if (2 * shadow == k) label = px.shadow.at(d[0].second);
    out.shadow_votes.set(i, label);
  }
  return out;
}

RasterImage PaletteImage(int w, int h, std::uint64_t seed) {
  const double palette[5][3] = {{0.1, 0.1, 0.1}, {0.2, 0.15, 0.1}, {0.8, 0.8, 0.7},
                                {0.6, 0.7, 0.8}, {0.4, 0.4, 0.4}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 4);
  RasterImage img(w, h, 3);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const int p = pick(rng);
    for (int c = 0; c < 3; ++c) img.at(i, c) = palette[p][c];
  }
  return img;
}

// E_b evaluated from the fused stroke samples themselves.
double DirectFusionEnergy(const RasterImage& ycc, const StrokePixels& px,
                          const std::array<double, 3>& a) {
  auto stats = [&](bool s, bool l) {
    std::vector<double> v;
    for (std::size_t i = 0; i < ycc.pixel_count(); ++i) {
      if ((s && px.shadow.at(i)) || (l && px.lit.at(i))) {
        v.push_back(a[0] * ycc.at(i, 0) + a[1] * ycc.at(i, 1) + a[2] * ycc.at(i, 2));
      }
    }
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    return std::pair{m, std::sqrt(var / v.size())};
  };
  const auto [ms, ss] = stats(true, false);
  const auto [ml, sl] = stats(false, true);
  const auto [ma, sa] = stats(true, true);
  (void)ma;
  if (sa < 1e-6) return INFINITY;
  return ms / std::max(ml, 1e-6) + (ss + sl) / sa;
}

// Y separates the strokes; chroma is noise.
RasterImage LumaSeparatedImage(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-0.04, 0.04);
  RasterImage ycc(size, size, 3);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      ycc.at(x, y, 0) = (x < size / 2 ? 0.2 : 0.8) + 0.5 * noise(rng);
      ycc.at(x, y, 1) = 0.5 + noise(rng);
      ycc.at(x, y, 2) = 0.5 + noise(rng);
    }
  }
  return YCbCrToRgb(ycc);
}

double Sigmoid(double x, double center, double width) {
  return 1.0 / (1.0 + std::exp(-(x - center) / width));
}

// Textbook DBSCAN: expand clusters breadth-first from unvisited core points
// in index order. The first cluster to reach a border point claims it.
std::vector<int> OracleDbscan(const std::vector<Point3>& p, double eps, int min_pts) {
  const int n = static_cast<int>(p.size());
  auto near = [&](int i) {
    std::vector<int> out;
    for (int j = 0; j < n; ++j) {
      double d = 0.0;
      for (int a = 0; a < 3; ++a) d += (p[i][a] - p[j][a]) * (p[i][a] - p[j][a]);
      if (std::sqrt(d) <= eps) out.push_back(j);
    }
    return out;
  };
  std::vector<int> label(n, -2);  // -2 unvisited
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (label[i] != -2) continue;
    const std::vector<int> seeds = near(i);
    if (static_cast<int>(seeds.size()) < min_pts) {
      label[i] = -1;
      continue;
    }
    const int id = next++;
    label[i] = id;
    std::deque<int> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const int q = queue.front();
      queue.pop_front();
      if (label[q] == -1) label[q] = id;
      if (label[q] != -2) continue;
      label[q] = id;
      const std::vector<int> more = near(q);
      if (static_cast<int>(more.size()) >= min_pts) {
        queue.insert(queue.end(), more.begin(), more.end());
      }
    }
  }
  return label;
}

// Mean shift with a flat kernel to a fixed point, modes merged when closer
// than half the bandwidth, then the largest-cluster and 10% rules.
std::vector<int> OracleKept(const std::vector<Point3>& p, double h3, double h4) {
  const std::vector<int> cl = OracleDbscan(p, h3, 3);
  std::vector<int> counts(p.size(), 0);
  for (int l : cl) {
    if (l >= 0) ++counts[l];
  }
  const int largest =
      static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  std::vector<int> members;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (cl[i] == largest) members.push_back(static_cast<int>(i));
  }
  std::vector<Point3> modes;
  std::vector<int> group;
  for (int m : members) {
    Point3 y = p[m];
    for (int it = 0; it < 1000; ++it) {
      Point3 s{0, 0, 0};
      int c = 0;
      for (int q : members) {
        if (Distance(p[q], y) <= h4) {
          for (int a = 0; a < 3; ++a) s[a] += p[q][a];
          ++c;
        }
      }
      const Point3 nx{s[0] / c, s[1] / c, s[2] / c};
      if (nx == y) break;
      y = nx;
    }
    int g = -1;
    for (std::size_t k = 0; k < modes.size() && g < 0; ++k) {
      if (Distance(modes[k], y) < 0.5 * h4) g = static_cast<int>(k);
    }
    if (g < 0) {
      g = static_cast<int>(modes.size());
      modes.push_back(y);
    }
    group.push_back(g);
  }
  std::vector<int> sizes(modes.size(), 0);
  for (int g : group) ++sizes[g];
  const int biggest = *std::max_element(sizes.begin(), sizes.end());
  std::vector<int> kept;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (sizes[group[k]] * 10 >= biggest) kept.push_back(members[k]);
  }
  return kept;
}

std::vector<double> SigmoidColumn(int n, double width) {
  std::vector<double> col(n);
  for (int r = 0; r < n; ++r) col[r] = Sigmoid(r, 0.5 * (n - 1), width);
  return col;
}

// Column whose alignment by (stretch, center) is exactly the reference
// sigmoid, from the closed form of the alignment map.
std::vector<double> Misaligned(int n, double width, double stretch, double center) {
  const double c = 0.5 * (n - 1);
  std::vector<double> col(n);
  for (int r = 0; r < n; ++r) {
    col[r] = Sigmoid(c + (r - c + center) * (c + stretch) / c, c, width);
  }
  return col;
}

// Independent roughness evaluation: squared central second differences of the
// linear scale column, summed over rows and channels.
double OracleRoughness(const RasterImage& scales, int column) {
  double e = 0.0;
  for (int c = 0; c < scales.channels(); ++c) {
    for (int r = 1; r + 1 < scales.height(); ++r) {
      const double d = scales.at(column, r + 1, c) - 2 * scales.at(column, r, c) +
                       scales.at(column, r - 1, c);
      e += d * d;
    }
  }
  return e;
}

}  // namespace oracles
