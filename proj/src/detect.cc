#include "umbra/detect.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <unordered_map>
#include <vector>

#include "umbra/color.h"
#include "umbra/filter.h"
#include "umbra/morphology.h"

namespace umbra {
namespace {

constexpr double kGuard = 1e-6;

// Identical feature vectors share one entry; their pixel indices (sorted)
// keep the index tie-break exact.
struct TrainingFeature {
  std::array<double, 3> feature;
  std::vector<std::pair<std::size_t, bool>> samples;  // (pixel, is_shadow)
};

struct Neighbour {
  double distance;
  std::size_t pixel;
  bool shadow;
  bool operator<(const Neighbour& o) const {
    return distance < o.distance ||
           (distance == o.distance && pixel < o.pixel);
  }
};

std::uint64_t Bits(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof(b));
  return b;
}

struct FeatureKey {
  std::uint64_t a, b, c;
  bool operator==(const FeatureKey&) const = default;
};

struct FeatureKeyHash {
  std::size_t operator()(const FeatureKey& k) const {
    std::size_t h = k.a * 0x9e3779b97f4a7c15ULL;
    h ^= k.b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= k.c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

FeatureKey KeyOf(const std::array<double, 3>& f) {
  return {Bits(f[0]), Bits(f[1]), Bits(f[2])};
}

// Exact k-nearest search over the deduplicated training features. Subtrees
// are pruned only when strictly farther than the current k-th neighbour,
// so equal-distance candidates still compete on pixel index.
class FeatureTree {
 public:
  explicit FeatureTree(const std::vector<TrainingFeature>& training)
      : training_(training), order_(training.size()) {
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    Build(0, order_.size());
  }

  void Query(const std::array<double, 3>& f, std::size_t k,
             std::vector<Neighbour>& best) const {
    best.clear();
    if (!nodes_.empty()) Search(0, f, k, best);
  }

 private:
  static constexpr std::size_t kLeafSize = 8;
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
  };

  int Build(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return id;
    std::array<double, 3> lo{}, hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], training_[order_[i]].feature[a]);
        hi[a] = std::max(hi[a], training_[order_[i]].feature[a]);
      }
    }
    int axis = 0;
    for (int a = 1; a < 3; ++a) {
      if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](std::size_t x, std::size_t y) {
                       return training_[x].feature[axis] < training_[y].feature[axis];
                     });
    const double split = training_[order_[mid]].feature[axis];
    const int left = Build(begin, mid);
    const int right = Build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void Offer(const TrainingFeature& t, double dist, std::size_t k,
             std::vector<Neighbour>& best) const {
    if (best.size() == k && dist > best.back().distance) return;
    for (std::size_t s = 0; s < t.samples.size() && s < k; ++s) {
      const Neighbour n{dist, t.samples[s].first, t.samples[s].second};
      if (best.size() == k) {
        if (!(n < best.back())) break;
        best.pop_back();
      }
      best.insert(std::upper_bound(best.begin(), best.end(), n), n);
    }
  }

  void Search(int id, const std::array<double, 3>& f, std::size_t k,
              std::vector<Neighbour>& best) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const TrainingFeature& t = training_[order_[i]];
        const double d0 = f[0] - t.feature[0];
        const double d1 = f[1] - t.feature[1];
        const double d2 = f[2] - t.feature[2];
        Offer(t, d0 * d0 + d1 * d1 + d2 * d2, k, best);
      }
      return;
    }
    // Points equal to the split value can sit on either side.
    const double delta = f[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    Search(near, f, k, best);
    if (best.size() < k || delta * delta <= best.back().distance) {
      Search(far, f, k, best);
    }
  }

  const std::vector<TrainingFeature>& training_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace

KnnResult ClassifyPixels(const RasterImage& img, const StrokePixels& px) {
  if (img.channels() != 3) {
    throw Error(ErrorCode::kInvalidInput, "detection needs an RGB image");
  }
  const RasterImage features = ColorConvert(img, ColorSpace::kLogRGB);
  auto feature_at = [&](std::size_t i) {
    return std::array<double, 3>{features.at(i, 0), features.at(i, 1),
                                 features.at(i, 2)};
  };

  std::vector<TrainingFeature> training;
  {
    std::unordered_map<FeatureKey, std::size_t, FeatureKeyHash> slot;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      const bool shadow = px.shadow.at(i);
      if (!shadow && !px.lit.at(i)) continue;
      const auto f = feature_at(i);
      auto [it, inserted] = slot.emplace(KeyOf(f), training.size());
      if (inserted) training.push_back({f, {}});
      training[it->second].samples.emplace_back(i, shadow);
    }
  }
  if (training.empty()) {
    throw Error(ErrorCode::kInsufficientStrokes, "no stroke pixels");
  }
  std::size_t total = 0;
  for (const auto& t : training) total += t.samples.size();
  const std::size_t k = std::min<std::size_t>(kKnnNeighbors, total);

  KnnResult out{RasterImage(img.width(), img.height(), 1),
                Mask(img.width(), img.height())};
  const FeatureTree tree(training);
  std::unordered_map<FeatureKey, std::pair<double, bool>, FeatureKeyHash> memo;
  std::vector<Neighbour> best;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const auto f = feature_at(i);
    const FeatureKey key = KeyOf(f);
    auto hit = memo.find(key);
    if (hit == memo.end()) {
      tree.Query(f, k, best);
      std::size_t shadow_votes = 0;
      for (const Neighbour& n : best) shadow_votes += n.shadow ? 1 : 0;
      const std::size_t lit_votes = best.size() - shadow_votes;
      bool label = shadow_votes > lit_votes;
      if (shadow_votes == lit_votes) label = best.front().shadow;
      const double posterior =
          static_cast<double>(shadow_votes) / static_cast<double>(best.size());
      hit = memo.emplace(key, std::make_pair(posterior, label)).first;
    }
    out.posterior.at(i, 0) = hit->second.first;
    out.shadow_votes.set(i, hit->second.second);
  }
  return out;
}

RasterImage DetectPosterior(const RasterImage& img, const StrokePixels& px,
                            int h1) {
  if (h1 < 1) throw Error(ErrorCode::kInvalidParameter, "h1 must be >= 1");
  const KnnResult knn = ClassifyPixels(img, px);
  const double sigma = std::ceil(h1 / 2.0);
  return GaussianFilter(knn.posterior, OddAtLeast(h1), sigma);
}

Mask DetectMask(const RasterImage& img, const StrokeSet& strokes, int h1) {
  const StrokePixels px = RasterizeStrokes(strokes, img.width(), img.height());
  const RasterImage posterior = DetectPosterior(img, px, h1);
  Mask mask(img.width(), img.height());
  for (std::size_t i = 0; i < posterior.pixel_count(); ++i) {
    mask.set(i, posterior.at(i, 0) > 0.5);
  }
  const auto min_pixels = static_cast<std::size_t>(
      std::ceil(kSpeckleAreaFraction * static_cast<double>(mask.pixel_count())));
  return RemoveSmallComponents(mask, min_pixels);
}

FusionObjective::FusionObjective(const RasterImage& ycbcr,
                                 const StrokePixels& px)
    : shadow_(Collect(ycbcr, px.shadow, nullptr)),
      lit_(Collect(ycbcr, px.lit, nullptr)),
      both_(Collect(ycbcr, px.shadow, &px.lit)) {}

FusionObjective::Moments FusionObjective::Collect(const RasterImage& ycbcr,
                                                  const Mask& mask,
                                                  const Mask* also) {
  Moments m;
  std::size_t n = 0;
  auto selected = [&](std::size_t i) {
    return mask.at(i) || (also != nullptr && also->at(i));
  };
  for (std::size_t i = 0; i < ycbcr.pixel_count(); ++i) {
    if (!selected(i)) continue;
    ++n;
    for (int a = 0; a < 3; ++a) m.mean[a] += ycbcr.at(i, a);
  }
  if (n == 0) {
    throw Error(ErrorCode::kInsufficientStrokes, "empty stroke pixel set");
  }
  for (double& v : m.mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < ycbcr.pixel_count(); ++i) {
    if (!selected(i)) continue;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        m.cov[a][b] += (ycbcr.at(i, a) - m.mean[a]) * (ycbcr.at(i, b) - m.mean[b]);
      }
    }
  }
  for (auto& row : m.cov) {
    for (double& v : row) v /= static_cast<double>(n);
  }
  return m;
}

double FusionObjective::Mean(const Moments& m, const std::array<double, 3>& a) {
  return a[0] * m.mean[0] + a[1] * m.mean[1] + a[2] * m.mean[2];
}

double FusionObjective::Std(const Moments& m, const std::array<double, 3>& a) {
  double var = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) var += a[i] * a[j] * m.cov[i][j];
  }
  return std::sqrt(std::max(var, 0.0));
}

double FusionObjective::operator()(const std::array<double, 3>& a) const {
  const double spread = Std(both_, a);
  if (spread < kGuard) return std::numeric_limits<double>::infinity();
  const double ratio = Mean(shadow_, a) / std::max(Mean(lit_, a), kGuard);
  return ratio + (Std(shadow_, a) + Std(lit_, a)) / spread;
}

std::array<double, 3> OptimizeFusionFactors(const FusionObjective& objective,
                                            double* energy) {
  std::array<double, 3> best{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double best_e = std::numeric_limits<double>::infinity();
  constexpr int kSteps = 100;
  for (int i = 0; i <= kSteps; ++i) {
    for (int j = 0; i + j <= kSteps; ++j) {
      const std::array<double, 3> a{i / 100.0, j / 100.0,
                                    (kSteps - i - j) / 100.0};
      const double e = objective(a);
      if (e < best_e) {
        best_e = e;
        best = a;
      }
    }
  }
  if (!std::isfinite(best_e)) {
    throw Error(ErrorCode::kDegenerateFusion,
                "stroke pixels have no intensity variation in any fusion");
  }
  // Move mass between pairs of coordinates with a shrinking step.
  for (double step = 0.005; step > 1e-7; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int from = 0; from < 3; ++from) {
        for (int to = 0; to < 3; ++to) {
          if (from == to) continue;
          std::array<double, 3> a = best;
          const double moved = std::min(step, a[from]);
          if (moved <= 0.0) continue;
          a[from] -= moved;
          a[to] += moved;
          const double e = objective(a);
          if (e < best_e) {
            best_e = e;
            best = a;
            improved = true;
          }
        }
      }
    }
  }
  // Renormalise only when that does not cost energy, so the result never
  // loses to a grid candidate.
  std::array<double, 3> unit = best;
  const double sum = best[0] + best[1] + best[2];
  for (double& v : unit) v /= sum;
  if (objective(unit) <= best_e) best = unit;
  if (energy) *energy = objective(best);
  return best;
}

FusionResult BuildFusionImage(const RasterImage& img, const StrokeSet& strokes,
                              int h2) {
  if (h2 < 1) throw Error(ErrorCode::kInvalidParameter, "h2 must be >= 1");
  const StrokePixels px = RasterizeStrokes(strokes, img.width(), img.height());
  const RasterImage ycbcr = ColorConvert(img, ColorSpace::kYCbCr);
  const FusionObjective objective(ycbcr, px);
  FusionResult result;
  result.factors = OptimizeFusionFactors(objective, &result.energy);
  RasterImage fused(img.width(), img.height(), 1);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    double v = 0.0;
    for (int c = 0; c < 3; ++c) v += result.factors[c] * ycbcr.at(i, c);
    fused.at(i, 0) = v;
  }
  result.image = MedianFilter(fused, OddAtLeast(h2));
  return result;
}

}  // namespace umbra
