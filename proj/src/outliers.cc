#include <algorithm>
#include <cmath>

#include "umbra/penumbra.h"

namespace umbra {

Point3 ToSpherical(const Rgb& v) {
  const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  const double theta = r > 0.0 ? std::acos(std::clamp(v[2] / r, -1.0, 1.0)) : 0.0;
  double phi = std::atan2(v[1], v[0]);
  if (phi == -M_PI) phi = M_PI;
  return {r, theta, phi};
}

ScaleFeature ComputeScaleFeature(const SamplingLine& line) {
  const int n = static_cast<int>(line.profile.size());
  const int shadow_end = n / 2;          // rows [0, n/2)
  const int lit_begin = (n + 1) / 2;     // rows [ceil(n/2), n)
  Rgb shadow{0, 0, 0};
  Rgb lit{0, 0, 0};
  for (int r = 0; r < shadow_end; ++r) {
    for (int c = 0; c < 3; ++c) shadow[c] += line.profile[r][c];
  }
  for (int r = lit_begin; r < n; ++r) {
    for (int c = 0; c < 3; ++c) lit[c] += line.profile[r][c];
  }
  ScaleFeature f;
  for (int c = 0; c < 3; ++c) {
    f.difference[c] = lit[c] / (n - lit_begin) - shadow[c] / shadow_end;
  }
  f.spherical = ToSpherical(f.difference);
  return f;
}

OutlierResult FilterOutlierFeatures(const std::vector<Point3>& features,
                                    double h3, double h4) {
  if (!(h3 > 0.0) || !(h4 > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "clustering radius and bandwidth must be positive");
  }
  OutlierResult result;
  result.cluster = Dbscan(features, h3, kDbscanMinPoints);
  result.subgroup.assign(features.size(), -1);
  const int largest = LargestLabel(result.cluster);
  if (largest < 0) {
    throw Error(ErrorCode::kNoValidSamples,
                "no sampling-line cluster: every sample is noise");
  }
  std::vector<int> members;
  std::vector<Point3> member_points;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (result.cluster[i] == largest) {
      members.push_back(static_cast<int>(i));
      member_points.push_back(features[i]);
    }
  }
  const std::vector<int> groups = MeanShift(member_points, h4);
  const int group_count = *std::max_element(groups.begin(), groups.end()) + 1;
  std::vector<int> sizes(group_count, 0);
  for (int g : groups) ++sizes[g];
  const int biggest = *std::max_element(sizes.begin(), sizes.end());
  for (std::size_t k = 0; k < members.size(); ++k) {
    result.subgroup[members[k]] = groups[k];
    if (sizes[groups[k]] * kSubgroupDivisor >= biggest) {
      result.kept.push_back(members[k]);
    }
  }
  return result;
}

OutlierResult FilterOutliers(std::span<const SamplingLine> lines, double h3,
                             double h4) {
  if (lines.size() < 3) {
    throw Error(ErrorCode::kNoValidSamples,
                "outlier filtering needs at least three sampling lines");
  }
  std::vector<Point3> features;
  features.reserve(lines.size());
  for (const SamplingLine& line : lines) {
    features.push_back(ComputeScaleFeature(line).spherical);
  }
  return FilterOutlierFeatures(features, h3, h4);
}

}  // namespace umbra
