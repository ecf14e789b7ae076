#ifndef UMBRA_CLUSTERING_H_
#define UMBRA_CLUSTERING_H_

#include <array>
#include <vector>

namespace umbra {

using Point3 = std::array<double, 3>;

double Distance(const Point3& a, const Point3& b);

// Density-based clustering. A point is core when at least `min_points`
// points (itself included) lie within `radius`. Clusters are the connected
// components of core points; a border point joins the cluster whose lowest
// core index is smallest among its core neighbours. Labels are 0-based in
// order of each cluster's lowest core index; noise is -1.
std::vector<int> Dbscan(const std::vector<Point3>& points, double radius,
                        int min_points);

// Flat-kernel mean shift. Each point climbs to a mode by repeatedly moving
// to the mean of the points within `bandwidth`; modes closer than half the
// bandwidth merge. Labels are 0-based in order of first appearance.
std::vector<int> MeanShift(const std::vector<Point3>& points,
                           double bandwidth);

// Index of the label with most members (ties resolved by the lower label);
// -1 when no label is non-negative.
int LargestLabel(const std::vector<int>& labels);

}  // namespace umbra

#endif  // UMBRA_CLUSTERING_H_
