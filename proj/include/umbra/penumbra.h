#ifndef UMBRA_PENUMBRA_H_
#define UMBRA_PENUMBRA_H_

#include <array>
#include <span>
#include <vector>

#include "umbra/clustering.h"
#include "umbra/image.h"

namespace umbra {

inline constexpr int kDefaultBoundarySpacing = 2;
inline constexpr int kMinPerimeter = 8;
inline constexpr int kDbscanMinPoints = 3;
// Sub-groups with fewer than 1/kSubgroupDivisor of the largest sub-group's
// members are dropped.
inline constexpr int kSubgroupDivisor = 10;

struct BoundaryPoint {
  int x = 0;
  int y = 0;
  Vec2 normal;        // unit, pointing out of the shadow
  int component = 0;  // 1-based component label
};

// Outer contours of every 8-connected mask component (Moore-neighbour
// tracing), subsampled every `spacing` contour pixels. Components whose
// contour is shorter than kMinPerimeter are skipped. Throws kNoShadow for an
// empty mask.
std::vector<BoundaryPoint> ExtractBoundary(const Mask& mask,
                                           int spacing = kDefaultBoundarySpacing);

// Ordered contour pixels of the component containing (start_x, start_y),
// which must be its first pixel in row-major order.
std::vector<std::array<int, 2>> TraceContour(const Mask& mask, int start_x,
                                             int start_y);

using Rgb = std::array<double, 3>;

struct SamplingLine {
  Vec2 start;      // shadow side
  Vec2 end;        // lit side
  Vec2 boundary;
  Vec2 direction;  // unit, start -> end
  int half_steps = 0;
  int component = 0;
  std::vector<Rgb> profile;  // logRGB at unit steps from start to end

  double HalfLength() const { return half_steps; }
  Vec2 PointAt(int step) const {
    return start + direction * static_cast<double>(step);
  }
};

// Grows a symmetric line from `b` along the fusion-image gradient until both
// ends' projected gradients drop below L / h5 or an end leaves the image.
// `gradient` is the gradient of the fusion image, `log_rgb` the logRGB image
// that supplies the profile. The direction is oriented along the boundary
// normal so that the line runs from shadow to lit.
SamplingLine GrowSamplingLine(const BoundaryPoint& b,
                              const VectorField& gradient,
                              const RasterImage& log_rgb, double h5);

// Lit-minus-shadow mean logRGB and its spherical coordinates
// (r, polar angle from +z, azimuth in the xy plane).
struct ScaleFeature {
  Rgb difference{};
  Point3 spherical{};
};
ScaleFeature ComputeScaleFeature(const SamplingLine& line);
Point3 ToSpherical(const Rgb& v);

struct OutlierResult {
  std::vector<int> kept;           // indices into the input, in input order
  std::vector<int> cluster;        // DBSCAN label per input line
  std::vector<int> subgroup;       // mean-shift label per line (-1 if unused)
};

// DBSCAN (radius h3) on the spherical scale features, keep the largest
// cluster, split it by flat mean shift (bandwidth h4) and drop sub-groups
// smaller than 10% of the largest. Throws kNoValidSamples when no cluster
// forms.
OutlierResult FilterOutliers(std::span<const SamplingLine> lines, double h3,
                             double h4);
// Same rule on precomputed features.
OutlierResult FilterOutlierFeatures(const std::vector<Point3>& features,
                                    double h3, double h4);

// Length-normalised profiles. `values` has one column per line and n_a rows
// (row 0 = shadow end), 3 channels of logRGB.
struct PenumbraStrip {
  RasterImage values;
  std::vector<SamplingLine> lines;
  std::vector<double> stretch;  // per-column stretching shift
  std::vector<double> center;   // per-column center shift
  std::vector<double> energy;   // per-column alignment MSE after alignment
  std::vector<double> initial_energy;

  int rows() const { return values.height(); }
  int columns() const { return values.width(); }
  std::vector<double> ColumnChannel(int column, int channel) const;
  std::vector<double> ColumnMean(int column) const;  // averaged over channels
};

PenumbraStrip BuildStrip(std::vector<SamplingLine> lines);

// Shifts a column's centre by `center` rows, then stretches it about the
// centre by moving both ends `stretch` rows outward. Linear interpolation,
// edge values extended.
std::vector<double> AlignColumn(std::span<const double> column, double stretch,
                                double center);
// Inverse map of AlignColumn.
std::vector<double> UnalignColumn(std::span<const double> aligned,
                                  double stretch, double center);

struct AlignmentFit {
  double stretch = 0.0;
  double center = 0.0;
  double energy = 0.0;
};
// Bounded minimisation of MSE(AlignColumn(column) - reference) over
// stretch, center in [-n/4, n/4]: integer grid seed, then alternating
// golden-section refinement until the energy improves by less than 1e-8.
AlignmentFit FitAlignment(std::span<const double> column,
                          std::span<const double> reference);

double AlignmentEnergy(std::span<const double> column,
                       std::span<const double> reference, double stretch,
                       double center);

// Aligns every column to the row-wise mean of all columns (averaged over
// channels). Single-column strips come back unchanged with zero shifts.
PenumbraStrip AlignStrip(PenumbraStrip strip);

// Maps logRGB strip values back to intensities for inspection.
RasterImage StripToImage(const RasterImage& values);

}  // namespace umbra

#endif  // UMBRA_PENUMBRA_H_
