#ifndef UMBRA_DETECT_H_
#define UMBRA_DETECT_H_

#include <array>

#include "umbra/image.h"
#include "umbra/strokes.h"

namespace umbra {

inline constexpr int kKnnNeighbors = 3;

// Fraction of the image area below which a thresholded shadow component is
// treated as speckle and dropped.
inline constexpr double kSpeckleAreaFraction = 0.0005;

struct KnnResult {
  RasterImage posterior;  // fraction of shadow votes among the K neighbours
  Mask shadow_votes;      // majority label, nearest-neighbour tie-break
};

// Exact K=3 nearest-neighbour classification of every pixel on logRGB
// features. Training samples are the stroke pixels in row-major order;
// equal distances are resolved by the lower pixel index.
KnnResult ClassifyPixels(const RasterImage& img, const StrokePixels& strokes);

// Classification, Gaussian smoothing of the posterior (odd size >= h1,
// sigma = ceil(h1 / 2)), threshold at strictly greater than 0.5, and
// speckle removal.
Mask DetectMask(const RasterImage& img, const StrokeSet& strokes, int h1);

// Smoothed posterior before thresholding, for inspection.
RasterImage DetectPosterior(const RasterImage& img, const StrokePixels& px,
                            int h1);

struct FusionResult {
  RasterImage image;  // single channel, texture-suppressed
  std::array<double, 3> factors{};
  double energy = 0.0;
};

// Contrast objective for fusing factors `a` given the YCbCr samples under
// the shadow and lit strokes. Returns +inf for candidates whose fused
// stroke values are constant.
class FusionObjective {
 public:
  FusionObjective(const RasterImage& ycbcr, const StrokePixels& px);
  double operator()(const std::array<double, 3>& a) const;

 private:
  struct Moments {
    std::array<double, 3> mean{};
    std::array<std::array<double, 3>, 3> cov{};
  };
  static Moments Collect(const RasterImage& ycbcr, const Mask& mask,
                         const Mask* also);
  static double Mean(const Moments& m, const std::array<double, 3>& a);
  static double Std(const Moments& m, const std::array<double, 3>& a);

  Moments shadow_;
  Moments lit_;
  Moments both_;
};

// Minimizes the objective over the unit simplex: exhaustive 0.01 grid, then
// pattern-search refinement that only accepts improvements.
std::array<double, 3> OptimizeFusionFactors(const FusionObjective& objective,
                                            double* energy = nullptr);

// Fused YCbCr image with optimal factors, median filtered over an
// h2-by-h2 window (rounded up to odd).
FusionResult BuildFusionImage(const RasterImage& img, const StrokeSet& strokes,
                              int h2);

}  // namespace umbra

#endif  // UMBRA_DETECT_H_
