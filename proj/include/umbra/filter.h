#ifndef UMBRA_FILTER_H_
#define UMBRA_FILTER_H_

#include <vector>

#include "umbra/image.h"

namespace umbra {

// All filters run per channel, replicate edges, and keep dimensions.

// `size` is rounded up to the next odd integer.
RasterImage GaussianFilter(const RasterImage& img, int size, double sigma);

// Square size-by-size median; `size` is rounded up to the next odd integer.
RasterImage MedianFilter(const RasterImage& img, int size);

// Box average of `width` columns by `height` rows. For even extents the
// window covers [p - n/2, p + n/2 - 1].
RasterImage AverageFilter(const RasterImage& img, int width, int height);

// Edge-preserving bilateral filter with a Gaussian spatial kernel of
// `sigma_space` pixels and a Gaussian range kernel of `sigma_range`
// intensity units. Evaluated on a downsampled bilateral grid, so cost is
// independent of sigma_space.
RasterImage BilateralFilter(const RasterImage& img, double sigma_space,
                            double sigma_range);

// Brute-force bilateral filter over a truncated window of radius
// ceil(3 * sigma_space). Exact but quadratic in the radius.
RasterImage BilateralFilterDirect(const RasterImage& img, double sigma_space,
                                  double sigma_range);

// Normalized 1-D Gaussian taps of odd length `size`.
std::vector<double> GaussianKernel(int size, double sigma);

// Central differences in the interior, one-sided differences at borders.
VectorField GradientField(const RasterImage& img);

}  // namespace umbra

#endif  // UMBRA_FILTER_H_
