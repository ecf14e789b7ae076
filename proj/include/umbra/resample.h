#ifndef UMBRA_RESAMPLE_H_
#define UMBRA_RESAMPLE_H_

#include <span>
#include <vector>

namespace umbra {

// Linear interpolation of `values` at `target_len` uniformly spaced
// parameters; first and last samples are reproduced exactly.
std::vector<double> ResampleColumn(std::span<const double> values,
                                   int target_len);

// Linear interpolation at fractional position `pos`, extending edge values
// outside [0, n-1]. Integer positions return the stored sample exactly.
double InterpolateAt(std::span<const double> values, double pos);

}  // namespace umbra

#endif  // UMBRA_RESAMPLE_H_
