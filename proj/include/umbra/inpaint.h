#ifndef UMBRA_INPAINT_H_
#define UMBRA_INPAINT_H_

#include "umbra/image.h"

namespace umbra {

// Smallest admissible shadow scale; guards the division in relighting.
inline constexpr double kMinScale = 1e-3;

struct InpaintStats {
  int iterations = 0;  // solver passes; 1 for the direct factorization
  double max_residual = 0.0;  // max |discrete Laplacian| over filled pixels
};

// Harmonic (Laplace) fill: pixels outside `known` receive the solution of
// the 4-neighbour discrete Laplace equation with the known pixels as
// Dirichlet data and Neumann conditions at the image border. Known pixels
// are copied unchanged; filled pixels are clamped to [kMinScale, 1].
// Unknown regions with no path to a known pixel take the known mean.
ScaleField InpaintField(const ScaleField& sparse, const Mask& known,
                        InpaintStats* stats = nullptr);

}  // namespace umbra

#endif  // UMBRA_INPAINT_H_
