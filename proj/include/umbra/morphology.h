#ifndef UMBRA_MORPHOLOGY_H_
#define UMBRA_MORPHOLOGY_H_

#include <vector>

#include "umbra/image.h"

namespace umbra {

// Squared Euclidean distance from every pixel to the nearest set pixel of
// `mask` (0 on the mask). Pixels are "infinitely" far when the mask is empty.
std::vector<double> SquaredDistanceTransform(const Mask& mask);

// Euclidean-disk dilation/erosion of the given radius (pixels).
Mask Dilate(const Mask& mask, double radius);
Mask Erode(const Mask& mask, double radius);

// 8-connected components. Labels are 1-based in row-major order of first
// pixel; 0 marks background.
struct Components {
  std::vector<int> labels;
  std::vector<std::size_t> sizes;  // sizes[k] for label k + 1
  int count = 0;
};
Components LabelComponents(const Mask& mask);

Mask ComponentMask(const Components& comps, int width, int height, int label);

// Drops 8-connected components with fewer than `min_pixels` pixels.
Mask RemoveSmallComponents(const Mask& mask, std::size_t min_pixels);

}  // namespace umbra

#endif  // UMBRA_MORPHOLOGY_H_
