#ifndef UMBRA_COLOR_H_
#define UMBRA_COLOR_H_

#include "umbra/image.h"

namespace umbra {

enum class ColorSpace { kYCbCr, kGrayscale, kLogRGB };

// Offset inside the logarithm so that black maps to a finite value.
inline constexpr double kLogEpsilon = 1.0 / 255.0;

// BT.601 full-range YCbCr (chroma re-centred at 0.5), BT.601 luma, or
// ln(x + 1/255) affinely rescaled so [0,1] maps onto [0,1].
RasterImage ColorConvert(const RasterImage& img, ColorSpace target);

// Inverse of the YCbCr conversion. Used for round-trip checks.
RasterImage YCbCrToRgb(const RasterImage& ycbcr);

// Scalar forms of the log map and its inverse.
double LogEncode(double linear);
double LogDecode(double encoded);

double Luma(double r, double g, double b);

}  // namespace umbra

#endif  // UMBRA_COLOR_H_
