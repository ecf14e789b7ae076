#ifndef UMBRA_COLORCORRECT_H_
#define UMBRA_COLORCORRECT_H_

#include <span>
#include <vector>

#include "umbra/image.h"

namespace umbra {

inline constexpr int kDefaultCorrectionBand = 8;
inline constexpr int kCorrectionScales = 3;
inline constexpr double kMinRatio = 0.25;
inline constexpr double kMaxRatio = 4.0;

struct CorrectionRegions {
  Mask lit;     // lit reference ring outside the shadow
  Mask umbra;   // source ring inside the shadow, past the penumbra
  Mask shadow;  // every shadow pixel
  bool Usable() const { return lit.Any() && umbra.Any() && shadow.Any(); }
};

// lit = Dilate(mask, band) minus mask;
// umbra = Erode(mask, extent) minus Erode(mask, extent + band).
// `extent` is the penumbra reach inside the mask.
CorrectionRegions DeriveRegions(const Mask& mask,
                                int band = kDefaultCorrectionBand,
                                double extent = 0.0);

// Median absolute deviation from the median.
double MedianAbsoluteDeviation(std::vector<double> values);

// Per-channel detail ratio MAD(lit) / MAD(umbra), capped to
// [kMinRatio, kMaxRatio]; 1 when the umbra MAD is below 1e-6.
double DetailRatio(std::span<const double> lit, std::span<const double> umbra);

// Three-scale detail alignment of the shadow pixels. Returns `relit`
// unchanged when the regions are not usable.
RasterImage CorrectColors(const RasterImage& relit,
                          const CorrectionRegions& regions, double h6);

// Alpha blend relit * w + corrected * (1 - w) with w the scale field
// min-max normalised per channel over each connected area where it is
// below 1. Where the scale is 1 the relit pixel is copied.
RasterImage BlendResult(const RasterImage& relit, const RasterImage& corrected,
                        const ScaleField& scales);

// relit * weight + corrected * (1 - weight) per sample, clamped to [0,1].
// Weight 1 copies relit and weight 0 copies corrected exactly.
RasterImage BlendWeighted(const RasterImage& relit, const RasterImage& corrected,
                          const ScaleField& weight);

// The normalised weights used by BlendResult.
ScaleField NormalizeScales(const ScaleField& scales);

}  // namespace umbra

#endif  // UMBRA_COLORCORRECT_H_
