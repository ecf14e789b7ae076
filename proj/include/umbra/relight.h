#ifndef UMBRA_RELIGHT_H_
#define UMBRA_RELIGHT_H_

#include <span>
#include <vector>

#include "umbra/image.h"
#include "umbra/penumbra.h"

namespace umbra {

inline constexpr int kPyramidLayers = 5;
// Strips narrower than this give identical layers for every kernel.
inline constexpr int kMinPyramidColumns = 4;

// Horizontal averaging width of layer `layer` (0-based): 4, 8, 16, 32, 64.
int PyramidKernel(int layer);

struct ScalePyramid {
  std::vector<RasterImage> layers;  // filtered aligned strip, logRGB
  std::vector<RasterImage> scales;  // linear ratio to the lit-end row
  // roughness[column][layer], summed over channels.
  std::vector<std::vector<double>> roughness;
  double threshold = 0.0;     // mean of all roughness entries
  std::vector<int> selected;  // chosen layer per column
  bool narrow = false;        // fewer than kMinPyramidColumns columns
};

// Filters the strip across columns and converts every column to scales by
// dividing its linear intensities by those of its last row.
ScalePyramid BuildPyramid(const PenumbraStrip& strip);

// Sum of squared second differences along one column.
double ColumnRoughness(std::span<const double> column);

// Fills pyramid.roughness from pyramid.scales.
void ComputeRoughness(ScalePyramid& pyramid);

// Layer with the lowest roughness strictly above `threshold`, or layer 0
// when none exceeds it. Ties go to the smaller kernel.
int SelectLayer(std::span<const double> roughness, double threshold);

// Computes the threshold and per-column choice, then returns the chosen
// scale columns (same layout as the strip) clamped to [kMinScale, 1].
RasterImage SelectScales(ScalePyramid& pyramid);

// Collects scale samples at pixels; samples hitting the same pixel are
// averaged.
class ScaleAccumulator {
 public:
  ScaleAccumulator(int width, int height);
  void Add(int x, int y, const Rgb& scale);
  SparseScaleField Result() const;

 private:
  int width_;
  int height_;
  RasterImage sum_;
  std::vector<int> count_;
};

// Undoes the alignment of every chosen column, resamples it to its line's
// profile length and writes each sample to the nearest pixel on the line.
void ScatterScales(const RasterImage& chosen, const PenumbraStrip& strip,
                   ScaleAccumulator& accumulator);
SparseScaleField ScatterScales(const RasterImage& chosen,
                               const PenumbraStrip& strip, int width,
                               int height);

struct Relit {
  ScaleField dense;
  RasterImage image;   // img / dense, clamped to [0,1]
  Mask region;         // pixels the fill was allowed to change
};

// Harmonic fill of the sparse scales over the mask dilated by
// `reach` + 1 pixels; everything outside that region is fixed at 1.
// Throws kNoScales when the sparse field is empty.
Relit DensifyAndRemove(const RasterImage& img, const SparseScaleField& sparse,
                       const Mask& mask, double reach);

// Per-channel division by the scale field, clamped to [0,1]. Pixels with
// scale exactly 1 are copied.
RasterImage ApplyScales(const RasterImage& img, const ScaleField& scales);

}  // namespace umbra

#endif  // UMBRA_RELIGHT_H_
