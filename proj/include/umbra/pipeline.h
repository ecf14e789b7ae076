#ifndef UMBRA_PIPELINE_H_
#define UMBRA_PIPELINE_H_

#include <string>
#include <vector>

#include "umbra/image.h"
#include "umbra/params.h"
#include "umbra/penumbra.h"
#include "umbra/strokes.h"

namespace umbra {

struct RemovalOptions {
  bool color_correct = true;
};

// Per-component bookkeeping; useful for diagnostics and tests.
struct ComponentReport {
  int component = 0;
  int boundary_points = 0;
  int lines_grown = 0;
  int lines_kept = 0;
  bool processed = false;
  std::string note;  // why the component was skipped
};

struct RemovalResult {
  Mask mask;
  RasterImage fusion;          // single channel
  PenumbraStrip strip;         // largest component, before alignment
  PenumbraStrip aligned;       // largest component, after alignment
  SparseScaleField sparse;
  ScaleField dense;
  RasterImage relit;           // I^r
  RasterImage result;          // I^f (equals relit without color correction)
  double reach = 0.0;          // longest sampling half-line, pixels
  std::vector<ComponentReport> components;
};

// Three-channel copy of a 1- or 3-channel image.
RasterImage EnsureRgb(const RasterImage& img);

// Full removal: detection from strokes, then RemoveShadowWithMask.
RemovalResult RemoveShadow(const RasterImage& img, const StrokeSet& strokes,
                           const ParamVector& params,
                           const RemovalOptions& options = {});

// Removal with a precomputed mask and fusion image. Components whose
// sampling or clustering fails are skipped; kNoScales is thrown when none
// survives.
RemovalResult RemoveShadowWithMask(const RasterImage& img, Mask mask,
                                   RasterImage fusion, const ParamVector& params,
                                   const RemovalOptions& options = {});

}  // namespace umbra

#endif  // UMBRA_PIPELINE_H_
