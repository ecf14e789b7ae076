#include "umbra/pipeline.h"

#include <algorithm>
#include <map>

#include "umbra/color.h"
#include "umbra/colorcorrect.h"
#include "umbra/detect.h"
#include "umbra/filter.h"
#include "umbra/relight.h"

namespace umbra {

RasterImage EnsureRgb(const RasterImage& img) {
  if (img.channels() == 3) return img;
  if (img.channels() != 1) {
    throw Error(ErrorCode::kInvalidInput, "images must have 1 or 3 channels");
  }
  RasterImage out(img.width(), img.height(), 3);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) out.at(i, c) = img.at(i, 0);
  }
  return out;
}

RemovalResult RemoveShadow(const RasterImage& img, const StrokeSet& strokes,
                           const ParamVector& params,
                           const RemovalOptions& options) {
  params.Validate();
  const RasterImage rgb = EnsureRgb(img);
  Mask mask = DetectMask(rgb, strokes, params.h1);
  FusionResult fusion = BuildFusionImage(rgb, strokes, params.h2);
  return RemoveShadowWithMask(rgb, std::move(mask), std::move(fusion.image),
                              params, options);
}

RemovalResult RemoveShadowWithMask(const RasterImage& img, Mask mask,
                                   RasterImage fusion, const ParamVector& params,
                                   const RemovalOptions& options) {
  params.Validate();
  const RasterImage rgb = EnsureRgb(img);
  if (!mask.Any()) throw Error(ErrorCode::kNoShadow, "detected shadow mask is empty");

  RemovalResult out;
  out.mask = std::move(mask);
  out.fusion = std::move(fusion);
  const VectorField gradient = GradientField(out.fusion);
  const RasterImage log_rgb = ColorConvert(rgb, ColorSpace::kLogRGB);

  std::map<int, std::vector<BoundaryPoint>> by_component;
  for (const BoundaryPoint& b : ExtractBoundary(out.mask)) {
    by_component[b.component].push_back(b);
  }

  ScaleAccumulator accumulator(rgb.width(), rgb.height());
  bool any = false;
  for (const auto& [label, points] : by_component) {
    ComponentReport report;
    report.component = label;
    report.boundary_points = static_cast<int>(points.size());
    std::vector<SamplingLine> lines;
    for (const BoundaryPoint& b : points) {
      try {
        lines.push_back(GrowSamplingLine(b, gradient, log_rgb, params.h5));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateSample) throw;
      }
    }
    report.lines_grown = static_cast<int>(lines.size());
    std::vector<SamplingLine> kept;
    try {
      const OutlierResult filtered = FilterOutliers(lines, params.h3, params.h4);
      for (int k : filtered.kept) kept.push_back(lines[k]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoValidSamples) throw;
      report.note = e.what();
      out.components.push_back(report);
      continue;
    }
    report.lines_kept = static_cast<int>(kept.size());
    for (const SamplingLine& l : kept) out.reach = std::max(out.reach, l.HalfLength());

    PenumbraStrip strip = BuildStrip(std::move(kept));
    PenumbraStrip aligned = AlignStrip(strip);
    ScalePyramid pyramid = BuildPyramid(aligned);
    const RasterImage chosen = SelectScales(pyramid);
    ScatterScales(chosen, aligned, accumulator);
    if (strip.columns() > out.strip.columns()) {
      out.strip = std::move(strip);
      out.aligned = std::move(aligned);
    }
    report.processed = true;
    any = true;
    out.components.push_back(report);
  }
  if (!any) {
    throw Error(ErrorCode::kNoScales, "no shadow component produced valid samples");
  }

  out.sparse = accumulator.Result();
  Relit relit = DensifyAndRemove(rgb, out.sparse, out.mask, out.reach);
  out.dense = std::move(relit.dense);
  out.relit = std::move(relit.image);
  if (options.color_correct) {
    const CorrectionRegions regions =
        DeriveRegions(out.mask, kDefaultCorrectionBand, out.reach);
    const RasterImage corrected = CorrectColors(out.relit, regions, params.h6);
    out.result = BlendResult(out.relit, corrected, out.dense);
  } else {
    out.result = out.relit;
  }
  return out;
}

}  // namespace umbra
