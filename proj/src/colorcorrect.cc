#include "umbra/colorcorrect.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "umbra/filter.h"
#include "umbra/morphology.h"

namespace umbra {
namespace {

constexpr double kMinSpread = 1e-6;

double Median(std::vector<double>& v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

std::vector<double> Gather(const RasterImage& img, const Mask& mask, int c) {
  std::vector<double> out;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (mask.at(i)) out.push_back(img.at(i, c));
  }
  return out;
}

}  // namespace

CorrectionRegions DeriveRegions(const Mask& mask, int band, double extent) {
  CorrectionRegions r;
  r.shadow = mask;
  if (band <= 0) {
    r.lit = Mask(mask.width(), mask.height());
    r.umbra = Mask(mask.width(), mask.height());
    return r;
  }
  r.lit = Dilate(mask, band).Minus(mask);
  const Mask inner = extent > 0.0 ? Erode(mask, extent) : mask;
  r.umbra = inner.Minus(Erode(mask, extent + band));
  return r;
}

double MedianAbsoluteDeviation(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const double med = Median(values);
  for (double& v : values) v = std::fabs(v - med);
  return Median(values);
}

double DetailRatio(std::span<const double> lit, std::span<const double> umbra) {
  const double denom =
      MedianAbsoluteDeviation(std::vector<double>(umbra.begin(), umbra.end()));
  if (denom < kMinSpread) return 1.0;
  const double num =
      MedianAbsoluteDeviation(std::vector<double>(lit.begin(), lit.end()));
  return std::clamp(num / denom, kMinRatio, kMaxRatio);
}

RasterImage CorrectColors(const RasterImage& relit,
                          const CorrectionRegions& regions, double h6) {
  if (!(h6 > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "bilateral range must be positive");
  }
  if (!regions.Usable()) return relit;
  const double beta = std::max(relit.width(), relit.height());
  RasterImage corrected = relit;
  for (int s = 1; s <= kCorrectionScales; ++s) {
    const RasterImage base =
        BilateralFilter(corrected, beta / std::pow(2.0, s + 1), h6);
    RasterImage detail = relit;
    for (std::size_t i = 0; i < detail.data().size(); ++i) {
      detail.data()[i] -= base.data()[i];
    }
    RasterImage next = relit;
    for (int c = 0; c < relit.channels(); ++c) {
      const double ratio = DetailRatio(Gather(detail, regions.lit, c),
                                       Gather(detail, regions.umbra, c));
      for (std::size_t i = 0; i < relit.pixel_count(); ++i) {
        if (!regions.shadow.at(i)) continue;
        next.at(i, c) =
            std::clamp(base.at(i, c) + ratio * detail.at(i, c), 0.0, 1.0);
      }
    }
    corrected = std::move(next);
  }
  return corrected;
}

ScaleField NormalizeScales(const ScaleField& scales) {
  const int w = scales.width();
  const int h = scales.height();
  Mask below(w, h);
  for (std::size_t i = 0; i < scales.pixel_count(); ++i) {
    for (int c = 0; c < scales.channels(); ++c) {
      if (scales.at(i, c) < 1.0) below.set(i, true);
    }
  }
  const Components comps = LabelComponents(below);
  std::vector<std::vector<double>> lows(comps.count + 1,
                                        std::vector<double>(scales.channels(), 1.0));
  for (std::size_t i = 0; i < scales.pixel_count(); ++i) {
    const int l = comps.labels[i];
    if (l == 0) continue;
    for (int c = 0; c < scales.channels(); ++c) {
      lows[l][c] = std::min(lows[l][c], scales.at(i, c));
    }
  }
  ScaleField out(w, h, scales.channels(), 1.0);
  for (std::size_t i = 0; i < scales.pixel_count(); ++i) {
    const int l = comps.labels[i];
    if (l == 0) continue;
    for (int c = 0; c < scales.channels(); ++c) {
      const double s = scales.at(i, c);
      const double span = 1.0 - lows[l][c];
      out.at(i, c) = (s == 1.0 || span <= 0.0) ? 1.0 : (s - lows[l][c]) / span;
    }
  }
  return out;
}

RasterImage BlendWeighted(const RasterImage& relit, const RasterImage& corrected,
                          const ScaleField& weight) {
  if (!relit.SameShape(corrected) || !relit.SameShape(weight)) {
    throw Error(ErrorCode::kInvalidInput, "blend inputs differ in shape");
  }
  RasterImage out = relit;
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    const double w = weight.data()[i];
    if (w == 1.0) continue;
    const double v = w == 0.0 ? corrected.data()[i]
                              : relit.data()[i] * w + corrected.data()[i] * (1.0 - w);
    out.data()[i] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

RasterImage BlendResult(const RasterImage& relit, const RasterImage& corrected,
                        const ScaleField& scales) {
  return BlendWeighted(relit, corrected, NormalizeScales(scales));
}

}  // namespace umbra
