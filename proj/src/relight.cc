#include "umbra/relight.h"

#include <algorithm>
#include <cmath>

#include "umbra/color.h"
#include "umbra/filter.h"
#include "umbra/inpaint.h"
#include "umbra/morphology.h"
#include "umbra/resample.h"

namespace umbra {
namespace {

constexpr double kMinLitIntensity = 1e-6;

RasterImage ScalesOf(const RasterImage& layer) {
  const int m = layer.width();
  const int n = layer.height();
  RasterImage scales(m, n, layer.channels());
  for (int j = 0; j < m; ++j) {
    for (int c = 0; c < layer.channels(); ++c) {
      const double lit = LogDecode(layer.at(j, n - 1, c));
      for (int r = 0; r < n; ++r) {
        scales.at(j, r, c) =
            lit > kMinLitIntensity ? LogDecode(layer.at(j, r, c)) / lit : 1.0;
      }
      scales.at(j, n - 1, c) = 1.0;
    }
  }
  return scales;
}

}  // namespace

int PyramidKernel(int layer) { return 4 << layer; }

ScalePyramid BuildPyramid(const PenumbraStrip& strip) {
  if (strip.columns() < 1 || strip.rows() < 2) {
    throw Error(ErrorCode::kNoValidSamples, "pyramid needs a non-empty strip");
  }
  ScalePyramid pyramid;
  pyramid.narrow = strip.columns() < kMinPyramidColumns;
  for (int l = 0; l < kPyramidLayers; ++l) {
    pyramid.layers.push_back(
        pyramid.narrow ? strip.values
                       : AverageFilter(strip.values, PyramidKernel(l), 1));
    pyramid.scales.push_back(ScalesOf(pyramid.layers.back()));
  }
  return pyramid;
}

double ColumnRoughness(std::span<const double> column) {
  double sum = 0.0;
  for (std::size_t r = 1; r + 1 < column.size(); ++r) {
    const double d2 = column[r - 1] - 2.0 * column[r] + column[r + 1];
    sum += d2 * d2;
  }
  return sum;
}

void ComputeRoughness(ScalePyramid& pyramid) {
  const RasterImage& first = pyramid.scales.front();
  const int m = first.width();
  const int n = first.height();
  pyramid.roughness.assign(m, std::vector<double>(pyramid.scales.size(), 0.0));
  std::vector<double> column(n);
  for (std::size_t l = 0; l < pyramid.scales.size(); ++l) {
    const RasterImage& s = pyramid.scales[l];
    for (int j = 0; j < m; ++j) {
      for (int c = 0; c < s.channels(); ++c) {
        for (int r = 0; r < n; ++r) column[r] = s.at(j, r, c);
        pyramid.roughness[j][l] += ColumnRoughness(column);
      }
    }
  }
}

int SelectLayer(std::span<const double> roughness, double threshold) {
  int best = -1;
  for (int l = 0; l < static_cast<int>(roughness.size()); ++l) {
    if (roughness[l] > threshold && (best < 0 || roughness[l] < roughness[best])) {
      best = l;
    }
  }
  return best < 0 ? 0 : best;
}

RasterImage SelectScales(ScalePyramid& pyramid) {
  if (pyramid.roughness.empty()) ComputeRoughness(pyramid);
  double total = 0.0;
  std::size_t entries = 0;
  for (const auto& row : pyramid.roughness) {
    for (double e : row) total += e;
    entries += row.size();
  }
  pyramid.threshold = total / static_cast<double>(entries);

  const RasterImage& first = pyramid.scales.front();
  RasterImage chosen(first.width(), first.height(), first.channels());
  pyramid.selected.assign(first.width(), 0);
  for (int j = 0; j < first.width(); ++j) {
    const int l = SelectLayer(pyramid.roughness[j], pyramid.threshold);
    pyramid.selected[j] = l;
    const RasterImage& s = pyramid.scales[l];
    for (int r = 0; r < first.height(); ++r) {
      for (int c = 0; c < first.channels(); ++c) {
        chosen.at(j, r, c) = std::clamp(s.at(j, r, c), kMinScale, 1.0);
      }
    }
  }
  return chosen;
}

ScaleAccumulator::ScaleAccumulator(int width, int height)
    : width_(width),
      height_(height),
      sum_(width, height, 3),
      count_(static_cast<std::size_t>(width) * height, 0) {}

void ScaleAccumulator::Add(int x, int y, const Rgb& scale) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  const std::size_t i = static_cast<std::size_t>(y) * width_ + x;
  for (int c = 0; c < 3; ++c) sum_.at(i, c) += scale[c];
  ++count_[i];
}

SparseScaleField ScaleAccumulator::Result() const {
  SparseScaleField out{ScaleField(width_, height_, 3, 1.0),
                       Mask(width_, height_)};
  for (std::size_t i = 0; i < count_.size(); ++i) {
    if (count_[i] == 0) continue;
    out.known.set(i, true);
    for (int c = 0; c < 3; ++c) out.values.at(i, c) = sum_.at(i, c) / count_[i];
  }
  return out;
}

void ScatterScales(const RasterImage& chosen, const PenumbraStrip& strip,
                   ScaleAccumulator& accumulator) {
  const int n = chosen.height();
  std::vector<double> column(n);
  for (int j = 0; j < chosen.width(); ++j) {
    const SamplingLine& line = strip.lines[j];
    const int len = static_cast<int>(line.profile.size());
    std::vector<std::vector<double>> per_channel(3);
    for (int c = 0; c < 3; ++c) {
      for (int r = 0; r < n; ++r) column[r] = chosen.at(j, r, c);
      const std::vector<double> unaligned =
          UnalignColumn(column, strip.stretch[j], strip.center[j]);
      per_channel[c] = ResampleColumn(unaligned, len);
    }
    for (int t = 0; t < len; ++t) {
      const Vec2 p = line.PointAt(t);
      const Rgb s{per_channel[0][t], per_channel[1][t], per_channel[2][t]};
      accumulator.Add(static_cast<int>(std::lround(p.x)),
                      static_cast<int>(std::lround(p.y)), s);
    }
  }
}

SparseScaleField ScatterScales(const RasterImage& chosen,
                               const PenumbraStrip& strip, int width,
                               int height) {
  ScaleAccumulator acc(width, height);
  ScatterScales(chosen, strip, acc);
  return acc.Result();
}

RasterImage ApplyScales(const RasterImage& img, const ScaleField& scales) {
  if (img.width() != scales.width() || img.height() != scales.height() ||
      img.channels() != scales.channels()) {
    throw Error(ErrorCode::kInvalidInput, "scale field does not match image");
  }
  RasterImage out = img;
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    const double s = scales.data()[i];
    if (s == 1.0) continue;
    out.data()[i] = std::clamp(img.data()[i] / s, 0.0, 1.0);
  }
  return out;
}

Relit DensifyAndRemove(const RasterImage& img, const SparseScaleField& sparse,
                       const Mask& mask, double reach) {
  if (!sparse.known.Any()) {
    throw Error(ErrorCode::kNoScales, "no shadow scales were estimated");
  }
  Relit out;
  out.region = Dilate(mask, reach + 1.0);
  ScaleField seeds = sparse.values;
  Mask known(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (!out.region.at(i)) {
      known.set(i, true);
      for (int c = 0; c < 3; ++c) seeds.at(i, c) = 1.0;
    } else if (sparse.known.at(i)) {
      known.set(i, true);
    }
  }
  out.dense = InpaintField(seeds, known);
  for (double& v : out.dense.data()) v = std::clamp(v, kMinScale, 1.0);
  out.image = ApplyScales(img, out.dense);
  return out;
}

}  // namespace umbra
