#include <algorithm>
#include <cmath>
#include <limits>

#include "umbra/color.h"
#include "umbra/penumbra.h"
#include "umbra/resample.h"

namespace umbra {
namespace {

constexpr double kGoldenTolerance = 1e-7;
constexpr double kConvergence = 1e-8;
constexpr int kMaxSweeps = 200;

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

// Stretch keeps the half-length c + A_s at least half a row so the map
// stays invertible.
Bounds StretchBounds(int n) {
  const double c = 0.5 * (n - 1);
  return {std::max(-0.25 * n, 0.5 - c), 0.25 * n};
}

Bounds CenterBounds(int n) { return {-0.25 * n, 0.25 * n}; }

// Minimizes f on [lo, hi]; returns the argmin.
template <typename F>
double GoldenSection(F&& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > kGoldenTolerance) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> PenumbraStrip::ColumnChannel(int column, int channel) const {
  std::vector<double> out(rows());
  for (int r = 0; r < rows(); ++r) out[r] = values.at(column, r, channel);
  return out;
}

std::vector<double> PenumbraStrip::ColumnMean(int column) const {
  std::vector<double> out(rows(), 0.0);
  for (int r = 0; r < rows(); ++r) {
    for (int c = 0; c < values.channels(); ++c) out[r] += values.at(column, r, c);
    out[r] /= values.channels();
  }
  return out;
}

PenumbraStrip BuildStrip(std::vector<SamplingLine> lines) {
  if (lines.empty()) {
    throw Error(ErrorCode::kNoValidSamples, "no sampling lines for the strip");
  }
  int n_a = 0;
  for (const SamplingLine& l : lines) {
    n_a = std::max(n_a, static_cast<int>(l.profile.size()));
  }
  const int m = static_cast<int>(lines.size());
  PenumbraStrip strip;
  strip.values = RasterImage(m, n_a, 3);
  for (int j = 0; j < m; ++j) {
    const auto& profile = lines[j].profile;
    std::vector<double> channel(profile.size());
    for (int c = 0; c < 3; ++c) {
      for (std::size_t r = 0; r < profile.size(); ++r) channel[r] = profile[r][c];
      const std::vector<double> resized = ResampleColumn(channel, n_a);
      for (int r = 0; r < n_a; ++r) strip.values.at(j, r, c) = resized[r];
    }
  }
  strip.lines = std::move(lines);
  strip.stretch.assign(m, 0.0);
  strip.center.assign(m, 0.0);
  strip.energy.assign(m, 0.0);
  strip.initial_energy.assign(m, 0.0);
  return strip;
}

// Row r of the input lands at u = c + (r + A_k - c) (c + A_s) / c.
std::vector<double> AlignColumn(std::span<const double> column, double stretch,
                                double center) {
  const int n = static_cast<int>(column.size());
  const double c = 0.5 * (n - 1);
  std::vector<double> out(n);
  if (stretch == 0.0 && center == 0.0) {
    out.assign(column.begin(), column.end());
    return out;
  }
  const double ratio = c / (c + stretch);
  for (int u = 0; u < n; ++u) {
    out[u] = InterpolateAt(column, c - center + (u - c) * ratio);
  }
  return out;
}

std::vector<double> UnalignColumn(std::span<const double> aligned,
                                  double stretch, double center) {
  const int n = static_cast<int>(aligned.size());
  const double c = 0.5 * (n - 1);
  std::vector<double> out(n);
  if (stretch == 0.0 && center == 0.0) {
    out.assign(aligned.begin(), aligned.end());
    return out;
  }
  const double ratio = (c + stretch) / c;
  for (int r = 0; r < n; ++r) {
    out[r] = InterpolateAt(aligned, c + (r + center - c) * ratio);
  }
  return out;
}

double AlignmentEnergy(std::span<const double> column,
                       std::span<const double> reference, double stretch,
                       double center) {
  const std::vector<double> moved = AlignColumn(column, stretch, center);
  double sum = 0.0;
  for (std::size_t r = 0; r < moved.size(); ++r) {
    const double d = moved[r] - reference[r];
    sum += d * d;
  }
  return sum / static_cast<double>(moved.size());
}

AlignmentFit FitAlignment(std::span<const double> column,
                          std::span<const double> reference) {
  if (column.size() != reference.size() || column.size() < 2) {
    throw Error(ErrorCode::kInvalidInput,
                "alignment needs equal-length columns of at least 2 rows");
  }
  const int n = static_cast<int>(column.size());
  const Bounds sb = StretchBounds(n);
  const Bounds cb = CenterBounds(n);
  auto energy = [&](double s, double k) {
    return AlignmentEnergy(column, reference, s, k);
  };

  AlignmentFit best{0.0, 0.0, energy(0.0, 0.0)};
  for (int s = static_cast<int>(std::ceil(sb.lo)); s <= sb.hi; ++s) {
    for (int k = static_cast<int>(std::ceil(cb.lo)); k <= cb.hi; ++k) {
      const double e = energy(s, k);
      if (e < best.energy) best = {static_cast<double>(s), static_cast<double>(k), e};
    }
  }

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double before = best.energy;
    {
      const double lo = std::max(cb.lo, best.center - 1.0);
      const double hi = std::min(cb.hi, best.center + 1.0);
      const double k = GoldenSection([&](double x) { return energy(best.stretch, x); },
                                     lo, hi);
      const double e = energy(best.stretch, k);
      if (e < best.energy) {
        best.center = k;
        best.energy = e;
      }
    }
    {
      const double lo = std::max(sb.lo, best.stretch - 1.0);
      const double hi = std::min(sb.hi, best.stretch + 1.0);
      const double s = GoldenSection([&](double x) { return energy(x, best.center); },
                                     lo, hi);
      const double e = energy(s, best.center);
      if (e < best.energy) {
        best.stretch = s;
        best.energy = e;
      }
    }
    if (before - best.energy < kConvergence) break;
  }
  return best;
}

PenumbraStrip AlignStrip(PenumbraStrip strip) {
  const int m = strip.columns();
  const int n = strip.rows();
  strip.stretch.assign(m, 0.0);
  strip.center.assign(m, 0.0);
  strip.energy.assign(m, 0.0);
  strip.initial_energy.assign(m, 0.0);
  if (m < 2) return strip;

  // Mean as first column plus averaged offsets, exact for identical columns.
  std::vector<double> reference = strip.ColumnMean(0);
  std::vector<double> offset(n, 0.0);
  for (int j = 1; j < m; ++j) {
    const std::vector<double> col = strip.ColumnMean(j);
    for (int r = 0; r < n; ++r) offset[r] += col[r] - reference[r];
  }
  for (int r = 0; r < n; ++r) reference[r] += offset[r] / m;

  RasterImage aligned = strip.values;
  for (int j = 0; j < m; ++j) {
    const std::vector<double> col = strip.ColumnMean(j);
    strip.initial_energy[j] = AlignmentEnergy(col, reference, 0.0, 0.0);
    const AlignmentFit fit = FitAlignment(col, reference);
    strip.stretch[j] = fit.stretch;
    strip.center[j] = fit.center;
    strip.energy[j] = fit.energy;
    for (int c = 0; c < strip.values.channels(); ++c) {
      const std::vector<double> moved =
          AlignColumn(strip.ColumnChannel(j, c), fit.stretch, fit.center);
      for (int r = 0; r < n; ++r) aligned.at(j, r, c) = moved[r];
    }
  }
  strip.values = std::move(aligned);
  return strip;
}

RasterImage StripToImage(const RasterImage& values) {
  RasterImage out(values.width(), values.height(), values.channels());
  for (std::size_t i = 0; i < values.data().size(); ++i) {
    out.data()[i] = std::clamp(LogDecode(values.data()[i]), 0.0, 1.0);
  }
  return out;
}

}  // namespace umbra
