#include "umbra/resample.h"

#include <cmath>

#include "umbra/error.h"

namespace umbra {

double InterpolateAt(std::span<const double> values, double pos) {
  const int n = static_cast<int>(values.size());
  if (pos <= 0.0) return values[0];
  if (pos >= n - 1) return values[n - 1];
  const double base = std::floor(pos);
  const int i = static_cast<int>(base);
  const double t = pos - base;
  if (t == 0.0) return values[i];
  return values[i] + t * (values[i + 1] - values[i]);
}

std::vector<double> ResampleColumn(std::span<const double> values,
                                   int target_len) {
  if (values.size() < 2 || target_len < 2) {
    throw Error(ErrorCode::kInvalidInput,
                "resampling needs at least two samples on both sides");
  }
  const int n = static_cast<int>(values.size());
  std::vector<double> out(target_len);
  if (n == target_len) {
    out.assign(values.begin(), values.end());
    return out;
  }
  const double step = static_cast<double>(n - 1) / (target_len - 1);
  for (int i = 0; i < target_len; ++i) out[i] = InterpolateAt(values, i * step);
  out.front() = values.front();
  out.back() = values.back();
  return out;
}

}  // namespace umbra
