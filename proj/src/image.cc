#include "umbra/image.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace umbra {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kInsufficientStrokes: return "insufficient-strokes";
    case ErrorCode::kConflictingStrokes: return "conflicting-strokes";
    case ErrorCode::kDegenerateFusion: return "degenerate-fusion";
    case ErrorCode::kNoShadow: return "no-shadow";
    case ErrorCode::kDegenerateSample: return "degenerate-sample";
    case ErrorCode::kNoValidSamples: return "no-valid-samples";
    case ErrorCode::kNoScales: return "no-scales";
    case ErrorCode::kInvalidPair: return "invalid-pair";
    case ErrorCode::kShadowFreeCase: return "shadow-free-case";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kMalformedCase: return "malformed-case";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

RasterImage::RasterImage(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0 || channels < 1) {
    throw Error(ErrorCode::kInvalidInput, "bad image dimensions");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

RasterImage::RasterImage(int width, int height, int channels,
                         std::vector<double> data)
    : width_(width), height_(height), channels_(channels),
      data_(std::move(data)) {
  if (width < 0 || height < 0 || channels < 1 ||
      data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw Error(ErrorCode::kInvalidInput,
                "image data length does not match dimensions");
  }
}

RasterImage RasterImage::Channel(int c) const {
  RasterImage out(width_, height_, 1);
  for (std::size_t i = 0; i < pixel_count(); ++i) out.at(i, 0) = at(i, c);
  return out;
}

void RasterImage::SetChannel(int c, const RasterImage& plane) {
  for (std::size_t i = 0; i < pixel_count(); ++i) at(i, c) = plane.at(i, 0);
}

double RasterImage::Sample(double x, double y, int c) const {
  x = std::clamp(x, 0.0, width_ - 1.0);
  y = std::clamp(y, 0.0, height_ - 1.0);
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = at(x0, y0, c) * (1 - fx) + at(x1, y0, c) * fx;
  const double bottom = at(x0, y1, c) * (1 - fx) + at(x1, y1, c) * fx;
  return top * (1 - fy) + bottom * fy;
}

void RasterImage::Clamp(double lo, double hi) {
  for (double& v : data_) v = std::clamp(v, lo, hi);
}

bool RasterImage::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

double Vec2::Norm() const { return std::hypot(x, y); }

Vec2 VectorField::Sample(double x, double y) const {
  x = std::clamp(x, 0.0, width_ - 1.0);
  y = std::clamp(y, 0.0, height_ - 1.0);
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const Vec2 top = at(x0, y0) * (1 - fx) + at(x1, y0) * fx;
  const Vec2 bottom = at(x0, y1) * (1 - fx) + at(x1, y1) * fx;
  return top * (1 - fy) + bottom * fy;
}

std::size_t Mask::Count() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](auto v) { return v != 0; }));
}

Mask Mask::Not() const {
  Mask out(width_, height_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = !data_[i];
  return out;
}

Mask Mask::And(const Mask& other) const {
  Mask out(width_, height_);
  for (std::size_t i = 0; i < data_.size(); ++i)
    out.data_[i] = data_[i] && other.data_[i];
  return out;
}

Mask Mask::Or(const Mask& other) const {
  Mask out(width_, height_);
  for (std::size_t i = 0; i < data_.size(); ++i)
    out.data_[i] = data_[i] || other.data_[i];
  return out;
}

Mask Mask::Minus(const Mask& other) const {
  Mask out(width_, height_);
  for (std::size_t i = 0; i < data_.size(); ++i)
    out.data_[i] = data_[i] && !other.data_[i];
  return out;
}

int OddAtLeast(int size) { return size % 2 == 0 ? size + 1 : size; }

}  // namespace umbra
