#ifndef UMBRA_IMAGE_H_
#define UMBRA_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "umbra/error.h"

namespace umbra {

// Multi-channel floating-point image, row-major, interleaved channels.
// Samples are nominally in [0,1]; intermediate results (log features,
// high-pass residuals) may leave that range until clamped.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels, double fill = 0.0);
  RasterImage(int width, int height, int channels, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const { return data_.empty(); }

  double& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  // Linear pixel index, channel offset.
  double& at(std::size_t pixel, int c) { return data_[pixel * channels_ + c]; }
  double at(std::size_t pixel, int c) const {
    return data_[pixel * channels_ + c];
  }

  bool Contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool SameShape(const RasterImage& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }
  bool SameSize(int width, int height) const {
    return width_ == width && height_ == height;
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  // Single channel copy.
  RasterImage Channel(int c) const;
  void SetChannel(int c, const RasterImage& plane);

  // Bilinear sample with edge replication; (x, y) in pixel-center units.
  double Sample(double x, double y, int c = 0) const;

  void Clamp(double lo = 0.0, double hi = 1.0);
  bool AllFinite() const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double Dot(Vec2 o) const { return x * o.x + y * o.y; }
  double Norm() const;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

class VectorField {
 public:
  VectorField() = default;
  VectorField(int width, int height)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height) {}

  int width() const { return width_; }
  int height() const { return height_; }
  Vec2& at(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  Vec2 at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  bool Contains(double x, double y) const {
    return x >= 0.0 && y >= 0.0 && x <= width_ - 1.0 && y <= height_ - 1.0;
  }
  // Bilinear lookup with edge replication.
  Vec2 Sample(double x, double y) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Vec2> data_;
};

// Binary per-pixel mask; true marks shadow unless stated otherwise.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill = false)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return data_.size(); }

  bool at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool v) {
    data_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }
  bool at(std::size_t i) const { return data_[i] != 0; }
  void set(std::size_t i, bool v) { data_[i] = v ? 1 : 0; }
  bool Contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::size_t Count() const;
  bool Any() const { return Count() > 0; }

  Mask Not() const;
  Mask And(const Mask& other) const;
  Mask Or(const Mask& other) const;
  Mask Minus(const Mask& other) const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Per-pixel, per-channel shadow scale. Dense fields hold values in (0,1]
// with exactly 1 in lit areas.
using ScaleField = RasterImage;

// Scale samples known only at some pixels.
struct SparseScaleField {
  ScaleField values;
  Mask known;
};

int OddAtLeast(int size);

}  // namespace umbra

#endif  // UMBRA_IMAGE_H_
