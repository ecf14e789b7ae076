#include "umbra/color.h"

#include <cmath>

#include <Eigen/Dense>

namespace umbra {
namespace {

const double kLogLow = std::log(kLogEpsilon);
const double kLogRange = std::log(1.0 + kLogEpsilon) - std::log(kLogEpsilon);

void RequireRgb(const RasterImage& img, const char* what) {
  if (img.channels() != 3) {
    throw Error(ErrorCode::kInvalidInput,
                std::string(what) + " requires a 3-channel image");
  }
}

}  // namespace

double Luma(double r, double g, double b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

double LogEncode(double linear) {
  return (std::log(linear + kLogEpsilon) - kLogLow) / kLogRange;
}

double LogDecode(double encoded) {
  return std::exp(encoded * kLogRange + kLogLow) - kLogEpsilon;
}

RasterImage ColorConvert(const RasterImage& img, ColorSpace target) {
  switch (target) {
    case ColorSpace::kYCbCr: {
      RequireRgb(img, "YCbCr conversion");
      RasterImage out(img.width(), img.height(), 3);
      for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double r = img.at(i, 0), g = img.at(i, 1), b = img.at(i, 2);
        out.at(i, 0) = Luma(r, g, b);
        out.at(i, 1) = 0.5 - 0.168736 * r - 0.331264 * g + 0.5 * b;
        out.at(i, 2) = 0.5 + 0.5 * r - 0.418688 * g - 0.081312 * b;
      }
      return out;
    }
    case ColorSpace::kGrayscale: {
      if (img.channels() == 1) return img;
      RequireRgb(img, "grayscale conversion");
      RasterImage out(img.width(), img.height(), 1);
      for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        out.at(i, 0) = Luma(img.at(i, 0), img.at(i, 1), img.at(i, 2));
      }
      return out;
    }
    case ColorSpace::kLogRGB: {
      RequireRgb(img, "logRGB conversion");
      RasterImage out(img.width(), img.height(), 3);
      const auto src = img.data();
      auto dst = out.data();
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = LogEncode(src[i]);
      return out;
    }
  }
  throw Error(ErrorCode::kInvalidParameter, "unknown color space");
}

RasterImage YCbCrToRgb(const RasterImage& ycbcr) {
  RequireRgb(ycbcr, "YCbCr inverse");
  Eigen::Matrix3d forward;
  forward << 0.299, 0.587, 0.114,
             -0.168736, -0.331264, 0.5,
             0.5, -0.418688, -0.081312;
  const Eigen::Matrix3d inverse = forward.inverse();
  RasterImage out(ycbcr.width(), ycbcr.height(), 3);
  for (std::size_t i = 0; i < ycbcr.pixel_count(); ++i) {
    const Eigen::Vector3d v(ycbcr.at(i, 0), ycbcr.at(i, 1) - 0.5,
                            ycbcr.at(i, 2) - 0.5);
    const Eigen::Vector3d rgb = inverse * v;
    for (int c = 0; c < 3; ++c) out.at(i, c) = rgb[c];
  }
  return out;
}

}  // namespace umbra
