#include "fixtures.h"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include <unistd.h>

#include "umbra/image_io.h"

namespace fixtures {
namespace {

// Bilinearly interpolated lattice noise with smoothstep weights.
class ValueNoise {
 public:
  ValueNoise(int cells, std::mt19937_64& rng) : cells_(cells) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    lattice_.resize(static_cast<std::size_t>(cells + 1) * (cells + 1));
    for (double& v : lattice_) v = u(rng);
  }
  double operator()(double fx, double fy) const {
    const double x = fx * cells_;
    const double y = fy * cells_;
    const int x0 = std::min(static_cast<int>(x), cells_ - 1);
    const int y0 = std::min(static_cast<int>(y), cells_ - 1);
    const double tx = Smooth(x - x0);
    const double ty = Smooth(y - y0);
    const double a = At(x0, y0) * (1 - tx) + At(x0 + 1, y0) * tx;
    const double b = At(x0, y0 + 1) * (1 - tx) + At(x0 + 1, y0 + 1) * tx;
    return a * (1 - ty) + b * ty;
  }

 private:
  static double Smooth(double t) { return t * t * (3 - 2 * t); }
  double At(int x, int y) const {
    return lattice_[static_cast<std::size_t>(y) * (cells_ + 1) + x];
  }
  int cells_;
  std::vector<double> lattice_;
};

}  // namespace

umbra::RasterImage TexturedImage(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ValueNoise coarse(8, rng);
  const ValueNoise fine(32, rng);
  const ValueNoise finer(64, rng);
  constexpr std::array<double, 3> kColorA{0.60, 0.55, 0.50};
  constexpr std::array<double, 3> kColorB{0.52, 0.50, 0.54};
  umbra::RasterImage img(size, size, 3);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const bool a = ((x / 32) + (y / 32)) % 2 == 0;
      const double fx = static_cast<double>(x) / size;
      const double fy = static_cast<double>(y) / size;
      const double n = 0.08 * coarse(fx, fy) + 0.04 * fine(fx, fy) +
                       0.02 * finer(fx, fy);
      for (int c = 0; c < 3; ++c) {
        img.at(x, y, c) = (a ? kColorA[c] : kColorB[c]) + n;
      }
    }
  }
  return img;
}

umbra::ScaleField RadialScaleField(int size, const RadialShadow& s) {
  const double k = s.width / (2.0 * std::log(9.0));
  umbra::ScaleField f(size, size, 3, 1.0);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double r = std::hypot(x - s.cx, y - s.cy);
      if (r > s.radius + s.snap) continue;
      const double t = 1.0 / (1.0 + std::exp(-(r - s.radius) / k));
      for (int c = 0; c < 3; ++c) {
        f.at(x, y, c) = s.minimum[c] + (1.0 - s.minimum[c]) * t;
      }
    }
  }
  return f;
}

umbra::RasterImage Multiply(const umbra::RasterImage& img,
                            const umbra::ScaleField& scales) {
  umbra::RasterImage out = img;
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] *= scales.data()[i];
  }
  return out;
}

umbra::Mask LitArea(const umbra::ScaleField& scales) {
  umbra::Mask m(scales.width(), scales.height());
  for (std::size_t i = 0; i < scales.pixel_count(); ++i) {
    bool lit = true;
    for (int c = 0; c < scales.channels(); ++c) lit = lit && scales.at(i, c) == 1.0;
    m.set(i, lit);
  }
  return m;
}

umbra::Mask ShadowArea(const umbra::ScaleField& scales) {
  return LitArea(scales).Not();
}

umbra::StrokeSet OracleStrokes(int size, const RadialShadow& s) {
  using umbra::StrokeLabel;
  umbra::StrokeSet set;
  const double arm = 0.5 * s.radius;
  set.strokes.push_back({StrokeLabel::kShadow, 5.0,
                         {{s.cx - arm, s.cy}, {s.cx + arm, s.cy}}});
  set.strokes.push_back({StrokeLabel::kShadow, 5.0,
                         {{s.cx, s.cy - arm}, {s.cx, s.cy + arm}}});
  const double m = 20.0;
  const double e = size - 1 - m;
  set.strokes.push_back({StrokeLabel::kLit, 5.0, {{m, m}, {e, m}, {e, e}}});
  set.strokes.push_back({StrokeLabel::kLit, 5.0, {{e, e}, {m, e}, {m, m}}});
  return set;
}

umbra::RasterImage TwoTone(int width, int height) {
  umbra::RasterImage img(width, height, 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = x < width / 2 ? 0.2 : 0.8;
    }
  }
  return img;
}

std::filesystem::path MakeTempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("umbra-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void WriteCase(const std::filesystem::path& root, const std::string& id,
               const umbra::RasterImage& shadow, const umbra::RasterImage& truth,
               const std::optional<std::string>& strokes_json,
               const std::optional<std::string>& labels_json) {
  const auto dir = root / id;
  std::filesystem::create_directories(dir);
  umbra::SaveImage(shadow, (dir / "shadow.png").string());
  umbra::SaveImage(truth, (dir / "noshadow.png").string());
  if (strokes_json) std::ofstream(dir / "strokes.json") << *strokes_json;
  if (labels_json) std::ofstream(dir / "labels.json") << *labels_json;
}

}  // namespace fixtures
