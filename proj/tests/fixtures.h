#ifndef UMBRA_TESTS_FIXTURES_H_
#define UMBRA_TESTS_FIXTURES_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "umbra/image.h"
#include "umbra/strokes.h"

namespace fixtures {

// Two-color checkerboard (32 px cells, about 10% contrast) with smooth
// multi-octave value noise; every sample lies in about [0.35, 0.75].
umbra::RasterImage TexturedImage(int size, std::uint64_t seed);

struct RadialShadow {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;  // logistic midpoint
  std::array<double, 3> minimum{0.4, 0.4, 0.4};
  double width = 12.0;  // 10%-90% rise, pixels
  double snap = 48.0;   // scale is exactly 1 beyond radius + snap
};

umbra::ScaleField RadialScaleField(int size, const RadialShadow& shadow);
umbra::RasterImage Multiply(const umbra::RasterImage& img,
                            const umbra::ScaleField& scales);
// Pixels whose true scale is exactly 1 in every channel.
umbra::Mask LitArea(const umbra::ScaleField& scales);
// Pixels with some channel scale below 1.
umbra::Mask ShadowArea(const umbra::ScaleField& scales);

// Shadow stroke through the shadow core, lit strokes near the corners.
umbra::StrokeSet OracleStrokes(int size, const RadialShadow& shadow);

// Left half dark (0.2), right half bright (0.8), no noise.
umbra::RasterImage TwoTone(int width, int height);

// Fresh empty directory under the system temp dir.
std::filesystem::path MakeTempDir(const std::string& tag);

// Writes <root>/<id>/shadow.png and noshadow.png, plus strokes.json and
// labels.json when given.
void WriteCase(const std::filesystem::path& root, const std::string& id,
               const umbra::RasterImage& shadow, const umbra::RasterImage& truth,
               const std::optional<std::string>& strokes_json = std::nullopt,
               const std::optional<std::string>& labels_json = std::nullopt);

}  // namespace fixtures

#endif  // UMBRA_TESTS_FIXTURES_H_
