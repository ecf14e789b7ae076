#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fixtures.h"
#include "oracles.h"
#include "umbra/color.h"
#include "umbra/detect.h"
#include "umbra/error.h"
#include "umbra/strokes.h"

using namespace umbra;
using namespace oracles;

namespace {

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::kIo;
}

StrokeSet Pair(StrokePoint shadow, StrokePoint lit, double radius) {
  StrokeSet s;
  s.strokes.push_back({StrokeLabel::kShadow, radius, {shadow}});
  s.strokes.push_back({StrokeLabel::kLit, radius, {lit}});
  return s;
}

}  // namespace

TEST_CASE("stroke JSON round trip and validation") {
  const std::string text =
      R"({"strokes":[{"label":"shadow","radius":6,"points":[[1,2],[3.5,4]]},)"
      R"({"label":"lit","radius":2,"points":[[9,9]]}]})";
  const StrokeSet s = ParseStrokes(text);
  REQUIRE(s.strokes.size() == 2);
  CHECK(s.strokes[0].label == StrokeLabel::kShadow);
  CHECK(s.strokes[0].points[1] == StrokePoint{3.5, 4});
  CHECK(ParseStrokes(StrokesToJson(s)) == s);
  CHECK(CodeOf([] { ParseStrokes("{"); }) == ErrorCode::kInvalidInput);
  CHECK(CodeOf([] { ParseStrokes(R"({"strokes":[{"label":"dark","points":[[0,0]]}]})"); }) ==
        ErrorCode::kInvalidInput);
  CHECK(CodeOf([] { ParseStrokes(R"({"strokes":[{"label":"lit","radius":0.5,"points":[[0,0]]}]})"); }) ==
        ErrorCode::kInvalidInput);
}

TEST_CASE("a one-point stroke rasterizes as a disk") {
  StrokeSet s;
  s.strokes.push_back({StrokeLabel::kShadow, 2.0, {{5, 5}}});
  const Mask m = RasterizeLabel(s, StrokeLabel::kShadow, 11, 11);
  std::size_t expected = 0;
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 11; ++x) {
      const bool in = (x - 5) * (x - 5) + (y - 5) * (y - 5) <= 4;
      expected += in;
      CHECK(m.at(x, y) == in);
    }
  }
  CHECK(expected == 13);
}

TEST_CASE("stroke preconditions") {
  StrokeSet lit_only;
  lit_only.strokes.push_back({StrokeLabel::kLit, 2.0, {{3, 3}}});
  try {
    RasterizeStrokes(lit_only, 10, 10);
    FAIL("expected insufficient strokes");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientStrokes);
    CHECK(std::string(e.what()).find("insufficient strokes") != std::string::npos);
  }
  const StrokeSet overlap = Pair({4, 4}, {5, 4}, 2.0);
  CHECK(CodeOf([&] { RasterizeStrokes(overlap, 10, 10); }) == ErrorCode::kConflictingStrokes);
  CHECK(!StrokeConflicts(overlap, 10, 10).empty());
  const StrokeSet outside = Pair({4, 4}, {12, 4}, 1.0);
  CHECK(CodeOf([&] { RasterizeStrokes(outside, 10, 10); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("KNN classification equals the brute-force classifier") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const RasterImage img = PaletteImage(64, 64, seed);
    StrokeSet s;
    s.strokes.push_back({StrokeLabel::kShadow, 3.0, {{5, 5}, {30, 12}}});
    s.strokes.push_back({StrokeLabel::kShadow, 2.0, {{10, 50}}});
    s.strokes.push_back({StrokeLabel::kLit, 3.0, {{40, 40}, {60, 60}}});
    const StrokePixels px = RasterizeStrokes(s, 64, 64);
    const KnnResult got = ClassifyPixels(img, px);
    const KnnResult want = BruteForceKnn(img, px);
    CHECK(got.posterior == want.posterior);
    CHECK(got.shadow_votes == want.shadow_votes);
  }
}

TEST_CASE("uniform image: ties resolve to the lowest training pixels") {
  const RasterImage img(20, 20, 3, 0.5);
  const StrokePixels px = RasterizeStrokes(Pair({3, 3}, {15, 15}, 1.0), 20, 20);
  const KnnResult got = ClassifyPixels(img, px);
  const KnnResult want = BruteForceKnn(img, px);
  CHECK(got.posterior == want.posterior);
  CHECK(got.shadow_votes == want.shadow_votes);
  // The three lowest training indices all belong to the shadow stroke.
  CHECK(got.shadow_votes.Count() == 400);
}

TEST_CASE("unanimous shadow neighbours classify a training pixel as shadow") {
  const RasterImage img = fixtures::TwoTone(16, 8);
  const StrokePixels px = RasterizeStrokes(Pair({3, 4}, {12, 4}, 1.5), 16, 8);
  const KnnResult knn = ClassifyPixels(img, px);
  CHECK(knn.posterior.at(3, 4) == 1.0);
  CHECK(knn.shadow_votes.at(3, 4));
}

TEST_CASE("two-tone image yields exactly the dark half") {
  const RasterImage img = fixtures::TwoTone(64, 48);
  const Mask m = DetectMask(img, Pair({10, 20}, {50, 30}, 3.0), 14);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) CHECK(m.at(x, y) == (x < 32));
  }
}

TEST_CASE("posterior stays in the unit interval") {
  const RasterImage img = PaletteImage(40, 40, 9);
  const StrokePixels px = RasterizeStrokes(Pair({5, 5}, {30, 30}, 4.0), 40, 40);
  const RasterImage post = DetectPosterior(img, px, 14);
  for (double v : post.data()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("detection ignores stroke order and subdivision") {
  const RasterImage img = PaletteImage(48, 48, 4);
  StrokeSet a;
  a.strokes.push_back({StrokeLabel::kShadow, 2.0, {{4, 4}, {20, 4}}});
  a.strokes.push_back({StrokeLabel::kLit, 2.0, {{30, 40}, {40, 40}}});
  StrokeSet b;
  b.strokes.push_back({StrokeLabel::kLit, 2.0, {{40, 40}, {35, 40}, {30, 40}}});
  b.strokes.push_back({StrokeLabel::kShadow, 2.0, {{20, 4}, {12, 4}, {4, 4}}});
  CHECK(DetectMask(img, a, 14) == DetectMask(img, b, 14));
}

TEST_CASE("fusion factors are simplex-optimal on a luma-separated image") {
  const int size = 24;
  const RasterImage img = LumaSeparatedImage(size, 5);
  StrokeSet s;
  s.strokes.push_back({StrokeLabel::kShadow, 3.0, {{4, 4}, {4, 20}}});
  s.strokes.push_back({StrokeLabel::kLit, 3.0, {{19, 4}, {19, 20}}});
  const StrokePixels px = RasterizeStrokes(s, size, size);
  const RasterImage ycc = ColorConvert(img, ColorSpace::kYCbCr);
  const FusionObjective objective(ycc, px);

  double energy = 0.0;
  const auto a = OptimizeFusionFactors(objective, &energy);
  CHECK(std::abs(a[0] + a[1] + a[2] - 1.0) < 1e-9);
  for (double v : a) CHECK(v >= 0.0);
  CHECK(a[0] > 0.5);
  CHECK(energy <= objective({1.0 / 3, 1.0 / 3, 1.0 / 3}));

  // The moment form agrees with the direct formula, and no 0.01 grid
  // candidate beats the returned factors.
  CHECK(objective({1, 0, 0}) == doctest::Approx(DirectFusionEnergy(ycc, px, {1, 0, 0})).epsilon(1e-9));
  double grid_best = INFINITY;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; i + j <= 100; ++j) {
      const std::array<double, 3> g{i / 100.0, j / 100.0, (100 - i - j) / 100.0};
      grid_best = std::min(grid_best, objective(g));
      CHECK(energy <= DirectFusionEnergy(ycc, px, g) + 1e-9);
    }
  }
  CHECK(energy <= grid_best);

  const FusionResult fr = BuildFusionImage(img, s, 10);
  CHECK(fr.image.channels() == 1);
  CHECK(fr.factors == a);
}

TEST_CASE("zero shadow mean drops the first fusion term") {
  RasterImage ycc(10, 10, 3);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      ycc.at(x, y, 0) = x < 5 ? 0.0 : 0.7 + 0.01 * y;
      ycc.at(x, y, 1) = 0.5 + 0.01 * ((x * 7 + y * 3) % 5);
      ycc.at(x, y, 2) = 0.5;
    }
  }
  StrokeSet s;
  s.strokes.push_back({StrokeLabel::kShadow, 1.0, {{1, 1}, {1, 8}}});
  s.strokes.push_back({StrokeLabel::kLit, 1.0, {{8, 1}, {8, 8}}});
  const StrokePixels px = RasterizeStrokes(s, 10, 10);
  const FusionObjective objective(ycc, px);
  const double direct = DirectFusionEnergy(ycc, px, {1, 0, 0});
  CHECK(objective({1, 0, 0}) == doctest::Approx(direct).epsilon(1e-9));
  CHECK(direct < 1.0);  // only the spread term remains
}

TEST_CASE("identical stroke colors are a degenerate fusion") {
  const RasterImage img(12, 12, 3, 0.4);
  CHECK(CodeOf([&] { BuildFusionImage(img, Pair({2, 2}, {9, 9}, 1.0), 10); }) ==
        ErrorCode::kDegenerateFusion);
}
