// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.h"
#include "oracles.h"
#include "umbra/cli.h"
#include "umbra/clustering.h"
#include "umbra/color.h"
#include "umbra/detect.h"
#include "umbra/eval.h"
#include "umbra/image_io.h"
#include "umbra/paramlearn.h"
#include "umbra/params.h"
#include "umbra/penumbra.h"
#include "umbra/pipeline.h"
#include "umbra/relight.h"
#include "umbra/service.h"
#include "umbra/strokes.h"

using namespace umbra;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Collects failed sub-checks with a short reason each.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    failed_ += ok ? 0 : 1;
  }
  void Note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return failed_ == 0; }
  std::string Summary() const {
    std::string s = std::to_string(count_ - failed_) + "/" + std::to_string(count_) + " checks";
    for (const auto& n : notes_) s += "; " + n;
    for (const auto& f : failures_) s += "; failed: " + f;
    return s;
  }

 private:
  int count_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string Fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Scene {
  int size;
  fixtures::RadialShadow shadow;
  RasterImage clean;
  ScaleField scales;
  RasterImage shaded;
  StrokeSet strokes;

  Scene(int size_, fixtures::RadialShadow s, std::uint64_t seed)
      : size(size_),
        shadow(s),
        clean(fixtures::TexturedImage(size_, seed)),
        scales(fixtures::RadialScaleField(size_, s)),
        shaded(fixtures::Multiply(clean, scales)),
        strokes(fixtures::OracleStrokes(size_, s)) {}
};

Scene GrayScene() { return Scene(512, {256, 256, 140}, 1); }
Scene ColoredScene() {
  fixtures::RadialShadow s{256, 256, 140};
  s.minimum = {0.4, 0.5, 0.6};
  return Scene(512, s, 2);
}
Scene SmallScene() { return Scene(128, {64, 64, 36}, 9); }
Scene OffCentreScene() { return Scene(256, {110, 140, 60}, 5); }

// Round trip on the 512 px fixtures, timed per removal.
void SyntheticRoundTrip(Checker& c) {
  struct Case {
    const char* name;
    Scene scene;
    double rmse_limit;
  };
  for (Case k : {Case{"gray", GrayScene(), 0.03}, Case{"colored", ColoredScene(), 0.05}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const RemovalResult r = RemoveShadow(k.scene.shaded, k.scene.strokes, ParamVector{});
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const Mask area = fixtures::ShadowArea(k.scene.scales);
    const double rmse = Rmse(r.result, k.scene.clean, &area);
    const double er =
        ErrorRatio(k.scene.clean, k.scene.shaded, r.result, Mask(512, 512), Scope::kAll).e_r;
    c.Note(std::string(k.name) + Fmt(" rmse=%.4f", rmse) + Fmt(" E_r=%.4f", er) +
           Fmt(" %.1fs", secs));
    c.Expect(rmse < k.rmse_limit, std::string(k.name) + " shadow RMSE");
    if (std::string(k.name) == "gray") c.Expect(er < 0.15, "gray all-pixel E_r");
    c.Expect(secs < 60.0, std::string(k.name) + " runtime");
  }
}

void IlluminationPreserved(Checker& c) {
  std::vector<std::pair<std::string, Scene>> scenes;
  scenes.emplace_back("gray512", GrayScene());
  scenes.emplace_back("colored512", ColoredScene());
  scenes.emplace_back("radial128", SmallScene());
  scenes.emplace_back("offcentre256", OffCentreScene());
  for (const auto& [name, s] : scenes) {
    for (bool cc : {true, false}) {
      const RemovalResult r = RemoveShadow(s.shaded, s.strokes, ParamVector{}, {cc});
      const Mask lit = fixtures::LitArea(s.scales);
      std::size_t changed = 0;
      for (std::size_t i = 0; i < lit.pixel_count(); ++i) {
        if (!lit.at(i)) continue;
        for (int ch = 0; ch < 3; ++ch) changed += r.result.at(i, ch) != s.shaded.at(i, ch);
      }
      c.Expect(changed == 0, name + (cc ? "" : " raw") + " changed " + std::to_string(changed));
    }
  }
}

RasterImage Gray2x2(double a, double b, double cc, double d) {
  RasterImage img(2, 2, 1);
  img.at(0, 0, 0) = a;
  img.at(1, 0, 0) = b;
  img.at(0, 1, 0) = cc;
  img.at(1, 1, 0) = d;
  return img;
}

void MetricExactness(Checker& c) {
  const Scene s = SmallScene();
  const Mask scope = ShadowScopeMask(s.shaded, s.clean);
  for (Scope sc : {Scope::kAll, Scope::kShadow}) {
    c.Expect(ErrorRatio(s.clean, s.shaded, s.clean, scope, sc).e_r == 0.0, "E_r truth");
    c.Expect(ErrorRatio(s.clean, s.shaded, s.shaded, scope, sc).e_r == 1.0, "E_r shadow");
  }
  const double hand = ErrorRatio(Gray2x2(1, 1, 1, 1), Gray2x2(0.5, 1, 1, 1),
                                 Gray2x2(0.75, 1, 1, 1), Mask(2, 2), Scope::kAll)
                          .e_r;
  c.Expect(std::abs(hand - 0.5) <= 1e-12, "2x2 hand case");

  const RasterImage img = fixtures::TexturedImage(64, 3);
  c.Expect(GroundTruthQuality(img, img).value == 0.0, "Q_d(I,I)");
  RasterImage lifted = img;
  for (double& v : lifted.data()) v += 0.1;
  const GtQuality q = GroundTruthQuality(lifted, img);
  c.Expect(std::abs(q.value - 0.1) <= 1e-9, "Q_d(I+0.1,I)");
  c.Expect(!AcceptsGroundTruth(q), "0.1 rejected");
  c.Expect(kGtQualityThreshold == 0.05, "threshold 0.05");
  c.Expect(AcceptsGroundTruth({0.05, true}) && !AcceptsGroundTruth({0.0501, true}),
           "boundary at 0.05");
}

void OracleEquivalences(Checker& c) {
  // KNN against the exhaustive classifier.
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const int w = 64, h = 64;
    const RasterImage img = oracles::PaletteImage(w, h, seed);
    std::mt19937_64 rng(seed);
    // Shadow strokes on the left, lit strokes on the right: never overlapping.
    std::uniform_int_distribution<int> left(4, 26), right(37, 59), row(4, 59);
    auto pt = [&](auto& col) { return StrokePoint{double(col(rng)), double(row(rng))}; };
    StrokeSet set;
    set.strokes.push_back({StrokeLabel::kShadow, 2.0 + seed % 3, {pt(left), pt(left)}});
    set.strokes.push_back({StrokeLabel::kLit, 1.0 + seed % 4, {pt(right), pt(right)}});
    const StrokePixels px = RasterizeStrokes(set, w, h);
    const KnnResult got = ClassifyPixels(img, px);
    const KnnResult want = oracles::BruteForceKnn(img, px);
    c.Expect(got.shadow_votes == want.shadow_votes && got.posterior == want.posterior,
             "KNN seed " + std::to_string(seed));
  }

  // DBSCAN and the full outlier filter on at most 30 points.
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::normal_distribution<double> jitter(0.0, 0.05);
    const int n = 12 + static_cast<int>(seed % 19);
    const Point3 a{u(rng), u(rng), u(rng)};
    const Point3 b{a[0] + 0.25, a[1], a[2]};
    std::vector<Point3> pts;
    for (int i = 0; i < n; ++i) {
      const Point3& ctr = (i % 4 == 3) ? b : a;
      if (i % 7 == 6) {
        pts.push_back({u(rng) + 3.0, u(rng), u(rng)});
      } else {
        pts.push_back({ctr[0] + jitter(rng), ctr[1] + jitter(rng), ctr[2] + jitter(rng)});
      }
    }
    c.Expect(Dbscan(pts, 0.2, 3) == oracles::OracleDbscan(pts, 0.2, 3),
             "DBSCAN seed " + std::to_string(seed));
    std::vector<int> want;
    try {
      want = oracles::OracleKept(pts, 0.2, 0.1);
    } catch (...) {
      continue;
    }
    c.Expect(FilterOutlierFeatures(pts, 0.2, 0.1).kept == want,
             "outliers seed " + std::to_string(seed));
    ++compared;
  }
  c.Expect(compared >= 30, "outlier sets compared");

  // Roughness against finite differences.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  RasterImage lin(24, 15, 3);
  for (double& v : lin.data()) v = u(rng);
  PenumbraStrip strip;
  strip.values = ColorConvert(lin, ColorSpace::kLogRGB);
  strip.stretch.assign(24, 0.0);
  strip.center.assign(24, 0.0);
  ScalePyramid p = BuildPyramid(strip);
  ComputeRoughness(p);
  double worst = 0.0;
  for (int l = 0; l < static_cast<int>(p.scales.size()); ++l) {
    for (int j = 0; j < 24; ++j) {
      worst = std::max(worst, std::abs(p.roughness[j][l] - oracles::OracleRoughness(p.scales[l], j)));
    }
  }
  c.Expect(worst < 1e-9, "roughness");

  // Fusion factors against every 0.01 simplex grid point.
  for (std::uint64_t seed : {5u, 6u}) {
    const int size = 24;
    const RasterImage img = oracles::LumaSeparatedImage(size, seed);
    StrokeSet s;
    s.strokes.push_back({StrokeLabel::kShadow, 3.0, {{4, 4}, {4, 20}}});
    s.strokes.push_back({StrokeLabel::kLit, 3.0, {{19, 4}, {19, 20}}});
    const StrokePixels px = RasterizeStrokes(s, size, size);
    const RasterImage ycc = ColorConvert(img, ColorSpace::kYCbCr);
    const FusionObjective objective(ycc, px);
    double energy = 0.0;
    OptimizeFusionFactors(objective, &energy);
    bool beaten = false;
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; i + j <= 100; ++j) {
        const std::array<double, 3> g{i / 100.0, j / 100.0, (100 - i - j) / 100.0};
        beaten |= oracles::DirectFusionEnergy(ycc, px, g) < energy - 1e-9;
      }
    }
    c.Expect(!beaten, "fusion grid seed " + std::to_string(seed));
  }
}

void AlignmentRecovery(Checker& c) {
  const int n = 41;
  const double limit = n / 8.0;
  const std::vector<double> ref = oracles::SigmoidColumn(n, 3.0);
  std::vector<std::pair<double, double>> shifts;
  for (double s : {-limit, -2.5, 0.0, 2.5, limit}) {
    for (double k : {-limit, -3.0, 0.0, 1.5, limit}) shifts.push_back({s, k});
  }
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-limit, limit);
  for (int i = 0; i < 25; ++i) shifts.push_back({u(rng), u(rng)});
  double worst = 0.0;
  for (const auto& [s, k] : shifts) {
    const AlignmentFit fit = FitAlignment(oracles::Misaligned(n, 3.0, s, k), ref);
    worst = std::max({worst, std::abs(fit.stretch - s), std::abs(fit.center - k)});
  }
  c.Note(Fmt("worst shift error %.3f", worst));
  c.Expect(worst <= 0.5, "shift recovery");

  std::vector<double> ramp(n);
  for (int r = 0; r < n; ++r) ramp[r] = 0.1 + 0.02 * r;
  std::vector<double> noise(n);
  for (double& v : noise) v = u(rng);
  double rt_worst = 0.0;
  for (int i = 0; i < 25; ++i) {
    const double s = u(rng), k = u(rng);
    const auto rt = AlignColumn(UnalignColumn(ramp, s, k), s, k);
    for (int r = 12; r < n - 12; ++r) rt_worst = std::max(rt_worst, std::abs(rt[r] - ramp[r]));
    const double ik = std::round(k);
    const auto it = AlignColumn(UnalignColumn(noise, 0.0, ik), 0.0, ik);
    for (int r = 6; r < n - 6; ++r) rt_worst = std::max(rt_worst, std::abs(it[r] - noise[r]));
  }
  c.Expect(rt_worst <= 1e-6, "round trip");
}

void ParameterLearning(Checker& c) {
  const ParamVector target{20, 7, 0.6, 0.3, 5.0, 0.75};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    LearnOptions opt;
    opt.generations = 50;
    opt.seed = seed;
    const LearnResult r = LearnParams(PlantedObjective(target), opt);
    const Genome got = ToGenome(r.best);
    const Genome want = ToGenome(target);
    for (int k = 0; k < kGeneCount; ++k) {
      const GeneBounds& b = ParamBounds()[k];
      c.Expect(std::abs(got[k] - want[k]) <= 0.05 * (b.hi - b.lo),
               "seed " + std::to_string(seed) + " gene " + std::to_string(k));
    }
    c.Expect(r.trace.size() <= 50, "generation budget");
  }
  const ParamVector d;
  c.Expect(d.h1 == 14 && d.h2 == 10 && d.h3 == 0.1124 && d.h4 == 0.0333 && d.h5 == 8.5195 &&
               d.h6 == 0.2228,
           "shipped defaults");
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Uploads, strokes and removes through a live server; returns result bytes.
std::string ServiceResult(const std::string& png, const std::string& strokes,
                          const std::string& options) {
  SessionService service(ServiceConfig{});
  httplib::Server http;
  MountRoutes(http, service);
  const int port = http.bind_to_any_port("127.0.0.1");
  std::thread t([&] { http.listen_after_bind(); });
  http.wait_until_ready();
  httplib::Client cl("127.0.0.1", port);
  cl.set_read_timeout(300, 0);
  std::string out;
  auto created = cl.Post("/sessions", png, "image/png");
  if (created && created->status == 201) {
    const std::string id = json::parse(created->body).at("id");
    auto s = cl.Post("/sessions/" + id + "/strokes", strokes, "application/json");
    auto r = cl.Post("/sessions/" + id + "/removal", options, "application/json");
    if (s && s->status == 200 && r && r->status == 200) {
      auto res = cl.Get("/sessions/" + id + "/artifacts/result");
      if (res && res->status == 200) out = res->body;
    }
  }
  http.stop();
  t.join();
  return out;
}

void Determinism(Checker& c) {
  const fs::path dir = fixtures::MakeTempDir("acceptance");
  std::ostringstream sink;
  for (const auto& [name, scene] :
       {std::pair{"radial128", SmallScene()}, std::pair{"offcentre256", OffCentreScene()}}) {
    const Bytes png = EncodePng(scene.shaded);
    const std::string png_s(png.begin(), png.end());
    const std::string strokes = StrokesToJson(scene.strokes);
    WriteFileBytes((dir / "in.png").string(), png);
    std::ofstream(dir / "s.json") << strokes;
    for (bool cc : {true, false}) {
      std::vector<std::string> args{"remove", "--image", (dir / "in.png").string(), "--strokes",
                                    (dir / "s.json").string(), "--out",
                                    (dir / "a.png").string()};
      if (!cc) args.push_back("--no-color-correct");
      const int a = RunCli(args, sink, sink);
      args[6] = (dir / "b.png").string();
      const int b = RunCli(args, sink, sink);
      const std::string tag = std::string(name) + (cc ? "" : " raw");
      c.Expect(a == kExitOk && b == kExitOk, tag + " cli exit");
      const std::string cli_a = Slurp(dir / "a.png");
      c.Expect(!cli_a.empty() && cli_a == Slurp(dir / "b.png"), tag + " cli reruns");
      const std::string options = cc ? "{}" : R"({"no_color_correct":true})";
      const std::string svc_a = ServiceResult(png_s, strokes, options);
      const std::string svc_b = ServiceResult(png_s, strokes, options);
      c.Expect(svc_a == svc_b, tag + " service reruns");
      c.Expect(svc_a == cli_a, tag + " cli equals service");
    }
  }
  std::ostringstream l1, l2;
  RunCli({"learn", "--selftest", "--seed", "11", "--budget", "10"}, l1, sink);
  RunCli({"learn", "--selftest", "--seed", "11", "--budget", "10"}, l2, sink);
  c.Expect(!l1.str().empty() && l1.str() == l2.str(), "learn with a fixed seed");
  fs::remove_all(dir);
}

void PlacementRobustness(Checker& c) {
  const int w = 96, h = 64;
  const RasterImage img = fixtures::TwoTone(w, h);
  std::mt19937_64 rng(2024);
  std::optional<Mask> first;
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_real_distribution<double> radius(1.0, 4.0);
    const double rs = radius(rng), rl = radius(rng);
    std::uniform_real_distribution<double> sx(rs, w / 2 - 1 - rs), sy(rs, h - 1 - rs);
    std::uniform_real_distribution<double> lx(w / 2 + rl, w - 1 - rl), ly(rl, h - 1 - rl);
    std::uniform_int_distribution<int> count(1, 4);
    StrokeSet s;
    Stroke shadow{StrokeLabel::kShadow, rs, {}};
    for (int i = count(rng); i > 0; --i) shadow.points.push_back({sx(rng), sy(rng)});
    Stroke lit{StrokeLabel::kLit, rl, {}};
    for (int i = count(rng); i > 0; --i) lit.points.push_back({lx(rng), ly(rng)});
    s.strokes = {shadow, lit};
    const Mask m = DetectMask(img, s, ParamVector{}.h1);
    if (!first) first = m;
    c.Expect(m == *first, "placement " + std::to_string(trial));
  }
  bool dark_half = first.has_value();
  for (int y = 0; y < h && dark_half; ++y) {
    for (int x = 0; x < w; ++x) dark_half &= first->at(x, y) == (x < w / 2);
  }
  c.Expect(dark_half, "mask is the dark half");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Checker&)> run;
  };
  const std::vector<Criterion> criteria{
      {"synthetic round trip", SyntheticRoundTrip},
      {"illumination preservation", IlluminationPreserved},
      {"metric exactness", MetricExactness},
      {"oracle equivalences", OracleEquivalences},
      {"alignment recovery", AlignmentRecovery},
      {"parameter learning", ParameterLearning},
      {"determinism", Determinism},
      {"robustness to placement", PlacementRobustness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker c;
    try {
      criteria[i].run(c);
    } catch (const std::exception& e) {
      c.Expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %zu %s: %s\n", c.ok() ? "PASS" : "FAIL", i + 1, criteria[i].name,
                c.Summary().c_str());
    std::fflush(stdout);
    failed += c.ok() ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
