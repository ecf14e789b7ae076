#include "umbra/cli.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "umbra/eval.h"
#include "umbra/image_io.h"
#include "umbra/paramlearn.h"
#include "umbra/penumbra.h"
#include "umbra/pipeline.h"
#include "umbra/strokes.h"

namespace umbra {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string image;
  std::string strokes;
  std::string params;
  std::string out;
  std::string dataset;
  std::string report;
  std::string results;
  double threshold = kGtQualityThreshold;
  int budget = 50;
  std::uint64_t seed = 1;
  bool no_color_correct = false;
  bool dump_intermediates = false;
  bool run_pipeline = false;
  bool selftest = false;
};

void RequireFile(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorCode::kInvalidInput, std::string("--") + what + " is required");
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::kIo, "cannot read " + path);
}

ParamVector ParamsFrom(const Flags& f) {
  if (f.params.empty()) return ParamVector{};
  RequireFile(f.params, "params");
  return LoadParams(f.params);
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path);
}

std::string Fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Unknown pixels of the sparse field are written as 0.
RasterImage SparseImage(const SparseScaleField& s) {
  RasterImage img = s.values;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (s.known.at(i)) continue;
    for (int c = 0; c < img.channels(); ++c) img.at(i, c) = 0.0;
  }
  return img;
}

int CmdRemove(const Flags& f, std::ostream& out) {
  RequireFile(f.image, "image");
  RequireFile(f.strokes, "strokes");
  if (f.out.empty()) throw Error(ErrorCode::kInvalidInput, "--out is required");
  const ParamVector params = ParamsFrom(f);
  const RasterImage img = LoadImage(f.image);
  const StrokeSet strokes = LoadStrokes(f.strokes);
  RemovalOptions options;
  options.color_correct = !f.no_color_correct;
  const RemovalResult r = RemoveShadow(img, strokes, params, options);
  WriteFileBytes(f.out, EncodePng(r.result));
  if (f.dump_intermediates) {
    WriteFileBytes(IntermediatePath(f.out, "mask"), MaskToPngBytes(r.mask));
    WriteFileBytes(IntermediatePath(f.out, "fusion"), EncodePng(r.fusion));
    if (!r.strip.values.empty()) {
      WriteFileBytes(IntermediatePath(f.out, "strip"), EncodePng(StripToImage(r.strip.values)));
      WriteFileBytes(IntermediatePath(f.out, "aligned"),
                     EncodePng(StripToImage(r.aligned.values)));
    }
    WriteFileBytes(IntermediatePath(f.out, "sparse"), EncodePng16(SparseImage(r.sparse)));
    WriteFileBytes(IntermediatePath(f.out, "scales"), EncodePng16(r.dense));
  }
  out << "wrote " << f.out << " (" << r.mask.Count() << " shadow pixels)\n";
  return kExitOk;
}

int CmdEval(const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.dataset.empty()) throw Error(ErrorCode::kInvalidInput, "--dataset is required");
  if (f.run_pipeline == !f.results.empty()) {
    throw Error(ErrorCode::kInvalidInput, "give exactly one of --results or --run-pipeline");
  }
  const Dataset ds = LoadDataset(f.dataset);
  for (const SkippedCase& s : ds.skipped) err << "skipped " << s.id << ": " << s.reason << "\n";
  const ParamVector params = ParamsFrom(f);
  RemovalOptions options;
  options.color_correct = !f.no_color_correct;

  std::vector<CaseScore> scores;
  std::ostringstream cases;
  cases << "id,E_o,E_n,E_r_all,E_r_shadow\n";
  for (const DatasetCase& c : ds.cases) {
    const RasterImage shadow = EnsureRgb(LoadImage(c.shadow_path.string()));
    const RasterImage truth = EnsureRgb(LoadImage(c.groundtruth_path.string()));
    RasterImage result;
    try {
      if (f.run_pipeline) {
        if (!c.strokes_path) {
          err << "skipped " << c.id << ": no strokes.json\n";
          continue;
        }
        result = RemoveShadow(shadow, LoadStrokes(c.strokes_path->string()), params,
                              options).result;
      } else {
        const fs::path p = fs::path(f.results) / (c.id + ".png");
        if (!fs::is_regular_file(p)) {
          err << "skipped " << c.id << ": no result at " << p.string() << "\n";
          continue;
        }
        result = EnsureRgb(LoadImage(p.string()));
      }
      const ScoreRecord all = ErrorRatio(truth, shadow, result, Mask(), Scope::kAll);
      CaseScore score{c.id, c.labels, all.e_r, std::nullopt};
      const Mask scope = c.mask_path ? LoadMask(c.mask_path->string())
                                     : ShadowScopeMask(shadow, truth);
      try {
        score.er_shadow = ErrorRatio(truth, shadow, result, scope, Scope::kShadow).e_r;
      } catch (const Error& e) {
        if (e.IsIo()) throw;
        err << "note " << c.id << ": no shadow-scope score (" << e.what() << ")\n";
      }
      cases << c.id << "," << Fixed(all.e_o) << "," << Fixed(all.e_n) << ","
            << Fixed(all.e_r) << ","
            << (score.er_shadow ? Fixed(*score.er_shadow) : std::string("n/a")) << "\n";
      scores.push_back(std::move(score));
    } catch (const Error& e) {
      if (e.IsIo()) throw;
      err << "skipped " << c.id << ": " << e.what() << "\n";
    }
  }
  if (scores.empty()) throw Error(ErrorCode::kEmptyDataset, "no case could be scored");
  const std::vector<ReportRow> rows = AttributeReport(scores);
  out << ReportTable(rows);
  if (!f.report.empty()) {
    WriteText(f.report, ReportCsv(rows));
    const fs::path rp(f.report);
    WriteText((rp.parent_path() / (rp.stem().string() + ".cases.csv")).string(), cases.str());
  }
  return kExitOk;
}

int CmdGtCheck(const Flags& f, std::ostream& out) {
  if (f.dataset.empty()) throw Error(ErrorCode::kInvalidInput, "--dataset is required");
  if (!(f.threshold >= 0.0) || !std::isfinite(f.threshold)) {
    throw Error(ErrorCode::kInvalidParameter, "--threshold must be a finite value >= 0");
  }
  const Dataset ds = LoadDataset(f.dataset);
  double sum = 0.0;
  int valid = 0;
  int accepted = 0;
  for (const DatasetCase& c : ds.cases) {
    const GtQuality q = GroundTruthQuality(EnsureRgb(LoadImage(c.shadow_path.string())),
                                           EnsureRgb(LoadImage(c.groundtruth_path.string())));
    const bool ok = AcceptsGroundTruth(q, f.threshold);
    accepted += ok ? 1 : 0;
    if (q.valid) {
      sum += q.value;
      ++valid;
    }
    out << c.id << " Q_d=" << (q.valid ? Fixed(q.value) : std::string("inf")) << " "
        << (ok ? "accepted" : "rejected") << "\n";
  }
  out << "cases " << ds.cases.size() << " accepted " << accepted << " rejected "
      << ds.cases.size() - accepted << " mean_Q_d "
      << (valid ? Fixed(sum / valid) : std::string("n/a")) << "\n";
  return kExitOk;
}

int CmdLearn(const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.budget < 1) throw Error(ErrorCode::kInvalidParameter, "invalid budget: must be >= 1");
  LearnOptions options;
  options.generations = f.budget;
  options.seed = f.seed;
  options.initial.push_back(ParamVector{});
  FitnessFn fitness;
  std::vector<TrainingCase> cases;
  ObjectiveSpec objective;
  if (f.selftest) {
    fitness = PlantedObjective(kSelftestTarget);
  } else {
    if (f.dataset.empty()) throw Error(ErrorCode::kInvalidInput, "--dataset is required");
    const Dataset ds = LoadDataset(f.dataset);
    std::vector<SkippedCase> skipped = ds.skipped;
    cases = LoadTrainingCases(ds, &skipped);
    for (const SkippedCase& s : skipped) err << "skipped " << s.id << ": " << s.reason << "\n";
    if (cases.empty()) {
      throw Error(ErrorCode::kInsufficientStrokes, "no case in the dataset has strokes");
    }
    if (!f.params.empty()) options.initial.push_back(ParamsFrom(f));
    objective = BuildObjective(cases, f.seed);
    fitness = [&](const ParamVector& h) {
      return EvaluateObjective(h, cases, objective, RunPipeline);
    };
  }
  const LearnResult r = LearnParams(fitness, options);
  for (std::size_t g = 0; g < r.trace.size(); ++g) {
    out << "generation " << g + 1 << " best " << Fixed(r.trace[g]) << "\n";
  }
  const std::string json = ParamsToJson(r.best);
  if (f.out.empty()) {
    out << json << "\n";
  } else {
    SaveParams(r.best, f.out);
    out << "wrote " << f.out << "\n";
  }
  return kExitOk;
}

}  // namespace

std::string IntermediatePath(const std::string& out_path, const std::string& kind) {
  const fs::path p(out_path);
  return (p.parent_path() / (p.stem().string() + "." + kind + ".png")).string();
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interactive shadow removal", "umbra"};
  app.require_subcommand(1, 1);
  Flags f;
  auto* remove = app.add_subcommand("remove", "remove the shadow marked by strokes");
  remove->add_option("--image", f.image, "input image (PNG or JPEG)");
  remove->add_option("--strokes", f.strokes, "stroke JSON");
  remove->add_option("--params", f.params, "parameter JSON");
  remove->add_option("--out", f.out, "output PNG");
  remove->add_flag("--no-color-correct", f.no_color_correct, "skip color correction");
  remove->add_flag("--dump-intermediates", f.dump_intermediates,
                   "write mask, fusion, strip and scale images next to --out");

  auto* eval = app.add_subcommand("eval", "score results against ground truth");
  eval->add_option("--dataset", f.dataset, "dataset root");
  eval->add_option("--results", f.results, "directory of <id>.png results");
  eval->add_flag("--run-pipeline", f.run_pipeline, "run removal with each case's strokes");
  eval->add_option("--report", f.report, "attribute report CSV");
  eval->add_option("--params", f.params, "parameter JSON");
  eval->add_flag("--no-color-correct", f.no_color_correct, "skip color correction");

  auto* gt = app.add_subcommand("gt-check", "gate ground-truth quality");
  gt->add_option("--dataset", f.dataset, "dataset root");
  gt->add_option("--threshold", f.threshold, "rejection threshold");

  auto* learn = app.add_subcommand("learn", "learn pipeline parameters");
  learn->add_option("--dataset", f.dataset, "dataset root");
  learn->add_option("--budget", f.budget, "generations");
  learn->add_option("--seed", f.seed, "random seed");
  learn->add_option("--params", f.params, "extra initial individual");
  learn->add_option("--out", f.out, "learned parameter JSON");
  learn->add_flag("--selftest", f.selftest, "optimize a synthetic objective");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (remove->parsed()) return CmdRemove(f, out);
    if (eval->parsed()) return CmdEval(f, out, err);
    if (gt->parsed()) return CmdGtCheck(f, out);
    return CmdLearn(f, out, err);
  } catch (const Error& e) {
    err << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return e.IsIo() ? kExitIo : kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace umbra
