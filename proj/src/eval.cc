#include "umbra/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "umbra/color.h"
#include "umbra/image_io.h"

namespace umbra {
namespace fs = std::filesystem;
namespace {

constexpr double kGrayGuard = 1e-6;

void RequireSameShape(const RasterImage& a, const RasterImage& b) {
  if (!a.SameShape(b)) {
    throw Error(ErrorCode::kInvalidPair, "images differ in size or channels");
  }
}

struct Stats {
  int n = 0;
  double mean = 0.0;
  double std = 0.0;
};

Stats Summarize(const std::vector<double>& v) {
  Stats s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= s.n;
  double var = 0.0;
  for (double x : v) var += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(var / s.n);
  return s;
}

ReportRow MakeRow(std::string attribute, int degree,
                  const std::vector<const CaseScore*>& members) {
  std::vector<double> all;
  std::vector<double> shadow;
  for (const CaseScore* c : members) {
    all.push_back(c->er_all);
    if (c->er_shadow) shadow.push_back(*c->er_shadow);
  }
  const Stats a = Summarize(all);
  const Stats s = Summarize(shadow);
  return {std::move(attribute), degree, a.n, a.mean, a.std, s.n, s.mean, s.std};
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string DegreeText(const ReportRow& r) {
  return r.degree == 0 ? "-" : std::to_string(r.degree);
}

}  // namespace

bool Labels::AnyStrong() const {
  return std::any_of(degree.begin(), degree.end(),
                     [](int d) { return d == kStrongDegree; });
}

Labels ParseLabels(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedCase, std::string("labels: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kMalformedCase, "labels: not an object");
  Labels labels;
  for (int a = 0; a < kAttributeCount; ++a) {
    const std::string key(kAttributeNames[a]);
    if (!j.contains(key) || !j[key].is_number_integer()) {
      throw Error(ErrorCode::kMalformedCase, "labels: missing integer " + key);
    }
    const int d = j[key].get<int>();
    if (d < 1 || d > 3) {
      throw Error(ErrorCode::kMalformedCase,
                  "labels: " + key + " degree " + std::to_string(d) + " not in 1..3");
    }
    labels.degree[a] = d;
  }
  return labels;
}

Dataset LoadDataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::kIo, "dataset root is not a directory: " + root.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  Dataset ds;
  for (const fs::path& dir : dirs) {
    const std::string id = dir.filename().string();
    DatasetCase c;
    c.id = id;
    c.shadow_path = dir / "shadow.png";
    c.groundtruth_path = dir / "noshadow.png";
    if (!fs::is_regular_file(c.shadow_path)) {
      ds.skipped.push_back({id, "missing shadow.png"});
      continue;
    }
    if (!fs::is_regular_file(c.groundtruth_path)) {
      ds.skipped.push_back({id, "missing noshadow.png"});
      continue;
    }
    if (fs::is_regular_file(dir / "strokes.json")) c.strokes_path = dir / "strokes.json";
    if (fs::is_regular_file(dir / "mask.png")) c.mask_path = dir / "mask.png";
    if (fs::is_regular_file(dir / "labels.json")) {
      try {
        const Bytes raw = ReadFileBytes((dir / "labels.json").string());
        c.labels = ParseLabels(std::string(raw.begin(), raw.end()));
      } catch (const Error& e) {
        ds.skipped.push_back({id, e.what()});
        continue;
      }
    }
    ds.cases.push_back(std::move(c));
  }
  if (ds.cases.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no valid cases under " + root.string());
  }
  return ds;
}

GtQuality GroundTruthQuality(const RasterImage& shadow, const RasterImage& truth) {
  RequireSameShape(shadow, truth);
  const RasterImage gs = shadow.channels() == 3 ? ColorConvert(shadow, ColorSpace::kGrayscale) : shadow;
  const RasterImage gt = truth.channels() == 3 ? ColorConvert(truth, ColorSpace::kGrayscale) : truth;
  std::vector<double> diffs;
  for (std::size_t i = 0; i < shadow.pixel_count(); ++i) {
    const double ratio = gs.at(i, 0) / std::max(gt.at(i, 0), kGrayGuard);
    if (ratio < 1.0) continue;
    for (int c = 0; c < shadow.channels(); ++c) {
      diffs.push_back(shadow.at(i, c) - truth.at(i, c));
    }
  }
  if (diffs.empty()) return {std::numeric_limits<double>::infinity(), false};
  double abs_mean = 0.0;
  for (double d : diffs) abs_mean += std::fabs(d);
  abs_mean /= static_cast<double>(diffs.size());
  return {abs_mean + Summarize(diffs).std, true};
}

bool AcceptsGroundTruth(const GtQuality& q, double threshold) {
  return q.valid && !(q.value > threshold);
}

double Rmse(const RasterImage& a, const RasterImage& b, const Mask* mask) {
  RequireSameShape(a, b);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    if (mask && !mask->at(i)) continue;
    for (int c = 0; c < a.channels(); ++c) {
      const double d = a.at(i, c) - b.at(i, c);
      sum += d * d;
      ++count;
    }
  }
  return count == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(count));
}

ScoreRecord ErrorRatio(const RasterImage& truth, const RasterImage& shadow,
                       const RasterImage& result, const Mask& mask, Scope scope) {
  RequireSameShape(truth, shadow);
  RequireSameShape(truth, result);
  const Mask* scoped = nullptr;
  if (scope == Scope::kShadow) {
    if (mask.width() != truth.width() || mask.height() != truth.height()) {
      throw Error(ErrorCode::kInvalidPair, "mask size differs from the images");
    }
    if (!mask.Any()) throw Error(ErrorCode::kInvalidInput, "shadow scope mask is empty");
    scoped = &mask;
  }
  ScoreRecord r;
  r.scope = scope;
  r.e_o = Rmse(shadow, truth, scoped);
  if (r.e_o == 0.0) {
    throw Error(ErrorCode::kShadowFreeCase, "shadow image equals ground truth");
  }
  r.e_n = Rmse(result, truth, scoped);
  r.e_r = r.e_n / r.e_o;
  return r;
}

Mask ShadowScopeMask(const RasterImage& shadow, const RasterImage& truth) {
  RequireSameShape(shadow, truth);
  const RasterImage gs = shadow.channels() == 3 ? ColorConvert(shadow, ColorSpace::kGrayscale) : shadow;
  const RasterImage gt = truth.channels() == 3 ? ColorConvert(truth, ColorSpace::kGrayscale) : truth;
  Mask m(shadow.width(), shadow.height());
  for (std::size_t i = 0; i < shadow.pixel_count(); ++i) {
    m.set(i, gs.at(i, 0) / std::max(gt.at(i, 0), kGrayGuard) < kShadowScopeRatio);
  }
  return m;
}

bool InCell(const Labels& labels, int attribute, int degree) {
  if (labels.degree[attribute] != degree) return false;
  for (int a = 0; a < kAttributeCount; ++a) {
    if (a != attribute && labels.degree[a] == kStrongDegree) return false;
  }
  return true;
}

std::vector<ReportRow> AttributeReport(const std::vector<CaseScore>& scores) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyDataset, "no scores to report");
  std::vector<ReportRow> rows;
  for (int a = 0; a < kAttributeCount; ++a) {
    for (int d = 1; d <= 3; ++d) {
      std::vector<const CaseScore*> members;
      for (const CaseScore& s : scores) {
        if (s.labels && InCell(*s.labels, a, d)) members.push_back(&s);
      }
      rows.push_back(MakeRow(std::string(kAttributeNames[a]), d, members));
    }
  }
  std::vector<const CaseScore*> other;
  std::vector<const CaseScore*> all;
  for (const CaseScore& s : scores) {
    all.push_back(&s);
    if (s.labels && !s.labels->AnyStrong()) other.push_back(&s);
  }
  rows.push_back(MakeRow("Other", 0, other));
  rows.push_back(MakeRow("Mean", 0, all));
  return rows;
}

std::string ReportCsv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "attribute,degree,n_cases,mean_Er_all,std_Er_all,mean_Er_shadow,std_Er_shadow\n";
  for (const ReportRow& r : rows) {
    out << r.attribute << ',' << DegreeText(r) << ',' << r.n_cases << ',';
    if (r.n_cases == 0) {
      out << "n/a,n/a,";
    } else {
      out << Fixed(r.mean_all) << ',' << Fixed(r.std_all) << ',';
    }
    if (r.n_shadow == 0) {
      out << "n/a,n/a\n";
    } else {
      out << Fixed(r.mean_shadow) << ',' << Fixed(r.std_shadow) << '\n';
    }
  }
  return out.str();
}

std::string ReportTable(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-13s %6s %5s %20s %20s\n", "attribute",
                "degree", "n", "Er all (mean/std)", "Er shadow (mean/std)");
  out << line;
  for (const ReportRow& r : rows) {
    const std::string all = r.n_cases == 0
                                ? "n/a"
                                : Fixed(r.mean_all) + "/" + Fixed(r.std_all);
    const std::string sh = r.n_shadow == 0
                               ? "n/a"
                               : Fixed(r.mean_shadow) + "/" + Fixed(r.std_shadow);
    std::snprintf(line, sizeof(line), "%-13s %6s %5d %20s %20s\n",
                  r.attribute.c_str(), DegreeText(r).c_str(), r.n_cases,
                  all.c_str(), sh.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace umbra
