#ifndef UMBRA_EVAL_H_
#define UMBRA_EVAL_H_

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "umbra/image.h"

namespace umbra {

inline constexpr double kGtQualityThreshold = 0.05;
// Pixels whose gray shadow/ground-truth ratio is below this form the
// shadow scope when a case ships no mask.
inline constexpr double kShadowScopeRatio = 0.95;

inline constexpr int kAttributeCount = 4;
inline constexpr std::array<std::string_view, kAttributeCount> kAttributeNames = {
    "texture", "softness", "brokenness", "colorfulness"};
inline constexpr int kStrongDegree = 3;

struct Labels {
  std::array<int, kAttributeCount> degree{1, 1, 1, 1};
  bool AnyStrong() const;
};

// Parses {"texture":d,"softness":d,"brokenness":d,"colorfulness":d} with
// every degree in 1..3. Throws kMalformedCase otherwise.
Labels ParseLabels(std::string_view json_text);

struct DatasetCase {
  std::string id;
  std::filesystem::path shadow_path;
  std::filesystem::path groundtruth_path;
  std::optional<std::filesystem::path> strokes_path;
  std::optional<std::filesystem::path> mask_path;
  std::optional<Labels> labels;
};

struct SkippedCase {
  std::string id;
  std::string reason;
};

struct Dataset {
  std::vector<DatasetCase> cases;  // sorted by id
  std::vector<SkippedCase> skipped;
};

// One case per subdirectory holding shadow.png and noshadow.png; optional
// strokes.json, labels.json, mask.png. Incomplete or malformed cases are
// listed in `skipped`. Throws kEmptyDataset when nothing loads and kIo when
// the root is not a directory.
Dataset LoadDataset(const std::filesystem::path& root);

struct GtQuality {
  double value = 0.0;  // +inf when no pixel qualifies
  bool valid = true;
};

// Mean absolute plus population standard deviation of shadow - truth over
// every channel sample of the pixels where gray(shadow) >= gray(truth).
GtQuality GroundTruthQuality(const RasterImage& shadow, const RasterImage& truth);
bool AcceptsGroundTruth(const GtQuality& q, double threshold = kGtQualityThreshold);

enum class Scope { kAll, kShadow };

struct ScoreRecord {
  double e_o = 0.0;
  double e_n = 0.0;
  double e_r = 0.0;
  Scope scope = Scope::kAll;
};

// Root mean square difference pooled over channels, over all pixels or the
// pixels of `mask`.
double Rmse(const RasterImage& a, const RasterImage& b,
            const Mask* mask = nullptr);

// e_r = RMSE(result, truth) / RMSE(shadow, truth). Throws
// kShadowFreeCase when the denominator is 0 and kInvalidPair on shape
// mismatch.
ScoreRecord ErrorRatio(const RasterImage& truth, const RasterImage& shadow,
                       const RasterImage& result, const Mask& mask, Scope scope);

Mask ShadowScopeMask(const RasterImage& shadow, const RasterImage& truth);

struct CaseScore {
  std::string id;
  std::optional<Labels> labels;
  double er_all = 0.0;
  std::optional<double> er_shadow;
};

struct ReportRow {
  std::string attribute;  // attribute name, "Other" or "Mean"
  int degree = 0;         // 0 for "Other" and "Mean"
  int n_cases = 0;
  double mean_all = 0.0;
  double std_all = 0.0;
  int n_shadow = 0;
  double mean_shadow = 0.0;
  double std_shadow = 0.0;
};

// Attribute x degree cells exclude cases with another attribute at
// degree 3. "Other" holds labelled cases without any degree-3 attribute
// and "Mean" holds every case.
std::vector<ReportRow> AttributeReport(const std::vector<CaseScore>& scores);

// Cells without cases print as n/a.
std::string ReportCsv(const std::vector<ReportRow>& rows);
std::string ReportTable(const std::vector<ReportRow>& rows);

// Whether `labels` falls into the cell (attribute, degree).
bool InCell(const Labels& labels, int attribute, int degree);

}  // namespace umbra

#endif  // UMBRA_EVAL_H_
