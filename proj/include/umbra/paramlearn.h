#ifndef UMBRA_PARAMLEARN_H_
#define UMBRA_PARAMLEARN_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "umbra/eval.h"
#include "umbra/image.h"
#include "umbra/params.h"
#include "umbra/strokes.h"

namespace umbra {

inline constexpr int kGeneCount = 6;
inline constexpr int kPopulationSize = 20;
inline constexpr int kTournamentSize = 3;
inline constexpr double kCrossoverRate = 0.8;
inline constexpr double kMutationRate = 0.15;
inline constexpr double kMutationSpread = 0.1;  // fraction of each range
inline constexpr int kEliteCount = 2;
inline constexpr int kCasesPerMeasurement = 5;

struct GeneBounds {
  double lo = 0.0;
  double hi = 0.0;
  bool integer = false;
};

// h1, h2 in [3, 31] (integers); h3 in [0.01, 1]; h4 in [0.005, 0.5];
// h5 in [1.5, 20]; h6 in [0.01, 1].
const std::array<GeneBounds, kGeneCount>& ParamBounds();

using Genome = std::array<double, kGeneCount>;
Genome ToGenome(const ParamVector& p);
ParamVector FromGenome(const Genome& g);  // integers rounded to nearest
bool WithinBounds(const ParamVector& p);

// Lower is better. Exceptions and non-finite values count as +inf.
using FitnessFn = std::function<double(const ParamVector&)>;

struct LearnOptions {
  int generations = 50;  // the initial population is generation 1
  std::uint64_t seed = 1;
  std::vector<ParamVector> initial;  // placed first in the population
};

struct LearnResult {
  ParamVector best;
  double fitness = 0.0;
  std::vector<double> trace;  // best-ever fitness after each generation
};

// Mixed-integer genetic search: tournament selection, uniform crossover,
// per-gene mutation (integers resampled, reals Gaussian then clamped) and
// elitism. Deterministic for a fixed seed.
LearnResult LearnParams(const FitnessFn& fitness, const LearnOptions& options);

// Sum of squared range-normalized distances to `target`; minimum 0 at the
// target. Used to check that the search converges.
FitnessFn PlantedObjective(const ParamVector& target);

// A loaded case ready for scoring.
struct TrainingCase {
  std::string id;
  RasterImage shadow;
  RasterImage truth;
  StrokeSet strokes;
  std::optional<Labels> labels;
};

// Produces the removal result for one case under parameters H.
using PipelineFn = std::function<RasterImage(const TrainingCase&, const ParamVector&)>;

struct Measurement {
  std::string name;
  std::vector<int> cases;  // indices into the training cases
  double weight = 1.0;
};

struct ObjectiveSpec {
  std::vector<Measurement> measurements;
};

// One measurement per attribute x degree cell and "Other" with at least
// one case, each drawing up to kCasesPerMeasurement cases at random; cases
// without labels only enter a catch-all measurement when no cell exists.
ObjectiveSpec BuildObjective(const std::vector<TrainingCase>& cases,
                             std::uint64_t seed);

// Sum over measurements of weight x mean all-pixel error ratio of the
// measurement's cases.
double EvaluateObjective(const ParamVector& h,
                         const std::vector<TrainingCase>& cases,
                         const ObjectiveSpec& objective,
                         const PipelineFn& pipeline);

// The production pipeline (detection through color correction).
RasterImage RunPipeline(const TrainingCase& c, const ParamVector& h);

// Reads every case with strokes; cases without strokes are reported in
// `skipped`.
std::vector<TrainingCase> LoadTrainingCases(const Dataset& dataset,
                                            std::vector<SkippedCase>* skipped);

}  // namespace umbra

#endif  // UMBRA_PARAMLEARN_H_
