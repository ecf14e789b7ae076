#include "umbra/paramlearn.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "umbra/image_io.h"
#include "umbra/pipeline.h"

namespace umbra {
namespace {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct Individual {
  Genome genes{};
  double fitness = kInfeasible;
};

Genome Clamp(Genome g) {
  const auto& b = ParamBounds();
  for (int i = 0; i < kGeneCount; ++i) {
    g[i] = std::clamp(g[i], b[i].lo, b[i].hi);
    if (b[i].integer) g[i] = std::round(g[i]);
  }
  return g;
}

double SafeFitness(const FitnessFn& fitness, const Genome& g) {
  try {
    const double f = fitness(FromGenome(g));
    return std::isfinite(f) ? f : kInfeasible;
  } catch (const std::exception&) {
    return kInfeasible;
  }
}

class Breeder {
 public:
  explicit Breeder(std::uint64_t seed) : rng_(seed) {}

  Genome Random() {
    Genome g{};
    const auto& b = ParamBounds();
    for (int i = 0; i < kGeneCount; ++i) g[i] = Sample(b[i]);
    return g;
  }

  const Individual& Tournament(const std::vector<Individual>& pop) {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    std::size_t best = pick(rng_);
    for (int k = 1; k < kTournamentSize; ++k) {
      const std::size_t c = pick(rng_);
      if (pop[c].fitness < pop[best].fitness ||
          (pop[c].fitness == pop[best].fitness && c < best)) {
        best = c;
      }
    }
    return pop[best];
  }

  Genome Cross(const Genome& a, const Genome& b) {
    if (Unit() >= kCrossoverRate) return a;
    Genome child = a;
    for (int i = 0; i < kGeneCount; ++i) {
      if (Unit() < 0.5) child[i] = b[i];
    }
    return child;
  }

  Genome Mutate(Genome g) {
    const auto& b = ParamBounds();
    for (int i = 0; i < kGeneCount; ++i) {
      if (Unit() >= kMutationRate) continue;
      if (b[i].integer) {
        g[i] = Sample(b[i]);
      } else {
        std::normal_distribution<double> noise(0.0, kMutationSpread * (b[i].hi - b[i].lo));
        g[i] += noise(rng_);
      }
    }
    return Clamp(g);
  }

 private:
  double Unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  double Sample(const GeneBounds& b) {
    if (b.integer) {
      return static_cast<double>(std::uniform_int_distribution<int>(
          static_cast<int>(b.lo), static_cast<int>(b.hi))(rng_));
    }
    return std::uniform_real_distribution<double>(b.lo, b.hi)(rng_);
  }

  std::mt19937_64 rng_;
};

}  // namespace

const std::array<GeneBounds, kGeneCount>& ParamBounds() {
  static const std::array<GeneBounds, kGeneCount> kBounds = {{
      {3, 31, true},
      {3, 31, true},
      {0.01, 1.0, false},
      {0.005, 0.5, false},
      {1.5, 20.0, false},
      {0.01, 1.0, false},
  }};
  return kBounds;
}

Genome ToGenome(const ParamVector& p) {
  return {static_cast<double>(p.h1), static_cast<double>(p.h2), p.h3, p.h4, p.h5, p.h6};
}

ParamVector FromGenome(const Genome& g) {
  ParamVector p;
  p.h1 = static_cast<int>(std::lround(g[0]));
  p.h2 = static_cast<int>(std::lround(g[1]));
  p.h3 = g[2];
  p.h4 = g[3];
  p.h5 = g[4];
  p.h6 = g[5];
  return p;
}

bool WithinBounds(const ParamVector& p) {
  const Genome g = ToGenome(p);
  const auto& b = ParamBounds();
  for (int i = 0; i < kGeneCount; ++i) {
    if (!(g[i] >= b[i].lo && g[i] <= b[i].hi)) return false;
  }
  return true;
}

LearnResult LearnParams(const FitnessFn& fitness, const LearnOptions& options) {
  if (options.generations < 1) {
    throw Error(ErrorCode::kInvalidParameter, "generation budget must be >= 1");
  }
  Breeder breeder(options.seed);
  std::vector<Individual> pop;
  for (const ParamVector& p : options.initial) {
    if (static_cast<int>(pop.size()) == kPopulationSize) break;
    pop.push_back({Clamp(ToGenome(p))});
  }
  while (static_cast<int>(pop.size()) < kPopulationSize) pop.push_back({breeder.Random()});
  for (Individual& ind : pop) ind.fitness = SafeFitness(fitness, ind.genes);

  LearnResult result;
  Individual best_ever = pop.front();
  auto record = [&]() {
    for (const Individual& ind : pop) {
      if (ind.fitness < best_ever.fitness) best_ever = ind;
    }
    result.trace.push_back(best_ever.fitness);
  };
  record();

  for (int gen = 2; gen <= options.generations; ++gen) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pop[a].fitness < pop[b].fitness;
    });
    std::vector<Individual> next;
    for (int e = 0; e < kEliteCount; ++e) next.push_back(pop[order[e]]);
    while (static_cast<int>(next.size()) < kPopulationSize) {
      const Individual& a = breeder.Tournament(pop);
      const Individual& b = breeder.Tournament(pop);
      Individual child{breeder.Mutate(breeder.Cross(a.genes, b.genes))};
      child.fitness = SafeFitness(fitness, child.genes);
      next.push_back(child);
    }
    pop = std::move(next);
    record();
  }
  result.best = FromGenome(best_ever.genes);
  result.fitness = best_ever.fitness;
  return result;
}

FitnessFn PlantedObjective(const ParamVector& target) {
  const Genome t = ToGenome(target);
  return [t](const ParamVector& p) {
    const Genome g = ToGenome(p);
    const auto& b = ParamBounds();
    double sum = 0.0;
    for (int i = 0; i < kGeneCount; ++i) {
      const double d = (g[i] - t[i]) / (b[i].hi - b[i].lo);
      sum += d * d;
    }
    return sum;
  };
}

ObjectiveSpec BuildObjective(const std::vector<TrainingCase>& cases,
                             std::uint64_t seed) {
  if (cases.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no training cases for the objective");
  }
  std::mt19937_64 rng(seed);
  ObjectiveSpec spec;
  auto add = [&](std::string name, std::vector<int> members) {
    if (members.empty()) return;
    std::shuffle(members.begin(), members.end(), rng);
    if (static_cast<int>(members.size()) > kCasesPerMeasurement) {
      members.resize(kCasesPerMeasurement);
    }
    std::sort(members.begin(), members.end());
    spec.measurements.push_back({std::move(name), std::move(members), 1.0});
  };
  for (int a = 0; a < kAttributeCount; ++a) {
    for (int d = 1; d <= 3; ++d) {
      std::vector<int> members;
      for (int i = 0; i < static_cast<int>(cases.size()); ++i) {
        if (cases[i].labels && InCell(*cases[i].labels, a, d)) members.push_back(i);
      }
      add(std::string(kAttributeNames[a]) + "-" + std::to_string(d), members);
    }
  }
  std::vector<int> other;
  for (int i = 0; i < static_cast<int>(cases.size()); ++i) {
    if (cases[i].labels && !cases[i].labels->AnyStrong()) other.push_back(i);
  }
  add("Other", other);
  if (spec.measurements.empty()) {
    std::vector<int> all(cases.size());
    std::iota(all.begin(), all.end(), 0);
    add("all", all);
  }
  return spec;
}

double EvaluateObjective(const ParamVector& h,
                         const std::vector<TrainingCase>& cases,
                         const ObjectiveSpec& objective,
                         const PipelineFn& pipeline) {
  if (objective.measurements.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "objective has no measurements");
  }
  h.Validate();
  std::vector<std::optional<double>> ratio(cases.size());
  double total = 0.0;
  for (const Measurement& m : objective.measurements) {
    if (m.weight < 0.0) {
      throw Error(ErrorCode::kInvalidParameter, "measurement weights must be >= 0");
    }
    if (m.cases.empty()) continue;
    double sum = 0.0;
    for (int i : m.cases) {
      if (!ratio[i]) {
        const TrainingCase& c = cases[i];
        const RasterImage result = pipeline(c, h);
        ratio[i] = ErrorRatio(c.truth, c.shadow, result, Mask(), Scope::kAll).e_r;
      }
      sum += *ratio[i];
    }
    total += m.weight * sum / static_cast<double>(m.cases.size());
  }
  return total;
}

RasterImage RunPipeline(const TrainingCase& c, const ParamVector& h) {
  return RemoveShadow(c.shadow, c.strokes, h).result;
}

std::vector<TrainingCase> LoadTrainingCases(const Dataset& dataset,
                                            std::vector<SkippedCase>* skipped) {
  std::vector<TrainingCase> out;
  for (const DatasetCase& c : dataset.cases) {
    if (!c.strokes_path) {
      if (skipped) skipped->push_back({c.id, "no strokes.json"});
      continue;
    }
    TrainingCase t;
    t.id = c.id;
    t.shadow = EnsureRgb(LoadImage(c.shadow_path.string()));
    t.truth = EnsureRgb(LoadImage(c.groundtruth_path.string()));
    t.strokes = LoadStrokes(c.strokes_path->string());
    t.labels = c.labels;
    if (!t.shadow.SameShape(t.truth)) {
      if (skipped) skipped->push_back({c.id, "shadow and ground truth differ in size"});
      continue;
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace umbra
