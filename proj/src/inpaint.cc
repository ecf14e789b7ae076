#include "umbra/inpaint.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace umbra {
namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

}  // namespace

ScaleField InpaintField(const ScaleField& sparse, const Mask& known,
                        InpaintStats* stats) {
  const int w = sparse.width();
  const int h = sparse.height();
  if (known.width() != w || known.height() != h) {
    throw Error(ErrorCode::kInvalidInput, "known mask size mismatch");
  }
  if (!known.Any()) {
    throw Error(ErrorCode::kInvalidInput, "inpainting needs known pixels");
  }
  const int channels = sparse.channels();
  ScaleField out = sparse;
  if (stats) *stats = {};

  // Unknown pixels reachable from the known set through 4-neighbours take
  // part in the linear system; unreachable ones fall back to the mean.
  const std::size_t n = sparse.pixel_count();
  std::vector<int> index(n, -1);
  std::vector<std::size_t> frontier;
  std::vector<std::uint8_t> reached(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (known.at(i)) {
      reached[i] = 1;
      frontier.push_back(i);
    }
  }
  std::vector<std::size_t> unknowns;
  while (!frontier.empty()) {
    const std::size_t p = frontier.back();
    frontier.pop_back();
    const int px = static_cast<int>(p % w);
    const int py = static_cast<int>(p / w);
    for (int k = 0; k < 4; ++k) {
      const int nx = px + kDx[k];
      const int ny = py + kDy[k];
      if (!known.Contains(nx, ny)) continue;
      const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
      if (reached[q]) continue;
      reached[q] = 1;
      unknowns.push_back(q);
      frontier.push_back(q);
    }
  }
  std::sort(unknowns.begin(), unknowns.end());
  for (std::size_t k = 0; k < unknowns.size(); ++k) {
    index[unknowns[k]] = static_cast<int>(k);
  }

  std::vector<double> known_mean(channels, 0.0);
  const double known_count = static_cast<double>(known.Count());
  for (std::size_t i = 0; i < n; ++i) {
    if (!known.at(i)) continue;
    for (int c = 0; c < channels; ++c) known_mean[c] += sparse.at(i, c);
  }
  for (double& m : known_mean) m /= known_count;
  for (std::size_t i = 0; i < n; ++i) {
    if (!reached[i]) {
      for (int c = 0; c < channels; ++c) out.at(i, c) = known_mean[c];
    }
  }
  if (unknowns.empty()) return out;

  // Solve for offsets from one known value so constant data stays exact.
  std::vector<double> base(channels, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!known.at(i)) continue;
    for (int c = 0; c < channels; ++c) base[c] = sparse.at(i, c);
    break;
  }

  const int m = static_cast<int>(unknowns.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(m) * 5);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, channels);
  for (int row = 0; row < m; ++row) {
    const std::size_t p = unknowns[row];
    const int px = static_cast<int>(p % w);
    const int py = static_cast<int>(p / w);
    double degree = 0.0;
    for (int k = 0; k < 4; ++k) {
      const int nx = px + kDx[k];
      const int ny = py + kDy[k];
      if (!known.Contains(nx, ny)) continue;
      const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
      degree += 1.0;
      if (known.at(q)) {
        for (int c = 0; c < channels; ++c) rhs(row, c) += sparse.at(q, c) - base[c];
      } else {
        triplets.emplace_back(row, index[q], -1.0);
      }
    }
    triplets.emplace_back(row, row, degree);
  }
  Eigen::SparseMatrix<double> laplacian(m, m);
  laplacian.setFromTriplets(triplets.begin(), triplets.end());

  // The reduced Laplacian is symmetric positive definite (every reachable
  // region touches a known pixel), so one factorization serves all channels.
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(laplacian);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidInput, "inpainting system is singular");
  }

  for (int c = 0; c < channels; ++c) {
    const Eigen::VectorXd x = solver.solve(rhs.col(c));
    if (stats) {
      stats->iterations = 1;
      const Eigen::VectorXd residual = laplacian * x - rhs.col(c);
      stats->max_residual =
          std::max(stats->max_residual, residual.cwiseAbs().maxCoeff());
    }
    for (int row = 0; row < m; ++row) {
      out.at(unknowns[row], c) = std::clamp(base[c] + x[row], kMinScale, 1.0);
    }
  }
  return out;
}

}  // namespace umbra
