#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pcae/datasets.hpp"
#include "pcae/matrix.hpp"
#include "pcae/network.hpp"

namespace pcae {

/// min Tr(U^T Sigma U Gamma) over p x p orthonormal U.
struct StiefelProblem {
  Matrix sigma;
  std::vector<double> gammas;  // strictly ascending, non-negative
  double tol = 1e-15;          // stop once an accepted step improves by less than this
  std::size_t max_iters = 200000;
  /// Initial step size; 0 picks 1 / (2 gamma_max ||Sigma||_2).
  double initial_step = 0.0;
};

struct Theorem1Oracle {
  double value = 0.0;  // sum_i lambda_i gamma_i with lambda descending
  Matrix u_star;       // eigenvectors in descending eigenvalue order
  std::vector<double> eigenvalues;
};

/// Throws PreconditionError if Sigma is not symmetric PSD or the weights are
/// not strictly ascending and non-negative.
void validate_problem(const Matrix& sigma, std::span<const double> gammas);

Theorem1Oracle oracle_theorem1(const Matrix& sigma, std::span<const double> gammas);

struct Theorem1Report {
  double achieved = 0.0;
  double optimal = 0.0;
  double gap = 0.0;  // achieved - optimal
  /// Per column |cos| to the oracle eigenvector; inside a block of tied
  /// eigenvalues every column gets the smallest principal cosine of the block.
  std::vector<double> alignment;
  double orthogonality_residual = 0.0;  // worst over all iterates
  std::size_t iterations = 0;
  bool converged = false;
  Matrix u;
};

/// Projected gradient with QR retraction: the Euclidean gradient 2 Sigma U Gamma
/// is projected onto the tangent space at U, then U <- qf(U - eta * grad),
/// with eta halved whenever the objective would increase. Never throws on
/// non-convergence; check `converged`.
Theorem1Report solve_stiefel(const StiefelProblem& problem, std::uint64_t seed);

struct Theorem2Config {
  // Denser than the usual 10: the graph metric must be close to flat for an
  // exact planar embedding to exist (k = 10 overestimates strip geodesics ~5%).
  std::size_t k_neighbors = 20;
  std::vector<std::size_t> hidden = {64, 64};
  std::size_t latent_dim = 2;
  /// Empty: the dynamic schedule's weights with the pivot on the last
  /// coordinate, 0.5 i / (d - 1) then 1 (i.e. 0.5, 1 for d = 2).
  std::vector<double> gammas;
  std::size_t epochs = 2000;
  std::size_t batch_size = 128;
  std::size_t pair_rounds = 1;
  double learning_rate = 1e-4;
  std::size_t eval_pairs = 2000;
  std::size_t record_every = 50;
  std::uint64_t seed = 0;
  /// Starting encoder (must have no decoder); default is a fresh He init.
  std::optional<MlpModel> initial_model;
};

struct Theorem2Report {
  double mean_rel_error = 0.0;  // |dhat - d| / d against exact graph geodesics
  double p95_rel_error = 0.0;
  double initial_mean_rel_error = 0.0;
  /// Same statistic against the generator's flat chart, when factors exist.
  std::optional<double> chart_mean_rel_error;
  std::vector<std::pair<std::size_t, double>> curve;  // (epoch, mean rel error)
  std::size_t epochs_run = 0;
  std::size_t train_size = 0;
  std::size_t eval_pair_count = 0;
  MlpModel model;
};

/// Trains an encoder alone on E|dhat^2 - d^2| + sum_i gamma_i Var(f_i) with
/// exact graph geodesics and reports distance distortion on held-out pairs.
Theorem2Report verify_theorem2(const Dataset& manifold, const Theorem2Config& config);

}  // namespace pcae
