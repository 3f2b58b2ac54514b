#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcae/geodesic.hpp"
#include "pcae/matrix.hpp"
#include "pcae/network.hpp"
#include "pcae/random.hpp"

namespace pcae {

enum class IsoVariant { abs_sq_diff, square, log_sq };

std::string_view to_string(IsoVariant v);
/// Accepts "abs_sq_diff", "square", "log_sq" (dashes allowed). Throws PreconditionError.
IsoVariant parse_iso_variant(std::string_view name);

/// Loss value plus its gradient with respect to one input matrix.
struct LossGrad {
  double value = 0.0;
  Matrix grad;
};

/// (1/n) sum_i ||x_i - xhat_i||^2.
LossGrad recon_loss(const Matrix& x, const Matrix& xhat);

/// sum_i gamma_i * var_i(Z) with population variance over the batch columns.
LossGrad weighted_variance_loss(const Matrix& z, std::span<const double> gammas);

struct IsoElement {
  double value = 0.0;
  /// abs_sq_diff: d value / d(dhat^2). square and log_sq: d value / d dhat.
  double partial = 0.0;
};

IsoElement iso_elementwise(double d, double dhat, IsoVariant variant);

/// Pairs of batch-local column positions with their target manifold distances.
struct PairBatch {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> target_dists;

  std::size_t size() const { return pairs.size(); }
};

/// Mean elementwise isometry loss between latent distances and targets.
/// log_sq skips pairs whose target is exactly zero (points sharing a landmark).
LossGrad iso_loss(const Matrix& z, const PairBatch& batch, IsoVariant variant);

/// Pairs up a minibatch by a random shuffle: positions (s[0], s[1]), (s[2], s[3]), ...
/// repeated `rounds` times. `global_indices[c]` is the geodesic-index id of column c.
PairBatch sample_pairs(std::span<const std::size_t> global_indices, const GeodesicIndex& index,
                       Rng& rng, std::size_t rounds = 1);
PairBatch sample_pairs(std::span<const std::size_t> global_indices, const GeodesicIndex& index,
                       std::uint64_t seed, std::size_t rounds = 1);

struct LossBreakdown {
  double recon = 0.0;
  double var = 0.0;
  double iso = 0.0;
  double total = 0.0;
  double beta = 0.0;
};

/// Which terms contribute. Disabled terms are reported as 0.
struct LossTerms {
  bool recon = true;
  bool var = true;
  bool iso = true;
};

struct PcaeLossResult {
  LossBreakdown breakdown;
  Matrix grad_z;
  Matrix grad_xhat;
};

/// recon + beta * (var + iso); grad_z collects the var and iso paths,
/// grad_xhat the reconstruction path.
PcaeLossResult pcae_loss(const Matrix& x, const Matrix& z, const Matrix& xhat,
                         const PairBatch& batch, std::span<const double> gammas, double beta,
                         IsoVariant variant, LossTerms terms = {});

struct HaeResult {
  double value = 0.0;
  std::vector<double> prefix_losses;  // L_k for k = 1..latent_dim
  Gradients grads;
};

/// sum_k alpha_k L_k, where L_k is the reconstruction loss from the code with
/// coordinates after k zeroed. Gradients are exact for all parameters.
HaeResult hae_loss_and_grad(const MlpModel& model, const Matrix& x, std::span<const double> alpha);
double hae_loss(const Matrix& x, const MlpModel& model, std::span<const double> alpha);

}  // namespace pcae
