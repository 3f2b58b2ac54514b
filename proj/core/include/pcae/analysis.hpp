#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pcae/matrix.hpp"
#include "pcae/network.hpp"

namespace pcae {

/// Population variance of each row of Z.
std::vector<double> row_variances(const Matrix& z);

/// Population variance of each latent coordinate of encode(model, X).
std::vector<double> latent_variances(const MlpModel& model, const Matrix& x);

enum class DimOrder {
  index,       // ordered latents (PCAE): use coordinates as they are
  descending,  // unordered latents (baselines): sort by variance first
};

struct DimEstimate {
  std::size_t k = 0;
  double tau = 0.0;
  std::vector<double> variance_profile;  // in the order the criterion consumed them
  std::vector<double> cumulative;
  DimOrder order = DimOrder::index;
};

/// Smallest k whose leading k variances explain at least a fraction tau of
/// the total. Ratios within 1e-12 below tau count as reaching it.
DimEstimate estimate_dim_cumvar(std::span<const double> variances, double tau,
                                DimOrder order = DimOrder::index);

/// Levina-Bickel maximum likelihood intrinsic dimension with k neighbours,
/// aggregated by averaging per-point inverse estimates then inverting.
/// Neighbours at distance zero (duplicates) are dropped with a warning.
double mle_dim(const Matrix& x, std::size_t k_neighbors);

/// m + 1 codes (1 - t/m) z_a + (t/m) z_b for t = 0..m.
std::vector<std::vector<double>> interpolate(std::span<const double> z_a,
                                             std::span<const double> z_b, std::size_t m);

struct SmoothnessReport {
  double score = 0.0;
  std::size_t pair_count = 0;
  std::size_t steps = 0;
  std::vector<double> per_pair;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// For each pair: encode both endpoints, interpolate m steps, decode, take the
/// population variance of the m consecutive decoded distances. Score is the
/// mean over pairs. Pairs are evaluated in parallel.
SmoothnessReport smoothness(const MlpModel& model, const Matrix& x,
                            std::span<const std::pair<std::size_t, std::size_t>> pairs,
                            std::size_t m);

/// Same with N random pairs of distinct columns drawn from `seed`.
SmoothnessReport smoothness(const MlpModel& model, const Matrix& x, std::size_t n_pairs,
                            std::size_t m, std::uint64_t seed);

}  // namespace pcae
