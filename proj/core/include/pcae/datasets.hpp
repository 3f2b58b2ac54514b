#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcae/matrix.hpp"

namespace pcae {

/// Zero-centered sample matrix (p x n, one column per sample) plus the
/// generative coordinates when the data is synthetic.
struct Dataset {
  Matrix samples;
  std::optional<Matrix> factors;  // d_true x n
  std::optional<std::size_t> intrinsic_dim;
  std::uint64_t seed = 0;
  std::string generator;

  std::size_t ambient_dim() const { return samples.rows(); }
  std::size_t size() const { return samples.cols(); }
};

/// Subtracts each row's mean.
Matrix center(const Matrix& x);

/// Swiss roll (t cos t, h, t sin t) with t ~ U[1.5 pi, 4.5 pi], h ~ U[0, 21],
/// plus isotropic Gaussian noise, then centered. Factors are (t, h).
Dataset gen_swiss_roll(std::size_t n, double noise_sd, std::uint64_t seed);

/// Map from generative factors to ambient space: x = u + 0.1 u^3 (coordinate
/// wise) with u = Q z and Q a p x d matrix with orthonormal columns.
struct FactorEmbedding {
  Matrix injection;  // p x d
  static constexpr double kCubic = 0.1;

  std::size_t latent_dim() const { return injection.cols(); }
  std::size_t ambient_dim() const { return injection.rows(); }
  std::vector<double> apply(std::span<const double> z) const;
  /// Analytic Jacobian (p x d) at z.
  Matrix jacobian(std::span<const double> z) const;
};

FactorEmbedding make_factor_embedding(std::size_t d_true, std::size_t p, std::uint64_t seed);

/// d_true uniform factors with Var(z_i) = variance_profile[i], pushed through
/// make_factor_embedding(d_true, p, seed), optional ambient Gaussian noise,
/// then centered.
Dataset gen_factor_manifold(std::size_t d_true, std::size_t p, std::size_t n,
                            std::span<const double> variance_profile, std::uint64_t seed,
                            double noise_sd = 0.0);

/// Half cylinder of radius `radius` and height `height` in R^3: intrinsically
/// flat, isometric to the rectangle [0, pi * radius] x [0, height]. Factors
/// hold the unrolled (arc length, height) coordinates.
Dataset gen_flat_strip(std::size_t n, std::uint64_t seed, double radius = 3.0, double height = 6.0);

struct SplitSpec {
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
};

struct DatasetSplit {
  Dataset train, val, test;
  std::vector<std::size_t> train_idx, val_idx, test_idx;  // columns of the source
};

/// Random disjoint column partition. Validation and test sizes are n * frac
/// rounded to nearest with ties rounded down; the remainder goes to train.
/// Parts keep the source's centering (they are not re-centered).
DatasetSplit split(const Dataset& ds, const SplitSpec& spec, std::uint64_t seed);

/// CSV with header x1,...,xp and one sample per line.
void write_csv(const std::filesystem::path& path, const Matrix& samples);
/// Reads the CSV layout above into a p x n matrix; centers unless told not to.
Matrix read_csv(const std::filesystem::path& path, bool center_data = true);

/// Sidecar metadata: {"intrinsic_dim": d, "seed": s, "generator": name}.
struct DatasetMetadata {
  std::optional<std::size_t> intrinsic_dim;
  std::uint64_t seed = 0;
  std::string generator;
};

std::filesystem::path metadata_path_for(const std::filesystem::path& csv_path);
void write_metadata(const std::filesystem::path& path, const DatasetMetadata& meta);
DatasetMetadata read_metadata(const std::filesystem::path& path);

}  // namespace pcae
