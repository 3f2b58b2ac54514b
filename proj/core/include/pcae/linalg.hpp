#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pcae/matrix.hpp"
#include "pcae/random.hpp"

namespace pcae {

/// Eigenpairs of a symmetric matrix, sorted by non-increasing eigenvalue.
/// Column i of `vectors` pairs with values[i]. Each vector's largest-magnitude
/// entry is positive, which makes the output deterministic.
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
  /// degenerate[i] is true when values[i] is within the tie tolerance of a
  /// neighbour; such columns are only defined up to rotation within their block.
  std::vector<bool> degenerate;
  std::size_t sweeps = 0;
};

/// Half-open column range [begin, end) of eigenvalues that tie.
struct EigenBlock {
  std::size_t begin;
  std::size_t end;
};

inline constexpr double kEigenTieTolerance = 1e-10;

/// Sigma = X X^T for a p x n matrix whose rows have zero mean. No 1/n factor.
/// Throws PreconditionError naming the worst row when X is not centered.
Matrix covariance(const Matrix& x);

/// Cyclic Jacobi eigendecomposition. Sweeps until the off-diagonal Frobenius
/// norm drops below 1e-12 * ||A||_F (at most 100 sweeps).
EigenDecomposition sym_eig(const Matrix& a);

/// Groups consecutive eigenvalues that differ by less than
/// kEigenTieTolerance * max(1, |values[0]|).
std::vector<EigenBlock> eigen_blocks(std::span<const double> values);

/// Tr(U^T Sigma U Gamma) with Gamma = diag(gammas), i.e.
/// sum_i gammas[i] * u_i^T Sigma u_i. Equal to Tr(G^{1/2} U^T Sigma U G^{1/2}).
double weighted_trace(const Matrix& u, const Matrix& sigma, std::span<const double> gammas);

struct QrResult {
  Matrix q;  // m x n, orthonormal columns
  Matrix r;  // n x n upper triangular with non-negative diagonal
};

/// Householder thin QR of an m x n matrix (m >= n), signs fixed so diag(R) >= 0.
QrResult qr_decompose(const Matrix& a);

/// Haar-distributed m x n matrix with orthonormal columns.
Matrix random_orthonormal(std::size_t m, std::size_t n, Rng& rng);

/// Random symmetric PSD matrix G G^T / p with Gaussian G.
Matrix random_psd(std::size_t p, Rng& rng);

/// Singular values (descending) from the eigenvalues of A^T A.
std::vector<double> singular_values(const Matrix& a);

/// Cosines of the principal angles between span(A) and span(B); both must
/// have orthonormal columns and the same column count. Descending, in [0, 1].
std::vector<double> principal_cosines(const Matrix& a, const Matrix& b);

/// max |A - A^T|
double symmetry_error(const Matrix& a);

/// max |A^T A - I|
double orthogonality_residual(const Matrix& a);

}  // namespace pcae
