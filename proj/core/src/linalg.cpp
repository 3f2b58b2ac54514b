#include "pcae/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pcae/error.hpp"

namespace pcae {

Matrix covariance(const Matrix& x) {
  const auto means = row_means(x);
  std::size_t worst = 0;
  double worst_excess = 0.0;
  bool violated = false;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double scale = 1.0;
    for (double v : x.row(r)) scale = std::max(scale, std::abs(v));
    const double excess = std::abs(means[r]) / scale;
    if (excess > 1e-9 && excess > worst_excess) {
      worst = r;
      worst_excess = excess;
      violated = true;
    }
  }
  if (violated) {
    throw PreconditionError("covariance: data not centered; row " + std::to_string(worst) +
                            " has mean " + std::to_string(means[worst]));
  }
  return matmul_nt(x, x);
}

double symmetry_error(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("symmetry_error: matrix not square");
  double e = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) e = std::max(e, std::abs(a(i, j) - a(j, i)));
  return e;
}

double orthogonality_residual(const Matrix& a) {
  Matrix g = matmul_tn(a, a);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return max_abs(g);
}

EigenDecomposition sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("sym_eig: matrix not square");
  const std::size_t n = a.rows();
  const double scale = max_abs(a);
  if (symmetry_error(a) >= 1e-9 * scale && scale > 0.0) {
    throw PreconditionError("sym_eig: matrix is not symmetric (max |A - A^T| = " +
                            std::to_string(symmetry_error(a)) + ")");
  }

  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);

  const double target = 1e-12 * frobenius_norm(m);
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
  };

  std::size_t sweep = 0;
  constexpr std::size_t kMaxSweeps = 100;
  while (off_norm() > target) {
    if (sweep == kMaxSweeps) throw NumericalError("sym_eig: Jacobi did not converge in 100 sweeps");
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        // Rotation zeroing m(p, q); t is the smaller root of t^2 + 2 tau t - 1 = 0.
        const double tau = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return m(i, i) > m(j, j); });

  EigenDecomposition out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.values[c] = m(src, src);
    std::size_t arg = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v(r, src)) > std::abs(v(arg, src))) arg = r;
    const double sign = v(arg, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = sign * v(r, src);
  }
  out.degenerate.assign(n, false);
  for (const auto& block : eigen_blocks(out.values)) {
    if (block.end - block.begin > 1)
      for (std::size_t i = block.begin; i < block.end; ++i) out.degenerate[i] = true;
  }
  return out;
}

std::vector<EigenBlock> eigen_blocks(std::span<const double> values) {
  std::vector<EigenBlock> blocks;
  if (values.empty()) return blocks;
  const double tol = kEigenTieTolerance * std::max(1.0, std::abs(values[0]));
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    if (i == values.size() || std::abs(values[i - 1] - values[i]) >= tol) {
      blocks.push_back({begin, i});
      begin = i;
    }
  }
  return blocks;
}

double weighted_trace(const Matrix& u, const Matrix& sigma, std::span<const double> gammas) {
  if (u.rows() != u.cols()) throw ShapeError("weighted_trace: U must be square");
  if (sigma.rows() != sigma.cols() || sigma.rows() != u.rows())
    throw ShapeError("weighted_trace: Sigma shape does not match U");
  if (gammas.size() != u.cols()) throw ShapeError("weighted_trace: gamma length does not match U");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (gammas[i] < 0.0) throw PreconditionError("weighted_trace: negative gamma");
    if (i > 0 && gammas[i] < gammas[i - 1])
      throw PreconditionError("weighted_trace: gammas must be ascending");
  }
  // Tr(U^T S U G) = sum_i g_i (U^T S U)_ii
  const Matrix su = matmul(sigma, u);
  double total = 0.0;
  for (std::size_t i = 0; i < u.cols(); ++i) {
    double diag = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r) diag += u(r, i) * su(r, i);
    total += gammas[i] * diag;
  }
  return total;
}

QrResult qr_decompose(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw ShapeError("qr_decompose: need rows >= cols");

  Matrix r = a;
  std::vector<std::vector<double>> reflectors(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> x(m - k);
    for (std::size_t i = k; i < m; ++i) x[i - k] = r(i, k);
    const double alpha = norm2(x);
    std::vector<double>& v = reflectors[k];
    v = x;
    if (alpha == 0.0) {
      v.assign(m - k, 0.0);
      continue;
    }
    v[0] += (x[0] >= 0.0 ? alpha : -alpha);
    const double vnorm = norm2(v);
    for (double& e : v) e /= vnorm;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += v[i - k] * r(i, j);
      for (std::size_t i = k; i < m; ++i) r(i, j) -= 2.0 * v[i - k] * s;
    }
  }

  // Accumulate thin Q by applying the reflectors to the first n columns of I.
  Matrix q(m, n);
  for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
  for (std::size_t kk = n; kk-- > 0;) {
    const std::vector<double>& v = reflectors[kk];
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = kk; i < m; ++i) s += v[i - kk] * q(i, j);
      for (std::size_t i = kk; i < m; ++i) q(i, j) -= 2.0 * v[i - kk] * s;
    }
  }

  QrResult out{std::move(q), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.r(i, j) = r(i, j);
  for (std::size_t k = 0; k < n; ++k) {
    if (out.r(k, k) < 0.0) {
      for (std::size_t j = k; j < n; ++j) out.r(k, j) = -out.r(k, j);
      for (std::size_t i = 0; i < m; ++i) out.q(i, k) = -out.q(i, k);
    }
  }
  return out;
}

Matrix random_orthonormal(std::size_t m, std::size_t n, Rng& rng) {
  return qr_decompose(gaussian_matrix(m, n, rng)).q;
}

Matrix random_psd(std::size_t p, Rng& rng) {
  const Matrix g = gaussian_matrix(p, p, rng);
  Matrix s = matmul_nt(g, g);
  s *= 1.0 / static_cast<double>(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) s(j, i) = s(i, j);
  return s;
}

std::vector<double> singular_values(const Matrix& a) {
  Matrix gram = matmul_tn(a, a);
  for (std::size_t i = 0; i < gram.rows(); ++i)
    for (std::size_t j = i + 1; j < gram.cols(); ++j) gram(j, i) = gram(i, j);
  auto values = sym_eig(gram).values;
  for (double& v : values) v = std::sqrt(std::max(0.0, v));
  return values;
}

std::vector<double> principal_cosines(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("principal_cosines: bases must have equal shape");
  auto cosines = singular_values(matmul_tn(a, b));
  for (double& c : cosines) c = std::clamp(c, 0.0, 1.0);
  return cosines;
}

}  // namespace pcae
