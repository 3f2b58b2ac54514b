#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <pcae/error.hpp>
#include <pcae/linalg.hpp>
#include <pcae/random.hpp>
#include <pcae/theory.hpp>

#include "oracles.hpp"

using namespace pcae;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Matrix m(v.size(), v.size());
  std::size_t i = 0;
  for (double x : v) { m(i, i) = x; ++i; }
  return m;
}

std::vector<double> ascending_gammas(std::size_t p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.95);
  std::vector<double> g(p);
  for (;;) {
    for (double& x : g) x = u(rng);
    std::sort(g.begin(), g.end());
    bool ok = true;
    for (std::size_t i = 1; i < p; ++i) ok = ok && g[i] - g[i - 1] > 1e-3;
    if (ok) return g;
  }
}

// Tr(U^T S U G) summed by hand.
double objective(const Matrix& u, const Matrix& s, const std::vector<double>& g) {
  const Matrix su = oracle::naive_product(s, u);
  double v = 0.0;
  for (std::size_t c = 0; c < u.cols(); ++c)
    for (std::size_t r = 0; r < u.rows(); ++r) v += g[c] * u(r, c) * su(r, c);
  return v;
}

}  // namespace

TEST(OracleTheorem1, DiagonalExample) {
  const std::vector<double> g{0.5, 1.0, 1.5};
  const auto o = oracle_theorem1(diag({3, 2, 1}), g);
  EXPECT_NEAR(o.value, 5.0, 1e-12);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(o.u_star(i, i)), 1.0, 1e-12);
}

TEST(OracleTheorem1, IsotropicCovariance) {
  const std::vector<double> g{0.1, 0.7, 1.2, 1.9};
  EXPECT_NEAR(oracle_theorem1(Matrix::identity(4), g).value, 0.1 + 0.7 + 1.2 + 1.9, 1e-12);
  Rng rng = make_rng(1);
  const Matrix u = random_orthonormal(4, 4, rng);
  EXPECT_NEAR(objective(u, Matrix::identity(4), g), 3.9, 1e-12);
}

TEST(OracleTheorem1, LowerBoundOverRandomOrthonormal) {
  Rng rng = make_rng(2);
  const Matrix s = random_psd(5, rng);
  const auto g = ascending_gammas(5, rng);
  const double best = oracle_theorem1(s, g).value;
  for (int t = 0; t < 1000; ++t) EXPECT_GE(objective(random_orthonormal(5, 5, rng), s, g), best - 1e-9);
}

TEST(OracleTheorem1, RearrangementDirection) {
  Rng rng = make_rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t p = 2 + t % 6;
    const Matrix s = random_psd(p, rng);
    const auto g = ascending_gammas(p, rng);
    const auto o = oracle_theorem1(s, g);
    double reversed = 0.0;
    for (std::size_t i = 0; i < p; ++i) reversed += o.eigenvalues[i] * g[p - 1 - i];
    EXPECT_GE(reversed, o.value - 1e-9);
  }
}

TEST(OracleTheorem1, Guards) {
  EXPECT_THROW(oracle_theorem1(Matrix::identity(3), std::vector<double>{0.5, 0.5, 1.0}), PreconditionError);
  EXPECT_THROW(oracle_theorem1(diag({1, -1}), std::vector<double>{0.5, 1.0}), PreconditionError);
  EXPECT_THROW(oracle_theorem1(Matrix::identity(3), std::vector<double>{0.5, 1.0}), ShapeError);
}

TEST(SolveStiefel, DistinctSpectrumPFour) {
  Rng rng = make_rng(4);
  StiefelProblem prob;
  prob.sigma = random_psd(4, rng);
  prob.gammas = {0.2, 0.6, 1.1, 1.7};
  const auto rep = solve_stiefel(prob, 4);
  EXPECT_LT(std::abs(rep.gap), 1e-6);
  EXPECT_LE(rep.iterations, 5000u);
  EXPECT_GE(rep.gap, -1e-12);
  for (double a : rep.alignment) EXPECT_GT(a, 0.999);
  EXPECT_LT(rep.orthogonality_residual, 1e-10);
  EXPECT_NEAR(rep.achieved, objective(rep.u, prob.sigma, prob.gammas), 1e-10);
}

TEST(SolveStiefel, RepeatedLeadingEigenvalue) {
  Rng rng = make_rng(5);
  const Matrix q = random_orthonormal(4, 4, rng);
  const Matrix d = diag({3, 3, 1, 0.5});
  StiefelProblem prob;
  prob.sigma = oracle::naive_product(oracle::naive_product(q, d), oracle::naive_transpose(q));
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < r; ++c) prob.sigma(r, c) = prob.sigma(c, r);
  prob.gammas = {0.3, 0.8, 1.2, 1.6};
  const auto rep = solve_stiefel(prob, 5);
  EXPECT_LT(std::abs(rep.gap), 1e-6);
  // leading block judged by its principal angles against span(q1, q2)
  Matrix a(4, 2), b(4, 2);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 2; ++c) {
      a(r, c) = rep.u(r, c);
      b(r, c) = q(r, c);
    }
  for (double cosine : principal_cosines(a, b)) EXPECT_GT(cosine, 0.999);
  for (double x : rep.alignment) EXPECT_GT(x, 0.999);
}

TEST(SolveStiefel, TwentyRandomInstances) {
  Rng rng = make_rng(6);
  std::uniform_int_distribution<std::size_t> dim(3, 8);
  for (int t = 0; t < 20; ++t) {
    StiefelProblem prob;
    const std::size_t p = dim(rng);
    prob.sigma = random_psd(p, rng);
    prob.gammas = ascending_gammas(p, rng);
    const auto rep = solve_stiefel(prob, 100 + t);
    EXPECT_GE(rep.achieved, rep.optimal - 1e-9);
    EXPECT_LT(rep.gap, 1e-6) << "instance " << t;
    for (double x : rep.alignment) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0 + 1e-12);
    }
  }
}

TEST(SolveStiefel, EqualGammasRejected) {
  StiefelProblem prob;
  prob.sigma = Matrix::identity(3);
  prob.gammas = {0.5, 1.0, 1.0};
  EXPECT_THROW(solve_stiefel(prob, 0), PreconditionError);
}

TEST(VerifyTheorem2, GammaBound) {
  const Dataset strip = gen_flat_strip(200, 1);
  Theorem2Config cfg;
  cfg.gammas = {1.0, 2.5};
  cfg.epochs = 1;
  EXPECT_THROW(verify_theorem2(strip, cfg), PreconditionError);
  cfg.gammas = {1.0, 0.5};
  EXPECT_THROW(verify_theorem2(strip, cfg), PreconditionError);
}

TEST(VerifyTheorem2, IdentityInitOnEuclideanPatch) {
  // convex planar patch: graph geodesics are close to chords and the identity is near-isometric
  Rng rng = make_rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Dataset ds;
  ds.samples = Matrix(2, 400);
  for (std::size_t c = 0; c < 400; ++c) {
    ds.samples(0, c) = 2.0 * u(rng);
    ds.samples(1, c) = u(rng);
  }
  ds.samples = center(ds.samples);
  ds.generator = "patch";

  MlpModel enc;
  enc.encoder.push_back({Matrix::identity(2), std::vector<double>{0, 0}, Activation::identity});

  Theorem2Config cfg;
  cfg.initial_model = enc;
  cfg.epochs = 100;
  cfg.record_every = 10;
  cfg.eval_pairs = 500;
  cfg.seed = 7;
  const auto rep = verify_theorem2(ds, cfg);
  ASSERT_FALSE(rep.curve.empty());
  EXPECT_LT(rep.initial_mean_rel_error, 0.08);
  for (const auto& [epoch, err] : rep.curve) EXPECT_LE(err, rep.initial_mean_rel_error + 0.01) << "epoch " << epoch;
}
