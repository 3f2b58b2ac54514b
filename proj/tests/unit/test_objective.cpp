#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <pcae/datasets.hpp>
#include <pcae/error.hpp>
#include <pcae/geodesic.hpp>
#include <pcae/linalg.hpp>
#include <pcae/network.hpp>
#include <pcae/objective.hpp>
#include <pcae/random.hpp>

#include "oracles.hpp"

using namespace pcae;

namespace {

// Gradient of a Matrix -> scalar function by central differences.
Matrix numeric_grad(const std::function<double(const Matrix&)>& f, const Matrix& at, double h = 1e-5) {
  std::vector<double> flat(at.data().begin(), at.data().end());
  const auto g = oracle::central_diff(
      [&](const std::vector<double>& v) { return f(Matrix(at.rows(), at.cols(), v)); }, flat, h);
  return Matrix(at.rows(), at.cols(), g);
}

PairBatch random_pairs(std::size_t n, std::size_t count, Rng& rng, double max_target = 3.0) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> dist(0.2, max_target);
  PairBatch b;
  while (b.size() < count) {
    const std::size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    b.pairs.emplace_back(i, j);
    b.target_dists.push_back(dist(rng));
  }
  return b;
}

}  // namespace

TEST(ReconLoss, Examples) {
  const Matrix x{{1, 2}, {3, 4}};
  const auto same = recon_loss(x, x);
  EXPECT_EQ(same.value, 0.0);
  EXPECT_EQ(max_abs(same.grad), 0.0);
  const auto r = recon_loss(Matrix{{0}}, Matrix{{2}});
  EXPECT_EQ(r.value, 4.0);
  EXPECT_EQ(r.grad, Matrix{{4}});
  EXPECT_THROW(recon_loss(x, Matrix(2, 3)), ShapeError);
}

TEST(ReconLoss, MatchesScalarLoop) {
  Rng rng = make_rng(1);
  const Matrix x = gaussian_matrix(3, 10, rng);
  const Matrix xh = gaussian_matrix(3, 10, rng);
  double brute = 0.0;
  for (std::size_t c = 0; c < 10; ++c)
    for (std::size_t r = 0; r < 3; ++r) brute += std::pow(x(r, c) - xh(r, c), 2);
  brute /= 10.0;
  EXPECT_NEAR(recon_loss(x, xh).value, brute, 1e-12);
  const Matrix num = numeric_grad([&](const Matrix& m) { return recon_loss(x, m).value; }, xh);
  EXPECT_LT(max_abs(num - recon_loss(x, xh).grad), 1e-8);
}

TEST(WeightedVariance, Examples) {
  EXPECT_EQ(weighted_variance_loss(Matrix(2, 5, 3.0), std::vector<double>{1, 2}).value, 0.0);
  EXPECT_DOUBLE_EQ(weighted_variance_loss(Matrix{{-1, 1}}, std::vector<double>{0.5}).value, 0.5);
  EXPECT_THROW(weighted_variance_loss(Matrix(2, 1), std::vector<double>{1, 2}), PreconditionError);
  EXPECT_THROW(weighted_variance_loss(Matrix(2, 4), std::vector<double>{1}), ShapeError);
}

TEST(WeightedVariance, BruteForceAndFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng = make_rng(seed, 2);
    const Matrix z = gaussian_matrix(4, 12, rng);
    std::vector<double> g{0.1, 0.5, 0.9, 1.7};
    double brute = 0.0;
    for (std::size_t r = 0; r < 4; ++r) brute += g[r] * oracle::variance(oracle::row(z, r));
    const auto l = weighted_variance_loss(z, g);
    EXPECT_NEAR(l.value, brute, 1e-12);
    const Matrix num = numeric_grad([&](const Matrix& m) { return weighted_variance_loss(m, g).value; }, z);
    EXPECT_LT(max_abs(num - l.grad), 1e-6);
  }
}

TEST(WeightedVariance, UniformWeightIsScaledCovarianceTrace) {
  Rng rng = make_rng(3);
  Matrix z = gaussian_matrix(3, 20, rng);
  const Matrix zc = center(z);
  const double tr = oracle::naive_trace(covariance(zc)) / 20.0;
  EXPECT_NEAR(weighted_variance_loss(z, std::vector<double>{0.7, 0.7, 0.7}).value, 0.7 * tr, 1e-12);
}

TEST(IsoElementwise, Examples) {
  for (auto v : {IsoVariant::abs_sq_diff, IsoVariant::square, IsoVariant::log_sq})
    EXPECT_EQ(iso_elementwise(3, 3, v).value, 0.0);
  EXPECT_EQ(iso_elementwise(2, 1, IsoVariant::abs_sq_diff).value, 3.0);
  EXPECT_EQ(iso_elementwise(2, 1, IsoVariant::square).value, 1.0);
  EXPECT_NEAR(iso_elementwise(std::exp(1.0), 1, IsoVariant::log_sq).value, 1.0, 1e-15);
  EXPECT_EQ(iso_elementwise(2, 2, IsoVariant::abs_sq_diff).partial, 0.0);
  EXPECT_THROW(iso_elementwise(0, 1, IsoVariant::log_sq), DomainError);
  EXPECT_THROW(iso_elementwise(1, 0, IsoVariant::log_sq), DomainError);
  EXPECT_THROW(iso_elementwise(-1, 1, IsoVariant::square), PreconditionError);
}

TEST(IsoElementwise, PartialsByFiniteDifferences) {
  const double h = 1e-6;
  for (double d : {0.5, 1.3, 2.0}) {
    for (double dh : {0.4, 1.1, 2.6}) {
      // abs_sq_diff partial is with respect to dhat^2
      const double s = dh * dh;
      const double num_abs = (std::abs(d * d - (s + h)) - std::abs(d * d - (s - h))) / (2 * h);
      EXPECT_NEAR(iso_elementwise(d, dh, IsoVariant::abs_sq_diff).partial, num_abs, 1e-6);
      for (auto v : {IsoVariant::square, IsoVariant::log_sq}) {
        const double num = (iso_elementwise(d, dh + h, v).value - iso_elementwise(d, dh - h, v).value) / (2 * h);
        EXPECT_NEAR(iso_elementwise(d, dh, v).partial, num, 1e-6);
      }
    }
  }
}

TEST(IsoLoss, Examples) {
  PairBatch one;
  one.pairs = {{0, 1}};
  one.target_dists = {5.0};
  const Matrix z{{0, 3}, {0, 4}};
  EXPECT_EQ(iso_loss(z, one, IsoVariant::abs_sq_diff).value, 0.0);
  EXPECT_THROW(iso_loss(z, PairBatch{}, IsoVariant::square), PreconditionError);
  PairBatch bad;
  bad.pairs = {{0, 2}};
  bad.target_dists = {1.0};
  EXPECT_THROW(iso_loss(z, bad, IsoVariant::square), PreconditionError);
}

TEST(IsoLoss, IsometricEmbeddingIsZero) {
  Rng rng = make_rng(4);
  const Matrix z = gaussian_matrix(3, 8, rng);
  PairBatch b;
  for (std::size_t i = 0; i + 1 < 8; ++i) {
    b.pairs.emplace_back(i, i + 1);
    b.target_dists.push_back(oracle::col_dist(z, i, i + 1));
  }
  for (auto v : {IsoVariant::abs_sq_diff, IsoVariant::square, IsoVariant::log_sq})
    EXPECT_NEAR(iso_loss(z, b, v).value, 0.0, 1e-24);
}

TEST(IsoLoss, GradientsByFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = make_rng(seed, 5);
    const Matrix z = gaussian_matrix(3, 10, rng);
    PairBatch b = random_pairs(10, 12, rng);
    // drop pairs sitting on the |a^2 - b^2| kink
    PairBatch smooth;
    for (std::size_t q = 0; q < b.size(); ++q) {
      const double dh = oracle::col_dist(z, b.pairs[q].first, b.pairs[q].second);
      if (std::abs(dh * dh - b.target_dists[q] * b.target_dists[q]) < 1e-6) continue;
      smooth.pairs.push_back(b.pairs[q]);
      smooth.target_dists.push_back(b.target_dists[q]);
    }
    for (auto v : {IsoVariant::abs_sq_diff, IsoVariant::square, IsoVariant::log_sq}) {
      const auto l = iso_loss(z, smooth, v);
      const Matrix num = numeric_grad([&](const Matrix& m) { return iso_loss(m, smooth, v).value; }, z);
      for (std::size_t i = 0; i < num.size(); ++i)
        EXPECT_LT(oracle::rel_err(l.grad.data()[i], num.data()[i]), 1e-4)
            << "variant " << to_string(v) << " seed " << seed;
    }
  }
}

TEST(IsoLoss, MeanOverPairsMatchesLoop) {
  Rng rng = make_rng(6);
  const Matrix z = gaussian_matrix(2, 6, rng);
  const PairBatch b = random_pairs(6, 5, rng);
  double brute = 0.0;
  for (std::size_t q = 0; q < b.size(); ++q) {
    const double dh = oracle::col_dist(z, b.pairs[q].first, b.pairs[q].second);
    brute += std::abs(b.target_dists[q] * b.target_dists[q] - dh * dh);
  }
  EXPECT_NEAR(iso_loss(z, b, IsoVariant::abs_sq_diff).value, brute / 5.0, 1e-12);
}

TEST(IsoLoss, DoublingExpandedCodesIncreasesLoss) {
  Rng rng = make_rng(7);
  Matrix z = gaussian_matrix(3, 10, rng);
  PairBatch b;
  for (std::size_t i = 0; i + 1 < 10; i += 2) {
    b.pairs.emplace_back(i, i + 1);
    b.target_dists.push_back(0.5 * oracle::col_dist(z, i, i + 1));  // dhat >= d everywhere
  }
  const double base = iso_loss(z, b, IsoVariant::abs_sq_diff).value;
  z *= 2.0;
  EXPECT_GT(iso_loss(z, b, IsoVariant::abs_sq_diff).value, base);
}

TEST(IsoLoss, LogVariantSkipsZeroTargets) {
  const Matrix z{{0, 1, 3}};
  PairBatch b;
  b.pairs = {{0, 1}, {1, 2}};
  b.target_dists = {0.0, 2.0};
  EXPECT_NEAR(iso_loss(z, b, IsoVariant::log_sq).value, 0.0, 1e-15);
}

TEST(PcaeLoss, BetaZeroIsRecon) {
  Rng rng = make_rng(8);
  const Matrix x = gaussian_matrix(3, 6, rng);
  const Matrix z = gaussian_matrix(2, 6, rng);
  const Matrix xh = gaussian_matrix(3, 6, rng);
  const PairBatch b = random_pairs(6, 3, rng);
  const auto l = pcae_loss(x, z, xh, b, std::vector<double>{0.5, 1.5}, 0.0, IsoVariant::abs_sq_diff);
  EXPECT_EQ(l.breakdown.total, l.breakdown.recon);
  EXPECT_GT(l.breakdown.var, 0.0);
  EXPECT_GT(l.breakdown.iso, 0.0);
}

TEST(PcaeLoss, OnlyVarianceSurvivesForPerfectIsometricAutoencoder) {
  // latent codes exactly reproduce targets and the decoder is exact
  Rng rng = make_rng(9);
  const Matrix x = gaussian_matrix(2, 6, rng);
  const Matrix z = x;
  PairBatch b;
  b.pairs = {{0, 1}, {2, 3}, {4, 5}};
  for (const auto& [i, j] : b.pairs) b.target_dists.push_back(oracle::col_dist(x, i, j));
  const std::vector<double> g{0.5, 1.5};
  const double beta = 0.2;
  const auto l = pcae_loss(x, z, x, b, g, beta, IsoVariant::abs_sq_diff);
  double var = 0.0;
  for (std::size_t r = 0; r < 2; ++r) var += g[r] * oracle::variance(oracle::row(z, r));
  EXPECT_NEAR(l.breakdown.total, beta * var, 1e-12);
}

TEST(PcaeLoss, IdentityAndTermsSwitch) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng = make_rng(seed, 10);
    const Matrix x = gaussian_matrix(3, 8, rng);
    const Matrix z = gaussian_matrix(2, 8, rng);
    const Matrix xh = gaussian_matrix(3, 8, rng);
    const PairBatch b = random_pairs(8, 4, rng);
    const std::vector<double> g{0.3, 1.2};
    const auto l = pcae_loss(x, z, xh, b, g, 0.37, IsoVariant::square);
    const double r = recon_loss(x, xh).value;
    const double v = weighted_variance_loss(z, g).value;
    const double i = iso_loss(z, b, IsoVariant::square).value;
    EXPECT_NEAR(l.breakdown.total, r + 0.37 * (v + i), 1e-12);
    EXPECT_NEAR(l.breakdown.total, l.breakdown.recon + l.breakdown.beta * (l.breakdown.var + l.breakdown.iso), 1e-12);
    const auto no_iso = pcae_loss(x, z, xh, b, g, 0.37, IsoVariant::square, LossTerms{true, true, false});
    EXPECT_EQ(no_iso.breakdown.iso, 0.0);
    EXPECT_NEAR(no_iso.breakdown.total, r + 0.37 * v, 1e-12);
  }
}

TEST(SamplePairs, Sizes) {
  const Dataset ds = gen_swiss_roll(300, 0.0, 1);
  const GeodesicIndex idx = build_index(ds.samples, 10, 50, 1);
  const std::vector<std::size_t> two{5, 9};
  EXPECT_EQ(sample_pairs(two, idx, std::uint64_t{3}).size(), 1u);
  std::vector<std::size_t> batch(256);
  for (std::size_t i = 0; i < 256; ++i) batch[i] = i;
  const PairBatch b = sample_pairs(batch, idx, std::uint64_t{4});
  EXPECT_EQ(b.size(), 128u);
  std::set<std::size_t> seen;
  for (const auto& [i, j] : b.pairs) {
    EXPECT_NE(i, j);
    EXPECT_TRUE(seen.insert(i).second);
    EXPECT_TRUE(seen.insert(j).second);
  }
  std::vector<std::size_t> odd(7);
  for (std::size_t i = 0; i < 7; ++i) odd[i] = 10 + i;
  EXPECT_EQ(sample_pairs(odd, idx, std::uint64_t{5}).size(), 3u);
  EXPECT_THROW(sample_pairs(std::vector<std::size_t>{1}, idx, std::uint64_t{5}), PreconditionError);
}

TEST(SamplePairs, TargetsNonNegativeAndSymmetric) {
  const Dataset ds = gen_swiss_roll(300, 0.0, 2);
  const GeodesicIndex idx = build_index(ds.samples, 10, 60, 2);
  std::vector<std::size_t> batch(64);
  for (std::size_t i = 0; i < 64; ++i) batch[i] = 3 * i;
  const PairBatch b = sample_pairs(batch, idx, std::uint64_t{6});
  for (std::size_t q = 0; q < b.size(); ++q) {
    EXPECT_GE(b.target_dists[q], 0.0);
    const auto [i, j] = b.pairs[q];
    EXPECT_EQ(b.target_dists[q], idx.approx_dist(batch[j], batch[i]));
  }
}

TEST(Hae, SingleLatentIsPlainRecon) {
  const MlpModel m = init_model(std::vector<std::size_t>{3, 6, 1}, std::vector<std::size_t>{1, 6, 3}, 1);
  Rng rng = make_rng(11);
  const Matrix x = gaussian_matrix(3, 9, rng);
  const double r = recon_loss(x, decode(m, encode(m, x))).value;
  EXPECT_NEAR(hae_loss(x, m, std::vector<double>{2.5}), 2.5 * r, 1e-12);
}

TEST(Hae, FirstPrefixWeight) {
  const MlpModel m = init_model(std::vector<std::size_t>{3, 6, 3}, std::vector<std::size_t>{3, 6, 3}, 2);
  Rng rng = make_rng(12);
  const Matrix x = gaussian_matrix(3, 9, rng);
  Matrix z = encode(m, x);
  for (std::size_t r = 1; r < 3; ++r)
    for (double& v : z.row(r)) v = 0.0;
  const double l1 = recon_loss(x, decode(m, z)).value;
  EXPECT_NEAR(hae_loss(x, m, std::vector<double>{1, 0, 0}), l1, 1e-12);
}

TEST(Hae, GradientByFiniteDifferences) {
  MlpModel m = init_model(std::vector<std::size_t>{3, 4, 2}, std::vector<std::size_t>{2, 4, 3}, 3);
  auto params = get_parameters(m);
  for (double& v : params) v += 0.05;
  set_parameters(m, params);
  Rng rng = make_rng(13);
  const Matrix x = gaussian_matrix(3, 5, rng);
  const std::vector<double> alpha{1.0, 0.5};
  const auto analytic = flatten(hae_loss_and_grad(m, x, alpha).grads);
  const auto numeric = oracle::central_diff(
      [&](const std::vector<double>& p) {
        MlpModel t = m;
        set_parameters(t, p);
        return hae_loss(x, t, alpha);
      },
      params);
  for (std::size_t i = 0; i < numeric.size(); ++i) EXPECT_LT(oracle::rel_err(analytic[i], numeric[i]), 1e-4) << i;
}

TEST(IsoVariantNames, RoundTrip) {
  for (auto v : {IsoVariant::abs_sq_diff, IsoVariant::square, IsoVariant::log_sq})
    EXPECT_EQ(parse_iso_variant(to_string(v)), v);
  EXPECT_EQ(parse_iso_variant("abs-sq-diff"), IsoVariant::abs_sq_diff);
  EXPECT_THROW(parse_iso_variant("cubic"), PreconditionError);
}
