#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include <pcae/analysis.hpp>
#include <pcae/datasets.hpp>
#include <pcae/error.hpp>
#include <pcae/linalg.hpp>

#include "oracles.hpp"

using namespace pcae;

namespace {

double max_row_mean(const Matrix& x) {
  double worst = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double m = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) m += x(r, c);
    worst = std::max(worst, std::abs(m / static_cast<double>(x.cols())));
  }
  return worst;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pcae_test_" + name);
}

}  // namespace

TEST(SwissRoll, ShapeAndMetadata) {
  const Dataset ds = gen_swiss_roll(1000, 0.0, 7);
  EXPECT_EQ(ds.intrinsic_dim, 2u);
  EXPECT_EQ(ds.ambient_dim(), 3u);
  EXPECT_EQ(ds.size(), 1000u);
  EXPECT_LT(max_row_mean(ds.samples), 1e-9);
  ASSERT_TRUE(ds.factors.has_value());
  for (std::size_t c = 0; c < ds.size(); ++c) {
    EXPECT_GE((*ds.factors)(0, c), 1.5 * M_PI);
    EXPECT_LE((*ds.factors)(0, c), 4.5 * M_PI);
    EXPECT_GE((*ds.factors)(1, c), 0.0);
    EXPECT_LE((*ds.factors)(1, c), 21.0);
  }
}

TEST(SwissRoll, Deterministic) {
  EXPECT_EQ(gen_swiss_roll(300, 0.1, 4).samples, gen_swiss_roll(300, 0.1, 4).samples);
  EXPECT_NE(gen_swiss_roll(300, 0.1, 4).samples, gen_swiss_roll(300, 0.1, 5).samples);
}

TEST(SwissRoll, MleNearTwo) {
  const Dataset ds = gen_swiss_roll(1000, 0.0, 7);
  EXPECT_NEAR(mle_dim(ds.samples, 10), 2.0, 0.3);
}

TEST(SwissRoll, Errors) {
  EXPECT_THROW(gen_swiss_roll(5, 0.0, 1), PreconditionError);
  EXPECT_THROW(gen_swiss_roll(100, -0.1, 1), PreconditionError);
}

TEST(FactorManifold, Basic) {
  const std::vector<double> prof{4, 3, 2, 1};
  const Dataset ds = gen_factor_manifold(4, 16, 500, prof, 3);
  EXPECT_EQ(ds.intrinsic_dim, 4u);
  EXPECT_EQ(ds.ambient_dim(), 16u);
  EXPECT_LT(max_row_mean(ds.samples), 1e-9);
  EXPECT_EQ(ds.samples, gen_factor_manifold(4, 16, 500, prof, 3).samples);
}

TEST(FactorManifold, FactorVariancesMatchProfile) {
  const std::vector<double> prof{4, 3, 2, 1};
  const Dataset ds = gen_factor_manifold(4, 16, 10000, prof, 12);
  const Matrix f = center(*ds.factors);
  Matrix cov = covariance(f);
  cov *= 1.0 / static_cast<double>(f.cols());
  const auto e = sym_eig(cov);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(e.values[i], prof[i], 0.05 * prof[i]);
}

TEST(FactorManifold, JacobianFullRankAgainstFiniteDifferences) {
  const FactorEmbedding emb = make_factor_embedding(5, 32, 9);
  Rng rng = make_rng(9, 77);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> z(5);
    for (double& v : z) v = u(rng);
    // finite-difference Jacobian, independent of the analytic one
    Matrix j(32, 5);
    for (std::size_t c = 0; c < 5; ++c) {
      auto zp = z;
      auto zm = z;
      zp[c] += 1e-6;
      zm[c] -= 1e-6;
      const auto fp = emb.apply(zp);
      const auto fm = emb.apply(zm);
      for (std::size_t r = 0; r < 32; ++r) j(r, c) = (fp[r] - fm[r]) / 2e-6;
    }
    EXPECT_LT(max_abs(j - emb.jacobian(z)), 1e-6);
    const auto e = sym_eig(oracle::naive_product(oracle::naive_transpose(j), j));
    double det = 1.0;
    for (double v : e.values) det *= v;
    EXPECT_GT(det, 0.0);
    EXPECT_GT(e.values.back(), 1e-6);
  }
}

TEST(FactorManifold, TwoThresholdsOnFactorVariances) {
  // last factor carries 0.4% of the total variance
  const std::vector<double> prof{0.5, 0.3, 0.196, 0.004};
  const Dataset ds = gen_factor_manifold(4, 8, 20000, prof, 5);
  const auto v = row_variances(*ds.factors);
  EXPECT_EQ(estimate_dim_cumvar(v, 0.99).k, 3u);
  EXPECT_EQ(estimate_dim_cumvar(v, 0.999).k, 4u);
}

TEST(FactorManifold, Errors) {
  EXPECT_THROW(gen_factor_manifold(4, 16, 100, std::vector<double>{1, 2, 3, 4}, 1), PreconditionError);
  EXPECT_THROW(gen_factor_manifold(4, 16, 100, std::vector<double>{4, 3, 2, 0}, 1), PreconditionError);
  EXPECT_THROW(gen_factor_manifold(4, 4, 100, std::vector<double>{4, 3, 2, 1}, 1), PreconditionError);
}

TEST(Center, Examples) {
  EXPECT_EQ(center(Matrix{{1, 3}}), (Matrix{{-1, 1}}));
  const Matrix c = center(Matrix{{-1, 1}, {2, -2}});
  EXPECT_LT(max_abs(c - Matrix{{-1, 1}, {2, -2}}), 1e-15);
}

TEST(Center, RandomAndIdempotent) {
  Rng rng = make_rng(2);
  Matrix x = gaussian_matrix(5, 100, rng);
  x += Matrix(5, 100, 3.0);
  const Matrix c = center(x);
  EXPECT_LT(max_row_mean(c), 1e-12);
  EXPECT_LT(max_abs(center(c) - c), 1e-12);
}

TEST(Split, Sizes) {
  const Dataset big = gen_swiss_roll(100, 0.0, 1);
  const auto s = split(big, SplitSpec{}, 1);
  EXPECT_EQ(s.train.size(), 70u);
  EXPECT_EQ(s.val.size(), 15u);
  EXPECT_EQ(s.test.size(), 15u);
  const Dataset small = gen_swiss_roll(10, 0.0, 1);
  const auto t = split(small, SplitSpec{}, 1);
  EXPECT_EQ(t.train.size(), 8u);
  EXPECT_EQ(t.val.size(), 1u);
  EXPECT_EQ(t.test.size(), 1u);
}

TEST(Split, DisjointCoverAndDeterministic) {
  const Dataset ds = gen_swiss_roll(137, 0.0, 1);
  const auto s = split(ds, SplitSpec{}, 9);
  std::set<std::size_t> all;
  for (const auto* part : {&s.train_idx, &s.val_idx, &s.test_idx})
    for (std::size_t i : *part) EXPECT_TRUE(all.insert(i).second) << "duplicate " << i;
  EXPECT_EQ(all.size(), 137u);
  EXPECT_EQ(*all.rbegin(), 136u);
  EXPECT_EQ(s.test_idx, split(ds, SplitSpec{}, 9).test_idx);
  for (std::size_t c = 0; c < s.test.size(); ++c)
    for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(s.test.samples(r, c), ds.samples(r, s.test_idx[c]));
}

TEST(Split, Errors) {
  const Dataset ds = gen_swiss_roll(10, 0.0, 1);
  EXPECT_THROW(split(ds, SplitSpec{0.9, 0.05, 0.05}, 1), PreconditionError);
  EXPECT_THROW(split(ds, SplitSpec{0.5, 0.2, 0.2}, 1), PreconditionError);
}

TEST(Csv, RoundTripExact) {
  const Dataset ds = gen_factor_manifold(2, 4, 50, std::vector<double>{2, 1}, 3);
  const auto path = temp_file("roundtrip.csv");
  write_csv(path, ds.samples);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x1,x2,x3,x4");
  EXPECT_EQ(read_csv(path, false), ds.samples);
  std::filesystem::remove(path);
}

TEST(Csv, LoaderCentersByDefault) {
  const auto path = temp_file("offset.csv");
  write_csv(path, Matrix{{1, 2, 3}, {10, 10, 13}});
  EXPECT_LT(max_row_mean(read_csv(path)), 1e-12);
  EXPECT_EQ(read_csv(path, false)(1, 2), 13.0);
  std::filesystem::remove(path);
}

TEST(Csv, BadInput) {
  EXPECT_THROW(read_csv("/nonexistent/pcae.csv"), IoError);
  const auto path = temp_file("bad.csv");
  std::ofstream(path) << "x1,x2\n1,2\n3\n";
  EXPECT_THROW(read_csv(path), IoError);
  std::filesystem::remove(path);
}

TEST(Metadata, RoundTrip) {
  const auto path = metadata_path_for(temp_file("meta.csv"));
  EXPECT_EQ(path.filename().string(), "pcae_test_meta.meta.json");
  write_metadata(path, DatasetMetadata{2, 42, "swiss_roll"});
  const auto m = read_metadata(path);
  EXPECT_EQ(m.intrinsic_dim, 2u);
  EXPECT_EQ(m.seed, 42u);
  EXPECT_EQ(m.generator, "swiss_roll");
  std::filesystem::remove(path);
}
