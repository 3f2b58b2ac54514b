#include "pcae/analysis.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <string>

#include "pcae/error.hpp"
#include "pcae/parallel.hpp"
#include "pcae/random.hpp"

namespace pcae {

std::vector<double> row_variances(const Matrix& z) {
  if (z.cols() < 2) throw PreconditionError("variances need at least 2 samples");
  const double n = static_cast<double>(z.cols());
  std::vector<double> out(z.rows());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const auto row = z.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= n;
    double s = 0.0;
    for (double v : row) s += (v - mean) * (v - mean);
    out[r] = s / n;
  }
  return out;
}

std::vector<double> latent_variances(const MlpModel& model, const Matrix& x) {
  if (x.cols() < 2) throw PreconditionError("latent_variances: need at least 2 samples");
  return row_variances(encode(model, x));
}

DimEstimate estimate_dim_cumvar(std::span<const double> variances, double tau, DimOrder order) {
  if (!(tau > 0.0 && tau < 1.0)) throw PreconditionError("estimate_dim_cumvar: tau must lie in (0, 1)");
  if (variances.empty()) throw PreconditionError("estimate_dim_cumvar: no variances");
  DimEstimate est;
  est.tau = tau;
  est.order = order;
  est.variance_profile.assign(variances.begin(), variances.end());
  for (double v : est.variance_profile)
    if (!(v >= 0.0)) throw PreconditionError("estimate_dim_cumvar: variances must be non-negative");
  if (order == DimOrder::descending)
    std::stable_sort(est.variance_profile.begin(), est.variance_profile.end(), std::greater<>());
  est.cumulative.resize(est.variance_profile.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < est.variance_profile.size(); ++i) {
    cum += est.variance_profile[i];
    est.cumulative[i] = cum;
  }
  const double total = est.cumulative.back();
  if (total == 0.0) throw PreconditionError("estimate_dim_cumvar: all-zero variances");
  est.k = est.cumulative.size();
  for (std::size_t i = 0; i < est.cumulative.size(); ++i) {
    if (est.cumulative[i] / total >= tau - 1e-12) {
      est.k = i + 1;
      break;
    }
  }
  return est;
}

double mle_dim(const Matrix& x, std::size_t k_neighbors) {
  const std::size_t n = x.cols();
  if (k_neighbors < 3) throw PreconditionError("mle_dim: k_neighbors must be at least 3");
  if (n <= k_neighbors) throw PreconditionError("mle_dim: need more points than neighbours");
  const Matrix xt = x.transpose();
  const std::size_t p = x.rows();
  std::vector<double> inverse(n, 0.0);
  std::vector<char> usable(n, 0);
  std::atomic<std::size_t> dropped{0};
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> d2;
    d2.reserve(n - 1);
    const auto a = xt.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto b = xt.row(j);
      double s = 0.0;
      for (std::size_t r = 0; r < p; ++r) s += (a[r] - b[r]) * (a[r] - b[r]);
      d2.push_back(s);
    }
    std::partial_sort(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(k_neighbors), d2.end());
    const double tk = std::sqrt(d2[k_neighbors - 1]);
    if (tk == 0.0) {
      dropped += k_neighbors - 1;
      return;
    }
    double s = 0.0;
    std::size_t used = 0;
    for (std::size_t j = 0; j + 1 < k_neighbors; ++j) {
      const double tj = std::sqrt(d2[j]);
      if (tj == 0.0) {
        ++dropped;
        continue;
      }
      s += std::log(tk / tj);
      ++used;
    }
    if (used == 0) return;
    inverse[i] = s / static_cast<double>(used);
    usable[i] = 1;
  });
  if (dropped > 0)
    spdlog::warn("mle_dim: ignored {} zero-distance neighbour(s) from duplicate points",
                 dropped.load());
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!usable[i]) continue;
    sum += inverse[i];
    ++count;
  }
  if (count == 0 || sum <= 0.0) throw NumericalError("mle_dim: no usable neighbourhoods");
  return static_cast<double>(count) / sum;
}

std::vector<std::vector<double>> interpolate(std::span<const double> z_a,
                                             std::span<const double> z_b, std::size_t m) {
  if (m < 1) throw PreconditionError("interpolate: m must be at least 1");
  if (z_a.size() != z_b.size()) throw ShapeError("interpolate: endpoint lengths differ");
  std::vector<std::vector<double>> out(m + 1, std::vector<double>(z_a.size()));
  const double md = static_cast<double>(m);
  for (std::size_t t = 0; t <= m; ++t) {
    const double w = static_cast<double>(t) / md;
    for (std::size_t r = 0; r < z_a.size(); ++r) {
      out[t][r] = t == 0 ? z_a[r] : (t == m ? z_b[r] : z_a[r] + w * (z_b[r] - z_a[r]));
    }
  }
  return out;
}

SmoothnessReport smoothness(const MlpModel& model, const Matrix& x,
                            std::span<const std::pair<std::size_t, std::size_t>> pairs,
                            std::size_t m) {
  if (x.cols() < 2) throw PreconditionError("smoothness: need at least 2 samples");
  if (pairs.empty()) throw PreconditionError("smoothness: need at least one pair");
  if (m < 2) throw PreconditionError("smoothness: m must be at least 2");
  for (const auto& [a, b] : pairs)
    if (a >= x.cols() || b >= x.cols()) throw PreconditionError("smoothness: pair index out of range");

  SmoothnessReport rep;
  rep.pair_count = pairs.size();
  rep.steps = m;
  rep.pairs.assign(pairs.begin(), pairs.end());
  rep.per_pair.assign(pairs.size(), 0.0);
  parallel_for(pairs.size(), [&](std::size_t q) {
    const auto [a, b] = pairs[q];
    const std::size_t ia[2] = {a, b};
    const Matrix ends = encode(model, x.select_cols(ia));
    const auto path = interpolate(ends.col(0), ends.col(1), m);
    Matrix codes(ends.rows(), m + 1);
    for (std::size_t t = 0; t <= m; ++t) codes.set_col(t, path[t]);
    const Matrix decoded = decode(model, codes);
    std::vector<double> steps(m);
    double mean = 0.0;
    for (std::size_t t = 1; t <= m; ++t) {
      steps[t - 1] = column_distance(decoded, t, t - 1);
      mean += steps[t - 1];
    }
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (double s : steps) var += (s - mean) * (s - mean);
    rep.per_pair[q] = var / static_cast<double>(m);
  });
  double total = 0.0;
  for (double v : rep.per_pair) total += v;
  rep.score = total / static_cast<double>(rep.per_pair.size());
  return rep;
}

SmoothnessReport smoothness(const MlpModel& model, const Matrix& x, std::size_t n_pairs,
                            std::size_t m, std::uint64_t seed) {
  if (x.cols() < 2) throw PreconditionError("smoothness: need at least 2 samples");
  if (n_pairs < 1) throw PreconditionError("smoothness: need at least one pair");
  Rng rng = make_rng(seed, 7);
  std::uniform_int_distribution<std::size_t> pick(0, x.cols() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs(n_pairs);
  for (auto& [a, b] : pairs) {
    a = pick(rng);
    do {
      b = pick(rng);
    } while (b == a);
  }
  return smoothness(model, x, pairs, m);
}

}  // namespace pcae
