#include "pcae/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pcae/error.hpp"
#include "pcae/geodesic.hpp"
#include "pcae/linalg.hpp"
#include "pcae/objective.hpp"
#include "pcae/random.hpp"
#include "pcae/scheduler.hpp"

namespace pcae {

void validate_problem(const Matrix& sigma, std::span<const double> gammas) {
  const std::size_t p = sigma.rows();
  if (p == 0 || sigma.cols() != p) throw ShapeError("Sigma must be a non-empty square matrix");
  if (gammas.size() != p)
    throw ShapeError("need " + std::to_string(p) + " weights, got " + std::to_string(gammas.size()));
  for (std::size_t i = 0; i < p; ++i) {
    if (!(gammas[i] >= 0.0)) throw PreconditionError("weights must be non-negative");
    if (i > 0 && !(gammas[i] > gammas[i - 1]))
      throw PreconditionError("weights must be strictly ascending (entries " + std::to_string(i - 1) +
                              " and " + std::to_string(i) + ")");
  }
  const double scale = std::max(1.0, max_abs(sigma));
  if (symmetry_error(sigma) > 1e-9 * scale) throw PreconditionError("Sigma is not symmetric");
  const auto eig = sym_eig(sigma);
  if (eig.values.back() < -1e-10 * scale) throw PreconditionError("Sigma is not positive semidefinite");
}

Theorem1Oracle oracle_theorem1(const Matrix& sigma, std::span<const double> gammas) {
  validate_problem(sigma, gammas);
  auto eig = sym_eig(sigma);
  Theorem1Oracle out;
  for (std::size_t i = 0; i < gammas.size(); ++i) out.value += eig.values[i] * gammas[i];
  out.u_star = std::move(eig.vectors);
  out.eigenvalues = std::move(eig.values);
  return out;
}

namespace {

std::vector<double> column_alignment(const Matrix& u, const Theorem1Oracle& oracle) {
  const std::size_t p = u.cols();
  std::vector<double> align(p, 0.0);
  for (const EigenBlock& b : eigen_blocks(oracle.eigenvalues)) {
    std::vector<std::size_t> cols;
    for (std::size_t c = b.begin; c < b.end; ++c) cols.push_back(c);
    if (cols.size() == 1) {
      const std::size_t c = cols[0];
      align[c] = std::min(1.0, std::abs(dot(u.col(c), oracle.u_star.col(c))));
      continue;
    }
    const auto cosines = principal_cosines(u.select_cols(cols), oracle.u_star.select_cols(cols));
    const double worst = std::min(1.0, *std::min_element(cosines.begin(), cosines.end()));
    for (std::size_t c : cols) align[c] = worst;
  }
  return align;
}

}  // namespace

Theorem1Report solve_stiefel(const StiefelProblem& problem, std::uint64_t seed) {
  const Theorem1Oracle oracle = oracle_theorem1(problem.sigma, problem.gammas);
  const std::size_t p = problem.sigma.rows();
  const Matrix gamma = Matrix::diagonal(problem.gammas);
  const double lambda_max = std::max(oracle.eigenvalues.front(), 0.0);
  const double gamma_max = problem.gammas.back();

  Theorem1Report rep;
  rep.optimal = oracle.value;
  Rng rng = make_rng(seed, 9);
  Matrix u = random_orthonormal(p, p, rng);
  double f = weighted_trace(u, problem.sigma, problem.gammas);
  rep.orthogonality_residual = orthogonality_residual(u);

  if (lambda_max == 0.0 || gamma_max == 0.0) {
    // objective is identically zero
    rep.converged = true;
  } else {
    double eta = problem.initial_step > 0.0 ? problem.initial_step : 1.0 / (2.0 * gamma_max * lambda_max);
    const double min_eta = eta * 1e-12;
    while (rep.iterations < problem.max_iters) {
      ++rep.iterations;
      Matrix grad = matmul(problem.sigma, matmul(u, gamma));
      grad *= 2.0;
      // Tangent projection G - U sym(U^T G). Stepping along the raw gradient and
      // retracting by QR is an ascent direction for ascending weights on square U.
      const Matrix utg = matmul_tn(u, grad);
      Matrix sym = utg + utg.transpose();
      sym *= 0.5;
      grad -= matmul(u, sym);
      Matrix trial = qr_decompose(u - eta * grad).q;
      const double ft = weighted_trace(trial, problem.sigma, problem.gammas);
      if (ft > f) {
        eta *= 0.5;
        if (eta < min_eta) break;
        continue;
      }
      rep.orthogonality_residual = std::max(rep.orthogonality_residual, orthogonality_residual(trial));
      const double decrease = f - ft;
      u = std::move(trial);
      f = ft;
      if (decrease < problem.tol) {
        rep.converged = true;
        break;
      }
    }
  }
  rep.achieved = f;
  rep.gap = f - oracle.value;
  rep.alignment = column_alignment(u, oracle);
  rep.u = std::move(u);
  return rep;
}

namespace {

struct EvalPairs {
  std::vector<std::size_t> a, b;  // dataset columns
  std::vector<double> geo;
  std::vector<double> chart;
};

EvalPairs make_eval_pairs(const Dataset& ds, std::span<const std::size_t> pool,
                          const GeodesicIndex& index, std::size_t count, Rng& rng) {
  EvalPairs ev;
  if (pool.size() < 2) throw PreconditionError("verify_theorem2: held-out split too small");
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  while (ev.a.size() < count) {
    const std::size_t i = pool[pick(rng)];
    const std::size_t j = pool[pick(rng)];
    if (i == j) continue;
    const double d = index.approx_dist(i, j);
    if (d <= 0.0) continue;
    ev.a.push_back(i);
    ev.b.push_back(j);
    ev.geo.push_back(d);
    if (ds.factors) ev.chart.push_back(column_distance(*ds.factors, i, j));
  }
  return ev;
}

std::vector<double> relative_errors(const Matrix& codes, const EvalPairs& ev,
                                    const std::vector<double>& ref) {
  std::vector<double> out(ev.a.size());
  for (std::size_t q = 0; q < ev.a.size(); ++q) {
    const double dhat = column_distance(codes, ev.a[q], ev.b[q]);
    out[q] = std::abs(dhat - ref[q]) / ref[q];
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

Theorem2Report verify_theorem2(const Dataset& manifold, const Theorem2Config& cfg) {
  if (cfg.latent_dim == 0) throw PreconditionError("verify_theorem2: latent_dim must be positive");
  std::vector<double> gammas = cfg.gammas;
  if (gammas.empty()) {
    std::vector<double> pivot_last(cfg.latent_dim, 0.0);
    pivot_last.back() = 1.0;
    gammas = update_gammas(init_gammas(cfg.latent_dim), pivot_last).gammas;
  }
  if (gammas.size() != cfg.latent_dim)
    throw ShapeError("verify_theorem2: gamma count must equal latent_dim");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0)) throw PreconditionError("verify_theorem2: gammas must be positive");
    if (i > 0 && !(gammas[i] > gammas[i - 1]))
      throw PreconditionError("verify_theorem2: gammas must be strictly ascending");
  }
  if (!(gammas.back() < 2.0))
    throw PreconditionError("verify_theorem2: max gamma " + std::to_string(gammas.back()) +
                            " violates the isometry bound gamma < 2");
  if (cfg.batch_size < 2) throw PreconditionError("verify_theorem2: batch_size must be at least 2");

  const Matrix& x = manifold.samples;
  const std::size_t n = x.cols();
  const GeodesicIndex index = build_index(x, cfg.k_neighbors, n, cfg.seed);
  const DatasetSplit parts = split(manifold, SplitSpec{}, cfg.seed);

  MlpModel model;
  if (cfg.initial_model) {
    model = *cfg.initial_model;
    validate_model(model);
    if (model.has_decoder()) throw PreconditionError("verify_theorem2: initial model must be encoder-only");
    if (model.input_dim() != x.rows() || model.latent_dim() != cfg.latent_dim)
      throw ShapeError("verify_theorem2: initial model does not match data/latent_dim");
  } else {
    std::vector<std::size_t> widths{x.rows()};
    widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    widths.push_back(cfg.latent_dim);
    model = init_model(widths, {}, cfg.seed);
  }

  Rng rng = make_rng(cfg.seed, 8);
  const EvalPairs ev = make_eval_pairs(manifold, parts.test_idx, index, cfg.eval_pairs, rng);

  Theorem2Report rep;
  rep.train_size = parts.train_idx.size();
  rep.eval_pair_count = ev.a.size();
  auto evaluate = [&](std::size_t epoch) {
    const Matrix codes = encode(model, x);
    const double m = mean_of(relative_errors(codes, ev, ev.geo));
    rep.curve.emplace_back(epoch, m);
    return m;
  };
  rep.initial_mean_rel_error = evaluate(0);

  AdamState adam = make_adam(model, cfg.learning_rate);
  const std::size_t nt = parts.train_idx.size();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order = permutation(nt, rng);
    for (std::size_t start = 0; start + 1 < nt; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, nt - start);
      if (len < 2) break;
      std::vector<std::size_t> cols(len);
      for (std::size_t c = 0; c < len; ++c) cols[c] = parts.train_idx[order[start + c]];
      const Matrix xb = x.select_cols(cols);
      const ForwardResult fw = forward(model, xb);
      const PairBatch pairs = sample_pairs(cols, index, rng, cfg.pair_rounds);
      auto iso = iso_loss(fw.z, pairs, IsoVariant::abs_sq_diff);
      auto var = weighted_variance_loss(fw.z, gammas);
      if (!std::isfinite(iso.value + var.value))
        throw NumericalError("verify_theorem2: non-finite objective at epoch " + std::to_string(epoch));
      iso.grad += var.grad;
      adam_step(model, backward(model, fw.cache, iso.grad, Matrix()), adam);
    }
    rep.epochs_run = epoch;
    if (cfg.record_every > 0 && epoch % cfg.record_every == 0 && epoch != cfg.epochs) evaluate(epoch);
  }

  const Matrix codes = encode(model, x);
  const auto errs = relative_errors(codes, ev, ev.geo);
  rep.mean_rel_error = mean_of(errs);
  rep.p95_rel_error = percentile(errs, 0.95);
  if (rep.epochs_run > 0) rep.curve.emplace_back(rep.epochs_run, rep.mean_rel_error);
  if (manifold.factors) rep.chart_mean_rel_error = mean_of(relative_errors(codes, ev, ev.chart));
  rep.model = std::move(model);
  return rep;
}

}  // namespace pcae
