#include "pcae/trainer.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pcae/error.hpp"
#include "pcae/random.hpp"

namespace pcae {

std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::pcae: return "pcae";
    case LossKind::hae: return "hae";
    case LossKind::recon_only: return "recon-only";
  }
  return "?";
}

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::none: return "none";
    case Ablation::var_only: return "var-only";
    case Ablation::iso_only: return "iso-only";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "pcae") return LossKind::pcae;
  if (name == "hae") return LossKind::hae;
  if (name == "recon-only" || name == "recon_only") return LossKind::recon_only;
  throw PreconditionError("unknown loss '" + std::string(name) + "'");
}

Ablation parse_ablation(std::string_view name) {
  if (name == "none" || name.empty()) return Ablation::none;
  if (name == "var-only" || name == "var_only") return Ablation::var_only;
  if (name == "iso-only" || name == "iso_only") return Ablation::iso_only;
  throw PreconditionError("unknown ablation '" + std::string(name) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool finite(const LossBreakdown& b) {
  return std::isfinite(b.recon) && std::isfinite(b.var) && std::isfinite(b.iso) &&
         std::isfinite(b.total);
}

}  // namespace

TrainResult train(const Matrix& x_train, std::span<const std::size_t> global_idx,
                  const GeodesicIndex* index, const TrainConfig& cfg) {
  const std::size_t n = x_train.cols();
  if (n < 2) throw PreconditionError("train: need at least 2 training samples");
  if (cfg.batch_size < 2) throw PreconditionError("train: batch_size must be at least 2");
  if (cfg.latent_dim == 0) throw PreconditionError("train: latent_dim must be positive");
  if (cfg.beta < 0.0) throw PreconditionError("train: beta must be non-negative");
  if (global_idx.size() != n) throw ShapeError("train: one global index per training column required");

  LossTerms terms;
  if (cfg.loss != LossKind::pcae) terms.var = terms.iso = false;
  if (cfg.ablation == Ablation::var_only) terms.iso = false;
  if (cfg.ablation == Ablation::iso_only) terms.var = false;
  if (terms.iso && index == nullptr) throw PreconditionError("train: isometry term needs a geodesic index");

  std::vector<double> alpha = cfg.hae_alpha;
  if (cfg.loss == LossKind::hae) {
    if (alpha.empty()) alpha.assign(cfg.latent_dim, 1.0);
    if (alpha.size() != cfg.latent_dim) throw ShapeError("train: hae alpha length must equal latent_dim");
  }

  TrainResult res;
  if (cfg.initial_model) {
    res.model = *cfg.initial_model;
    validate_model(res.model);
  } else {
    std::vector<std::size_t> enc{x_train.rows()};
    enc.insert(enc.end(), cfg.hidden.begin(), cfg.hidden.end());
    enc.push_back(cfg.latent_dim);
    std::vector<std::size_t> dec(enc.rbegin(), enc.rend());
    res.model = init_model(enc, dec, cfg.seed);
  }
  if (res.model.input_dim() != x_train.rows() || res.model.latent_dim() != cfg.latent_dim ||
      !res.model.has_decoder())
    throw ShapeError("train: model does not match data dimension / latent_dim");

  GammaSchedule sched = init_gammas(cfg.latent_dim, cfg.threshold, cfg.update_period, cfg.schedule);
  res.report.schedule.push_back({0, 0, sched.gammas});

  AdamState adam = make_adam(res.model, cfg.learning_rate);
  Rng rng = make_rng(cfg.seed, 11);
  MlpModel model = res.model;
  const auto t_start = Clock::now();
  res.report.stop_reason = "completed";

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t_epoch = Clock::now();
    const auto order = permutation(n, rng);
    LossBreakdown sum;
    std::size_t batches = 0;
    bool failed = false;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      if (len < 2) break;
      std::vector<std::size_t> cols(len);
      std::vector<std::size_t> ids(len);
      for (std::size_t c = 0; c < len; ++c) {
        cols[c] = order[start + c];
        ids[c] = global_idx[cols[c]];
      }
      const Matrix xb = x_train.select_cols(cols);

      LossBreakdown b;
      Gradients grads;
      if (cfg.loss == LossKind::hae) {
        auto h = hae_loss_and_grad(model, xb, alpha);
        b.recon = b.total = h.value;
        b.beta = cfg.beta;
        grads = std::move(h.grads);
      } else {
        const ForwardResult fw = forward(model, xb);
        // overflowed codes would trip the loss preconditions before the finiteness check
        if (!all_finite(fw.z) || !all_finite(fw.xhat)) {
          failed = true;
          break;
        }
        PairBatch pairs;
        if (terms.iso) pairs = sample_pairs(ids, *index, rng, cfg.pair_rounds);
        auto l = pcae_loss(xb, fw.z, fw.xhat, pairs, sched.gammas, cfg.beta, cfg.iso_variant, terms);
        b = l.breakdown;
        if (finite(b)) grads = backward(model, fw.cache, l.grad_z, l.grad_xhat);
      }
      if (!finite(b)) {
        failed = true;
        break;
      }
      adam_step(model, grads, adam);
      sum.recon += b.recon;
      sum.var += b.var;
      sum.iso += b.iso;
      ++batches;
    }
    if (!failed) {
      for (double p : get_parameters(model))
        if (!std::isfinite(p)) failed = true;
    }
    if (failed) {
      res.report.numerical_failure = true;
      res.report.stop_reason = "non-finite loss at epoch " + std::to_string(epoch);
      spdlog::error("train: {}; keeping parameters from epoch {}", res.report.stop_reason, res.epoch);
      break;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    const double inv = 1.0 / static_cast<double>(std::max<std::size_t>(batches, 1));
    rec.loss.recon = sum.recon * inv;
    rec.loss.var = sum.var * inv;
    rec.loss.iso = sum.iso * inv;
    rec.loss.beta = cfg.beta;
    rec.loss.total = rec.loss.recon + cfg.beta * (rec.loss.var + rec.loss.iso);
    rec.seconds = seconds_since(t_epoch);

    if (cfg.loss == LossKind::pcae && sched.mode == ScheduleMode::dynamic && should_update(sched, epoch)) {
      sched = update_gammas(sched, latent_variances(model, x_train), epoch);
      res.report.schedule.push_back({epoch, sched.pivot, sched.gammas});
    }
    res.report.epochs.push_back(rec);
    res.model = model;
    res.epoch = epoch;
    if (cfg.on_epoch) cfg.on_epoch(rec);
  }

  res.report.final_variances = latent_variances(res.model, x_train);
  double total_var = 0.0;
  for (double v : res.report.final_variances) total_var += v;
  if (total_var > 0.0) {
    for (double tau : cfg.taus)
      res.report.estimates.push_back(estimate_dim_cumvar(res.report.final_variances, tau, cfg.dim_order));
  } else {
    spdlog::warn("train: all latent variances are zero; no dimension estimate");
  }
  res.report.seconds = seconds_since(t_start);
  return res;
}

}  // namespace pcae
