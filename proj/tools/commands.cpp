#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include <spdlog/spdlog.h>

#include <pcae/analysis.hpp>
#include <pcae/checkpoint.hpp>
#include <pcae/datasets.hpp>
#include <pcae/error.hpp>
#include <pcae/geodesic.hpp>
#include <pcae/linalg.hpp>
#include <pcae/random.hpp>
#include <pcae/theory.hpp>
#include <pcae/trainer.hpp>

namespace pcae::cli {

namespace {

void emit(const Output& o, const json& report) {
  if (o.report.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(o.report);
  if (!out) throw IoError("cannot write report " + o.report);
  out << report.dump(2) << "\n";
}

json header(const char* command, const RunConfig& cfg) {
  return json{{"command", command}, {"config", to_json(cfg)}, {"config_hash", config_hash(cfg)}};
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing --") + what);
  if (!std::filesystem::exists(path)) throw ConfigError(std::string(what) + " file not found: " + path);
}

json estimate_json(const DimEstimate& e) {
  return json{{"k", e.k},
              {"tau", e.tau},
              {"variances", e.variance_profile},
              {"cumulative", e.cumulative},
              {"order", e.order == DimOrder::index ? "index" : "descending"}};
}

TrainConfig train_config(const RunConfig& cfg) {
  TrainConfig t;
  t.hidden = cfg.hidden;
  t.latent_dim = cfg.latent_dim;
  t.beta = cfg.beta;
  t.iso_variant = parse_iso_variant(cfg.iso_variant);
  t.epochs = cfg.epochs;
  t.batch_size = cfg.batch_size;
  t.learning_rate = cfg.learning_rate;
  t.threshold = cfg.threshold;
  t.update_period = cfg.period;
  t.schedule = parse_schedule_mode(cfg.schedule);
  t.loss = parse_loss_kind(cfg.loss);
  t.ablation = parse_ablation(cfg.ablation);
  t.pair_rounds = cfg.pair_rounds;
  t.taus = cfg.taus;
  t.seed = cfg.seed;
  return t;
}

MlpModel load_model_for(const std::string& ckpt, const Matrix& x) {
  require_file(ckpt, "checkpoint");
  Checkpoint c = load_checkpoint(ckpt);
  if (c.model.input_dim() != x.rows())
    throw ConfigError("checkpoint expects " + std::to_string(c.model.input_dim()) + " features, data has " +
                      std::to_string(x.rows()));
  return std::move(c.model);
}

Matrix load_data(const std::string& path) {
  require_file(path, "data");
  return read_csv(path);
}

}  // namespace

int cmd_gen_data(const RunConfig& cfg, const GenDataArgs& args, const Output& o) {
  if (args.out.empty()) throw ConfigError("missing --out");
  const DatasetSpec& d = cfg.dataset;
  Dataset ds;
  if (d.generator == "swiss_roll") {
    ds = gen_swiss_roll(d.n, d.noise_sd, cfg.seed);
  } else if (d.generator == "factor_manifold") {
    ds = gen_factor_manifold(d.d_true, d.p, d.n, d.variance_profile, cfg.seed, d.noise_sd);
  } else if (d.generator == "flat_strip") {
    ds = gen_flat_strip(d.n, cfg.seed);
  } else {
    throw ConfigError("unknown generator '" + d.generator + "' (swiss_roll, factor_manifold, flat_strip)");
  }
  write_csv(args.out, ds.samples);
  DatasetMetadata meta;
  meta.intrinsic_dim = ds.intrinsic_dim;
  meta.seed = cfg.seed;
  meta.generator = ds.generator;
  write_metadata(metadata_path_for(args.out), meta);

  json r = header("gen-data", cfg);
  r["csv"] = args.out;
  r["metadata"] = metadata_path_for(args.out).string();
  r["n"] = ds.size();
  r["ambient_dim"] = ds.ambient_dim();
  r["intrinsic_dim"] = ds.intrinsic_dim ? json(*ds.intrinsic_dim) : json(nullptr);
  emit(o, r);
  return kExitOk;
}

int cmd_build_geodesic(const RunConfig& cfg, const BuildGeodesicArgs& args, const Output& o) {
  if (args.out.empty()) throw ConfigError("missing --out");
  const Matrix x = load_data(args.data);
  std::size_t landmarks = cfg.landmark_count;
  if (landmarks == 0 || landmarks > x.cols()) {
    spdlog::info("build-geodesic: {} landmarks requested for {} points; using exact mode", landmarks, x.cols());
    landmarks = x.cols();
  }
  const GeodesicIndex index = build_index(x, cfg.k_neighbors, landmarks, cfg.seed);
  save_index(args.out, index);

  json r = header("build-geodesic", cfg);
  r["data"] = args.data;
  r["geo"] = args.out;
  r["n"] = index.n;
  r["k"] = index.k;
  r["landmarks"] = index.landmarks.size();
  r["exact"] = index.exact();
  r["repair_edges"] = index.repair_count;
  r["covering_radius"] = index.covering_radius;
  emit(o, r);
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, const TrainArgs& args, const Output& o) {
  if (args.out.empty()) throw ConfigError("missing --out");
  const Matrix x = load_data(args.data);
  TrainConfig tc = train_config(cfg);

  const bool needs_index = tc.loss == LossKind::pcae && tc.ablation != Ablation::var_only && tc.beta > 0.0;
  std::optional<GeodesicIndex> index;
  if (needs_index || !args.geo.empty()) {
    require_file(args.geo, "geo");
    index = load_index(args.geo);
    if (index->n != x.cols())
      throw ConfigError("geodesic index covers " + std::to_string(index->n) + " points, data has " +
                        std::to_string(x.cols()));
  }

  Dataset ds;
  ds.samples = x;
  const DatasetSplit parts = split(ds, SplitSpec{}, cfg.seed);

  std::ofstream curve;
  if (!args.curve.empty()) {
    curve.open(args.curve);
    if (!curve) throw IoError("cannot write " + args.curve);
    curve << "epoch,recon,var,iso,beta,total,seconds\n";
    curve.precision(17);
  }
  tc.on_epoch = [&](const EpochRecord& e) {
    spdlog::info("epoch {:>4}  total {:.6g}  recon {:.6g}  var {:.6g}  iso {:.6g}  ({:.2f}s)", e.epoch,
                 e.loss.total, e.loss.recon, e.loss.var, e.loss.iso, e.seconds);
    if (curve.is_open())
      curve << e.epoch << ',' << e.loss.recon << ',' << e.loss.var << ',' << e.loss.iso << ',' << e.loss.beta << ','
            << e.loss.total << ',' << e.seconds << '\n';
  };

  const TrainResult res = train(parts.train.samples, parts.train_idx, index ? &*index : nullptr, tc);
  save_checkpoint(args.out, res.model, res.epoch);

  json r = header("train", cfg);
  r["data"] = args.data;
  r["checkpoint"] = args.out;
  r["train_size"] = parts.train.size();
  json epochs = json::array();
  for (const auto& e : res.report.epochs)
    epochs.push_back({{"epoch", e.epoch},
                      {"recon", e.loss.recon},
                      {"var", e.loss.var},
                      {"iso", e.loss.iso},
                      {"beta", e.loss.beta},
                      {"total", e.loss.total},
                      {"seconds", e.seconds}});
  r["epochs"] = std::move(epochs);
  json sched = json::array();
  for (const auto& s : res.report.schedule)
    sched.push_back({{"epoch", s.epoch}, {"pivot", s.pivot}, {"gammas", s.gammas}});
  r["schedule"] = std::move(sched);
  r["final_variances"] = res.report.final_variances;
  json est = json::array();
  for (const auto& e : res.report.estimates) est.push_back(estimate_json(e));
  r["estimates"] = std::move(est);
  r["seconds"] = res.report.seconds;
  r["epochs_completed"] = res.epoch;
  r["stop_reason"] = res.report.stop_reason;
  r["numerical_failure"] = res.report.numerical_failure;
  emit(o, r);
  if (res.report.numerical_failure) {
    spdlog::error("train: stopped early ({}); checkpoint holds epoch {}", res.report.stop_reason, res.epoch);
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_estimate_dim(const RunConfig& cfg, const EstimateArgs& args, const Output& o) {
  const Matrix x = load_data(args.data);
  const MlpModel model = load_model_for(args.checkpoint, x);
  DimOrder order;
  if (args.order == "index") order = DimOrder::index;
  else if (args.order == "descending") order = DimOrder::descending;
  else throw ConfigError("--order must be index or descending");

  const auto variances = latent_variances(model, x);
  double total = 0.0;
  for (double v : variances) total += v;
  if (!(total > 0.0)) throw NumericalError("estimate-dim: all-zero variances; the encoder output is constant");

  json r = header("estimate-dim", cfg);
  r["checkpoint"] = args.checkpoint;
  r["data"] = args.data;
  json est = json::array();
  for (double tau : cfg.taus) est.push_back(estimate_json(estimate_dim_cumvar(variances, tau, order)));
  r["estimates"] = std::move(est);
  emit(o, r);
  return kExitOk;
}

int cmd_smoothness(const RunConfig& cfg, const SmoothnessArgs& args, const Output& o) {
  const Matrix x = load_data(args.data);
  const MlpModel model = load_model_for(args.checkpoint, x);
  if (!model.has_decoder()) throw ConfigError("smoothness needs a checkpoint with a decoder");
  const SmoothnessReport rep = smoothness(model, x, args.pairs, args.steps, cfg.seed);
  if (!std::isfinite(rep.score)) throw NumericalError("smoothness: non-finite score");

  if (!args.csv.empty()) {
    std::ofstream out(args.csv);
    if (!out) throw IoError("cannot write " + args.csv);
    out.precision(17);
    out << "pair,a,b,variance\n";
    for (std::size_t q = 0; q < rep.pairs.size(); ++q)
      out << q << ',' << rep.pairs[q].first << ',' << rep.pairs[q].second << ',' << rep.per_pair[q] << '\n';
  }
  json r = header("smoothness", cfg);
  r["checkpoint"] = args.checkpoint;
  r["data"] = args.data;
  r["score"] = rep.score;
  r["pairs"] = rep.pair_count;
  r["steps"] = rep.steps;
  emit(o, r);
  return kExitOk;
}

int cmd_interpolate(const RunConfig& cfg, const InterpolateArgs& args, const Output& o) {
  const Matrix x = load_data(args.data);
  const MlpModel model = load_model_for(args.checkpoint, x);
  if (!model.has_decoder()) throw ConfigError("interpolate needs a checkpoint with a decoder");
  if (args.from >= x.cols() || args.to >= x.cols())
    throw ConfigError("sample index out of range (n = " + std::to_string(x.cols()) + ")");

  const std::vector<std::size_t> ends{args.from, args.to};
  const Matrix z = encode(model, x.select_cols(ends));
  const auto path = interpolate(z.col(0), z.col(1), args.steps);
  Matrix codes(z.rows(), path.size());
  for (std::size_t t = 0; t < path.size(); ++t) codes.set_col(t, path[t]);
  const Matrix decoded = decode(model, codes);
  if (!all_finite(decoded)) throw NumericalError("interpolate: non-finite decoded values");
  if (!args.out.empty()) write_csv(args.out, decoded);

  std::vector<double> dists;
  for (std::size_t t = 1; t < decoded.cols(); ++t) {
    double s = 0.0;
    for (std::size_t r = 0; r < decoded.rows(); ++r) s += std::pow(decoded(r, t) - decoded(r, t - 1), 2);
    dists.push_back(std::sqrt(s));
  }
  json r = header("interpolate", cfg);
  r["from"] = args.from;
  r["to"] = args.to;
  r["codes"] = path;
  r["step_distances"] = dists;
  if (!args.out.empty()) r["decoded_csv"] = args.out;
  emit(o, r);
  return kExitOk;
}

int cmd_verify_theorem1(const RunConfig& cfg, const Theorem1Args& args, const Output& o) {
  if (args.p == 0) throw ConfigError("--p must be positive");
  if (!args.gammas.empty() && args.gammas.size() != args.p)
    throw ConfigError("--gammas needs exactly p = " + std::to_string(args.p) + " values");
  Rng rng = make_rng(cfg.seed, 12);
  std::uniform_real_distribution<double> u(0.05, 1.95);
  json runs = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < args.instances; ++i) {
    StiefelProblem prob;
    prob.sigma = random_psd(args.p, rng);
    prob.gammas = args.gammas;
    if (prob.gammas.empty()) {
      prob.gammas.resize(args.p);
      for (double& g : prob.gammas) g = u(rng);
      std::sort(prob.gammas.begin(), prob.gammas.end());
    }
    const auto rep = solve_stiefel(prob, cfg.seed + i);
    const double worst_align = *std::min_element(rep.alignment.begin(), rep.alignment.end());
    const bool pass = std::abs(rep.gap) < args.tol && worst_align >= args.min_alignment;
    ok = ok && pass;
    runs.push_back({{"instance", i},
                    {"achieved", rep.achieved},
                    {"optimal", rep.optimal},
                    {"gap", rep.gap},
                    {"alignment", rep.alignment},
                    {"orthogonality_residual", rep.orthogonality_residual},
                    {"iterations", rep.iterations},
                    {"converged", rep.converged},
                    {"pass", pass}});
  }
  json r = header("verify theorem1", cfg);
  r["p"] = args.p;
  r["tolerance"] = args.tol;
  r["instances"] = std::move(runs);
  r["pass"] = ok;
  emit(o, r);
  return ok ? kExitOk : kExitTolerance;
}

int cmd_verify_theorem2(const RunConfig& cfg, const Theorem2Args& args, const Output& o) {
  Dataset ds;
  if (args.data.empty()) {
    ds = gen_flat_strip(args.n, cfg.seed);
  } else {
    ds.samples = load_data(args.data);
  }
  Theorem2Config tc;
  tc.k_neighbors = args.k;
  tc.epochs = args.epochs;
  tc.batch_size = args.batch_size;
  tc.learning_rate = args.learning_rate;
  tc.gammas = args.gammas;
  tc.seed = cfg.seed;
  const auto rep = verify_theorem2(ds, tc);
  if (!args.curve.empty()) {
    std::ofstream out(args.curve);
    if (!out) throw IoError("cannot write " + args.curve);
    out.precision(17);
    out << "epoch,mean_rel_error\n";
    for (const auto& [e, v] : rep.curve) out << e << ',' << v << '\n';
  }
  const bool ok = rep.mean_rel_error <= args.mean_tol && rep.p95_rel_error <= args.p95_tol;
  json r = header("verify theorem2", cfg);
  r["mean_rel_error"] = rep.mean_rel_error;
  r["p95_rel_error"] = rep.p95_rel_error;
  r["initial_mean_rel_error"] = rep.initial_mean_rel_error;
  r["chart_mean_rel_error"] = rep.chart_mean_rel_error ? json(*rep.chart_mean_rel_error) : json(nullptr);
  r["epochs"] = rep.epochs_run;
  r["train_size"] = rep.train_size;
  r["eval_pairs"] = rep.eval_pair_count;
  r["tolerance"] = {{"mean", args.mean_tol}, {"p95", args.p95_tol}};
  r["pass"] = ok;
  emit(o, r);
  return ok ? kExitOk : kExitTolerance;
}

}  // namespace pcae::cli
