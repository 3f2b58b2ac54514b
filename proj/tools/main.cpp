// pcae command-line front end.

#include <iostream>
#include <memory>
#include <optional>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "commands.hpp"
#include "run_config.hpp"

#include <pcae/error.hpp>

using namespace pcae::cli;

namespace {

// Flags that mirror config keys; only the ones given on the command line
// end up in the override patch, so the config file supplies the rest.
class Overrides {
 public:
  template <class T>
  void add(CLI::App* app, const std::string& flag, const std::string& pointer, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    if constexpr (requires { value->begin(); } && !std::is_same_v<T, std::string>) opt->delimiter(',');
    setters_.push_back([opt, value, pointer](json& patch) {
      if (opt->count() > 0) patch[json::json_pointer(pointer)] = *value;
    });
  }

  json patch() const {
    json p = json::object();
    for (const auto& s : setters_) s(p);
    return p;
  }

 private:
  std::vector<std::function<void(json&)>> setters_;
};

struct Common {
  std::string config;
  std::string report;
  Overrides overrides;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON run config (must carry \"version\")");
  app->add_option("--report", c.report, "write the JSON report here instead of stdout");
  c.overrides.add<std::uint64_t>(app, "--seed", "/seed", "random seed");
}

void add_dataset_flags(CLI::App* app, Common& c) {
  auto& o = c.overrides;
  o.add<std::string>(app, "--generator", "/dataset/generator", "swiss_roll | factor_manifold | flat_strip");
  o.add<std::size_t>(app, "--n", "/dataset/n", "sample count");
  o.add<double>(app, "--noise", "/dataset/noise_sd", "ambient Gaussian noise sd");
  o.add<std::size_t>(app, "--d-true", "/dataset/d_true", "factor manifold intrinsic dimension");
  o.add<std::size_t>(app, "--p", "/dataset/p", "factor manifold ambient dimension");
  o.add<std::vector<double>>(app, "--profile", "/dataset/variance_profile", "factor variances, descending");
}

void add_graph_flags(CLI::App* app, Common& c) {
  c.overrides.add<std::size_t>(app, "--k", "/k_neighbors", "kNN graph degree");
  c.overrides.add<std::size_t>(app, "--landmarks", "/landmark_count", "landmark count (0 or >= n: exact)");
}

void add_train_flags(CLI::App* app, Common& c) {
  auto& o = c.overrides;
  o.add<std::vector<std::size_t>>(app, "--hidden", "/hidden", "encoder hidden widths, comma separated");
  o.add<std::size_t>(app, "--latent", "/latent_dim", "bottleneck size");
  o.add<double>(app, "--beta", "/beta", "weight of the variance and isometry terms");
  o.add<std::string>(app, "--iso", "/iso_variant", "abs_sq_diff | square | log_sq");
  o.add<std::size_t>(app, "--epochs", "/epochs", "training epochs");
  o.add<std::size_t>(app, "--batch", "/batch_size", "minibatch size");
  o.add<double>(app, "--lr", "/learning_rate", "Adam learning rate");
  o.add<double>(app, "--threshold", "/scheduler/t", "cumulative variance threshold t");
  o.add<std::size_t>(app, "--period", "/scheduler/K", "epochs between gamma updates");
  o.add<std::string>(app, "--schedule", "/scheduler/mode", "dynamic | arithmetic | geometric");
  o.add<std::string>(app, "--loss", "/loss", "pcae | hae | recon-only");
  o.add<std::string>(app, "--ablate", "/ablation", "none | var-only | iso-only");
  o.add<std::size_t>(app, "--pair-rounds", "/pair_rounds", "isometry pairings per minibatch");
}

void add_tau_flag(CLI::App* app, Common& c) {
  c.overrides.add<std::vector<double>>(app, "--tau", "/taus", "cumulative variance thresholds");
}

RunConfig resolve(const Common& c) { return resolve_config(c.config, c.overrides.patch()); }

void setup_logging(const std::string& level) {
  auto logger = spdlog::stderr_color_mt("pcae");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal-component autoencoder toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // lets --log-level follow the subcommand too
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace | debug | info | warn | error | off");

  Common gen_c, geo_c, train_c, est_c, smooth_c, interp_c, t1_c, t2_c;
  GenDataArgs gen_a;
  BuildGeodesicArgs geo_a;
  TrainArgs train_a;
  EstimateArgs est_a;
  SmoothnessArgs smooth_a;
  InterpolateArgs interp_a;
  Theorem1Args t1_a;
  Theorem2Args t2_a;

  auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset (CSV + .meta.json)");
  add_common(gen, gen_c);
  add_dataset_flags(gen, gen_c);
  gen->add_option("--out", gen_a.out, "output CSV")->required();

  auto* geo = app.add_subcommand("build-geodesic", "build a landmark geodesic index (.geo)");
  add_common(geo, geo_c);
  add_graph_flags(geo, geo_c);
  geo->add_option("--data", geo_a.data, "dataset CSV")->required();
  geo->add_option("--out", geo_a.out, "output .geo")->required();

  auto* tr = app.add_subcommand("train", "train an autoencoder and write a checkpoint");
  add_common(tr, train_c);
  add_train_flags(tr, train_c);
  add_tau_flag(tr, train_c);
  tr->add_option("--data", train_a.data, "dataset CSV")->required();
  tr->add_option("--geo", train_a.geo, "geodesic index built from the same CSV");
  tr->add_option("--out", train_a.out, "output .ckpt")->required();
  tr->add_option("--curve", train_a.curve, "per-epoch loss CSV");

  auto* est = app.add_subcommand("estimate-dim", "cumulative-variance dimension estimate");
  add_common(est, est_c);
  add_tau_flag(est, est_c);
  est->add_option("--checkpoint", est_a.checkpoint, "model .ckpt")->required();
  est->add_option("--data", est_a.data, "dataset CSV")->required();
  est->add_option("--order", est_a.order, "index (ordered latents) | descending (baselines)");

  auto* sm = app.add_subcommand("smoothness", "interpolation smoothness score");
  add_common(sm, smooth_c);
  sm->add_option("--checkpoint", smooth_a.checkpoint, "model .ckpt")->required();
  sm->add_option("--data", smooth_a.data, "dataset CSV")->required();
  sm->add_option("--pairs", smooth_a.pairs, "random pairs N");
  sm->add_option("--steps", smooth_a.steps, "interpolation steps m");
  sm->add_option("--csv", smooth_a.csv, "per-pair variance table");

  auto* ip = app.add_subcommand("interpolate", "decode a latent straight line between two samples");
  add_common(ip, interp_c);
  ip->add_option("--checkpoint", interp_a.checkpoint, "model .ckpt")->required();
  ip->add_option("--data", interp_a.data, "dataset CSV")->required();
  ip->add_option("--from", interp_a.from, "first sample index");
  ip->add_option("--to", interp_a.to, "second sample index");
  ip->add_option("--steps", interp_a.steps, "interpolation steps m");
  ip->add_option("--out", interp_a.out, "decoded path CSV");

  auto* ver = app.add_subcommand("verify", "numerical checks of the two optimality results");
  ver->require_subcommand(1);
  auto* t1 = ver->add_subcommand("theorem1", "weighted trace minimum on the Stiefel manifold");
  add_common(t1, t1_c);
  t1->add_option("--p", t1_a.p, "matrix size");
  t1->add_option("--instances", t1_a.instances, "random instances");
  t1->add_option("--gammas", t1_a.gammas, "fixed weights, strictly ascending")->delimiter(',');
  t1->add_option("--tol", t1_a.tol, "allowed |gap|");
  auto* t2 = ver->add_subcommand("theorem2", "isometry of an encoder trained on the variance + isometry objective");
  add_common(t2, t2_c);
  t2->add_option("--data", t2_a.data, "flat manifold CSV (default: generated strip)");
  t2->add_option("--n", t2_a.n, "generated strip size");
  t2->add_option("--k", t2_a.k, "kNN graph degree");
  t2->add_option("--epochs", t2_a.epochs, "training epochs");
  t2->add_option("--batch", t2_a.batch_size, "minibatch size");
  t2->add_option("--lr", t2_a.learning_rate, "Adam learning rate");
  t2->add_option("--gammas", t2_a.gammas, "variance weights, ascending, all < 2")->delimiter(',');
  t2->add_option("--mean-tol", t2_a.mean_tol, "allowed mean relative error");
  t2->add_option("--p95-tol", t2_a.p95_tol, "allowed 95th percentile relative error");
  t2->add_option("--curve", t2_a.curve, "error curve CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    setup_logging(log_level);
    auto out = [](const Common& c) { return Output{c.report}; };
    if (*gen) return cmd_gen_data(resolve(gen_c), gen_a, out(gen_c));
    if (*geo) return cmd_build_geodesic(resolve(geo_c), geo_a, out(geo_c));
    if (*tr) return cmd_train(resolve(train_c), train_a, out(train_c));
    if (*est) return cmd_estimate_dim(resolve(est_c), est_a, out(est_c));
    if (*sm) return cmd_smoothness(resolve(smooth_c), smooth_a, out(smooth_c));
    if (*ip) return cmd_interpolate(resolve(interp_c), interp_a, out(interp_c));
    if (*t1) return cmd_verify_theorem1(resolve(t1_c), t1_a, out(t1_c));
    if (*t2) return cmd_verify_theorem2(resolve(t2_c), t2_a, out(t2_c));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pcae::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const pcae::Error& e) {
    // preconditions, shapes and unreadable files all trace back to the inputs
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const spdlog::spdlog_ex& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
