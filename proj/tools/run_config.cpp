#include "run_config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include <pcae/objective.hpp>
#include <pcae/scheduler.hpp>
#include <pcae/trainer.hpp>

namespace pcae::cli {

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key)) throw ConfigError("config: unknown key '" + where + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + where + key + "' has the wrong type");
  }
}

}  // namespace

json to_json(const RunConfig& c) {
  return json{
      {"version", c.version},
      {"dataset",
       {{"generator", c.dataset.generator},
        {"n", c.dataset.n},
        {"noise_sd", c.dataset.noise_sd},
        {"d_true", c.dataset.d_true},
        {"p", c.dataset.p},
        {"variance_profile", c.dataset.variance_profile}}},
      {"hidden", c.hidden},
      {"latent_dim", c.latent_dim},
      {"beta", c.beta},
      {"iso_variant", c.iso_variant},
      {"k_neighbors", c.k_neighbors},
      {"landmark_count", c.landmark_count},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"learning_rate", c.learning_rate},
      {"scheduler", {{"t", c.threshold}, {"K", c.period}, {"mode", c.schedule}}},
      {"loss", c.loss},
      {"ablation", c.ablation},
      {"pair_rounds", c.pair_rounds},
      {"taus", c.taus},
      {"seed", c.seed},
  };
}

RunConfig from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  RunConfig c;
  reject_unknown(doc,
                 {"version", "dataset", "hidden", "latent_dim", "beta", "iso_variant", "k_neighbors",
                  "landmark_count", "epochs", "batch_size", "learning_rate", "scheduler", "loss", "ablation",
                  "pair_rounds", "taus", "seed"},
                 "");
  read(doc, "version", c.version, "");
  if (c.version != kConfigVersion)
    throw ConfigError("config: unsupported version " + std::to_string(c.version) + " (expected " +
                      std::to_string(kConfigVersion) + ")");
  if (doc.contains("dataset")) {
    const json& d = doc["dataset"];
    if (!d.is_object()) throw ConfigError("config: 'dataset' must be an object");
    reject_unknown(d, {"generator", "n", "noise_sd", "d_true", "p", "variance_profile"}, "dataset.");
    read(d, "generator", c.dataset.generator, "dataset.");
    read(d, "n", c.dataset.n, "dataset.");
    read(d, "noise_sd", c.dataset.noise_sd, "dataset.");
    read(d, "d_true", c.dataset.d_true, "dataset.");
    read(d, "p", c.dataset.p, "dataset.");
    read(d, "variance_profile", c.dataset.variance_profile, "dataset.");
  }
  read(doc, "hidden", c.hidden, "");
  read(doc, "latent_dim", c.latent_dim, "");
  read(doc, "beta", c.beta, "");
  read(doc, "iso_variant", c.iso_variant, "");
  read(doc, "k_neighbors", c.k_neighbors, "");
  read(doc, "landmark_count", c.landmark_count, "");
  read(doc, "epochs", c.epochs, "");
  read(doc, "batch_size", c.batch_size, "");
  read(doc, "learning_rate", c.learning_rate, "");
  if (doc.contains("scheduler")) {
    const json& s = doc["scheduler"];
    if (!s.is_object()) throw ConfigError("config: 'scheduler' must be an object");
    reject_unknown(s, {"t", "K", "mode"}, "scheduler.");
    read(s, "t", c.threshold, "scheduler.");
    read(s, "K", c.period, "scheduler.");
    read(s, "mode", c.schedule, "scheduler.");
  }
  read(doc, "loss", c.loss, "");
  read(doc, "ablation", c.ablation, "");
  read(doc, "pair_rounds", c.pair_rounds, "");
  read(doc, "taus", c.taus, "");
  read(doc, "seed", c.seed, "");

  // value checks; the enum parsers throw on unknown names
  try {
    parse_iso_variant(c.iso_variant);
    parse_schedule_mode(c.schedule);
    parse_loss_kind(c.loss);
    parse_ablation(c.ablation);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.latent_dim == 0) throw ConfigError("config: latent_dim must be positive");
  if (c.beta < 0.0) throw ConfigError("config: beta must be non-negative");
  if (c.batch_size < 2) throw ConfigError("config: batch_size must be at least 2");
  if (!(c.learning_rate > 0.0)) throw ConfigError("config: learning_rate must be positive");
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw ConfigError("config: scheduler.t must lie in (0, 1)");
  if (c.period == 0) throw ConfigError("config: scheduler.K must be positive");
  if (c.k_neighbors == 0) throw ConfigError("config: k_neighbors must be positive");
  if (c.pair_rounds == 0) throw ConfigError("config: pair_rounds must be positive");
  if (c.taus.empty()) throw ConfigError("config: taus must not be empty");
  for (double t : c.taus)
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("config: every tau must lie in (0, 1)");
  for (std::size_t h : c.hidden)
    if (h == 0) throw ConfigError("config: hidden widths must be positive");
  return c;
}

RunConfig resolve_config(const std::filesystem::path& file, const json& overrides) {
  json doc = to_json(RunConfig{});
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config: cannot open " + file.string());
    json user;
    try {
      user = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config: " + file.string() + ": " + e.what());
    }
    if (!user.is_object()) throw ConfigError("config: top level must be a JSON object");
    if (!user.contains("version")) throw ConfigError("config: missing 'version' field");
    // validate keys before merging so typos are not silently dropped
    from_json(user);
    doc.merge_patch(user);
  }
  doc.merge_patch(overrides);
  return from_json(doc);
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pcae::cli
