#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pcae::cli {

using nlohmann::json;

inline constexpr int kConfigVersion = 1;

/// Bad flags, bad config files, missing inputs: exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  std::string generator = "swiss_roll";  // swiss_roll | factor_manifold | flat_strip
  std::size_t n = 2000;
  double noise_sd = 0.0;
  std::size_t d_true = 4;
  std::size_t p = 16;
  std::vector<double> variance_profile = {4.0, 3.0, 2.0, 1.0};
};

struct RunConfig {
  int version = kConfigVersion;
  DatasetSpec dataset;
  std::vector<std::size_t> hidden = {128, 128};
  std::size_t latent_dim = 16;
  double beta = 5e-3;
  std::string iso_variant = "abs_sq_diff";
  std::size_t k_neighbors = 10;
  std::size_t landmark_count = 1000;
  std::size_t epochs = 100;
  std::size_t batch_size = 256;
  double learning_rate = 1e-4;
  double threshold = 0.99;  // scheduler t
  std::size_t period = 10;  // scheduler K
  std::string schedule = "dynamic";
  std::string loss = "pcae";
  std::string ablation = "none";
  std::size_t pair_rounds = 1;
  std::vector<double> taus = {0.99};
  std::uint64_t seed = 0;
};

json to_json(const RunConfig& cfg);
/// Strict: unknown keys, a wrong version or out-of-range values throw ConfigError.
RunConfig from_json(const json& doc);

/// Defaults, then the file (if any), then flag overrides (a JSON merge patch).
RunConfig resolve_config(const std::filesystem::path& file, const json& overrides);

/// 16 hex digits of FNV-1a over the canonical JSON of the effective config.
std::string config_hash(const RunConfig& cfg);

}  // namespace pcae::cli
