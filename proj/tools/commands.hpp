#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace pcae::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitTolerance = 4;

/// Where a command writes its JSON report; empty means stdout.
struct Output {
  std::string report;
};

struct GenDataArgs {
  std::string out;
};
int cmd_gen_data(const RunConfig& cfg, const GenDataArgs& args, const Output& o);

struct BuildGeodesicArgs {
  std::string data;
  std::string out;
};
int cmd_build_geodesic(const RunConfig& cfg, const BuildGeodesicArgs& args, const Output& o);

struct TrainArgs {
  std::string data;
  std::string geo;
  std::string out;
  std::string curve;  // optional per-epoch CSV
};
int cmd_train(const RunConfig& cfg, const TrainArgs& args, const Output& o);

struct EstimateArgs {
  std::string checkpoint;
  std::string data;
  std::string order = "index";
};
int cmd_estimate_dim(const RunConfig& cfg, const EstimateArgs& args, const Output& o);

struct SmoothnessArgs {
  std::string checkpoint;
  std::string data;
  std::size_t pairs = 100;
  std::size_t steps = 10;
  std::string csv;  // optional per-pair table
};
int cmd_smoothness(const RunConfig& cfg, const SmoothnessArgs& args, const Output& o);

struct InterpolateArgs {
  std::string checkpoint;
  std::string data;
  std::size_t from = 0;
  std::size_t to = 1;
  std::size_t steps = 10;
  std::string out;  // decoded path as a dataset CSV
};
int cmd_interpolate(const RunConfig& cfg, const InterpolateArgs& args, const Output& o);

struct Theorem1Args {
  std::size_t p = 4;
  std::size_t instances = 10;
  std::vector<double> gammas;  // empty: random ascending weights per instance
  double tol = 1e-6;
  double min_alignment = 0.999;
};
int cmd_verify_theorem1(const RunConfig& cfg, const Theorem1Args& args, const Output& o);

struct Theorem2Args {
  std::string data;  // empty: generated flat strip
  std::size_t n = 1000;
  std::size_t k = 20;
  std::size_t epochs = 2000;
  std::size_t batch_size = 128;
  double learning_rate = 1e-4;
  std::vector<double> gammas;
  double mean_tol = 0.05;
  double p95_tol = 0.12;
  std::string curve;
};
int cmd_verify_theorem2(const RunConfig& cfg, const Theorem2Args& args, const Output& o);

}  // namespace pcae::cli
