#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcae/analysis.hpp"
#include "pcae/geodesic.hpp"
#include "pcae/matrix.hpp"
#include "pcae/network.hpp"
#include "pcae/objective.hpp"
#include "pcae/scheduler.hpp"

namespace pcae {

enum class LossKind { pcae, hae, recon_only };
enum class Ablation { none, var_only, iso_only };

std::string_view to_string(LossKind k);
std::string_view to_string(Ablation a);
LossKind parse_loss_kind(std::string_view name);
Ablation parse_ablation(std::string_view name);

struct EpochRecord {
  std::size_t epoch = 0;
  LossBreakdown loss;  // batch means
  double seconds = 0.0;
};

struct ScheduleSnapshot {
  std::size_t epoch = 0;
  std::size_t pivot = 0;  // 0 for the initial schedule
  std::vector<double> gammas;
};

struct TrainConfig {
  std::vector<std::size_t> hidden = {128, 128};
  std::size_t latent_dim = 16;
  double beta = 5e-3;
  IsoVariant iso_variant = IsoVariant::abs_sq_diff;
  std::size_t epochs = 100;
  std::size_t batch_size = 256;
  double learning_rate = 1e-4;
  double threshold = 0.99;
  std::size_t update_period = 10;
  ScheduleMode schedule = ScheduleMode::dynamic;
  LossKind loss = LossKind::pcae;
  Ablation ablation = Ablation::none;
  std::size_t pair_rounds = 1;
  std::vector<double> hae_alpha;  // empty: all ones
  std::vector<double> taus = {0.99};
  DimOrder dim_order = DimOrder::index;
  std::uint64_t seed = 0;
  std::optional<MlpModel> initial_model;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::vector<ScheduleSnapshot> schedule;
  std::vector<double> final_variances;
  std::vector<DimEstimate> estimates;
  double seconds = 0.0;
  std::string stop_reason;  // "completed" or why training stopped early
  bool numerical_failure = false;
};

struct TrainResult {
  MlpModel model;  // last parameters with a finite loss
  std::size_t epoch = 0;
  TrainReport report;
};

/// Adam training of the chosen objective on the columns of x_train.
/// global_idx[c] is column c's id in `index` (needed by the isometry term;
/// `index` may be null when no isometry term is active). Gammas follow the
/// schedule, updated from full-training-set latent variances; Adam moments
/// are kept across updates. A non-finite loss stops training and returns the
/// last finite model with numerical_failure set.
TrainResult train(const Matrix& x_train, std::span<const std::size_t> global_idx,
                  const GeodesicIndex* index, const TrainConfig& config);

}  // namespace pcae
