#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace pcae {

enum class ScheduleMode {
  dynamic,     // periodic piecewise reweighting around the variance pivot
  arithmetic,  // fixed 1.9 i / d, never updated
  geometric,   // fixed geometric progression from 1.9 / d to 1.9, never updated
};

std::string_view to_string(ScheduleMode m);
ScheduleMode parse_schedule_mode(std::string_view name);

struct GammaSchedule {
  std::vector<double> gammas;
  double threshold = 0.99;
  std::size_t period = 10;
  std::size_t last_update_epoch = 0;
  std::size_t pivot = 0;  // 1-based j of the latest update, 0 before any update
  ScheduleMode mode = ScheduleMode::dynamic;
};

/// gamma_i = 1.9 i / d for i = 1..d.
GammaSchedule init_gammas(std::size_t d_latent, double threshold = 0.99, std::size_t period = 10,
                          ScheduleMode mode = ScheduleMode::dynamic);

/// Smallest 1-based j with sum_{i<=j} var_i > t * sum var_i. Returns 0 when all
/// variances are zero.
std::size_t pivot_index(std::span<const double> variances, double threshold);

/// Piecewise reweighting: 0.5 i / (j - 1) below the pivot, 1 at it, and
/// 1 + 0.5 (i - j) / (d - j) above it. All-zero variances leave the schedule
/// unchanged (with a warning). Static modes are never changed.
GammaSchedule update_gammas(const GammaSchedule& sched, std::span<const double> variances,
                            std::size_t epoch = 0);

/// epoch - last_update_epoch >= period.
bool should_update(const GammaSchedule& sched, std::size_t epoch);

}  // namespace pcae
