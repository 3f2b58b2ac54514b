#include "pcae/scheduler.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <string>

#include "pcae/error.hpp"

namespace pcae {

std::string_view to_string(ScheduleMode m) {
  switch (m) {
    case ScheduleMode::dynamic: return "dynamic";
    case ScheduleMode::arithmetic: return "arithmetic";
    case ScheduleMode::geometric: return "geometric";
  }
  return "?";
}

ScheduleMode parse_schedule_mode(std::string_view name) {
  if (name == "dynamic") return ScheduleMode::dynamic;
  if (name == "arithmetic") return ScheduleMode::arithmetic;
  if (name == "geometric") return ScheduleMode::geometric;
  throw PreconditionError("unknown schedule mode '" + std::string(name) + "'");
}

GammaSchedule init_gammas(std::size_t d_latent, double threshold, std::size_t period,
                          ScheduleMode mode) {
  if (d_latent == 0) throw PreconditionError("init_gammas: latent dimension must be at least 1");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw PreconditionError("init_gammas: threshold must lie in (0, 1)");
  if (period == 0) throw PreconditionError("init_gammas: update period must be positive");
  GammaSchedule s;
  s.threshold = threshold;
  s.period = period;
  s.mode = mode;
  s.gammas.resize(d_latent);
  const double d = static_cast<double>(d_latent);
  for (std::size_t i = 1; i <= d_latent; ++i) {
    if (mode == ScheduleMode::geometric && d_latent > 1) {
      const double lo = 1.9 / d;
      s.gammas[i - 1] = lo * std::pow(1.9 / lo, static_cast<double>(i - 1) / (d - 1.0));
    } else {
      s.gammas[i - 1] = 1.9 * static_cast<double>(i) / d;
    }
  }
  return s;
}

std::size_t pivot_index(std::span<const double> variances, double threshold) {
  double total = 0.0;
  for (double v : variances) {
    if (!(v >= 0.0)) throw PreconditionError("pivot_index: variances must be non-negative");
    total += v;
  }
  if (total == 0.0) return 0;
  const double target = threshold * total;
  double cum = 0.0;
  for (std::size_t j = 0; j < variances.size(); ++j) {
    cum += variances[j];
    if (cum > target) return j + 1;
  }
  return variances.size();
}

GammaSchedule update_gammas(const GammaSchedule& sched, std::span<const double> variances,
                            std::size_t epoch) {
  const std::size_t d = sched.gammas.size();
  if (variances.size() != d)
    throw ShapeError("update_gammas: " + std::to_string(variances.size()) + " variances for " +
                     std::to_string(d) + " gammas");
  GammaSchedule out = sched;
  out.last_update_epoch = epoch;
  if (sched.mode != ScheduleMode::dynamic) return out;
  const std::size_t j = pivot_index(variances, sched.threshold);
  if (j == 0) {
    spdlog::warn("update_gammas: all latent variances are zero; schedule left unchanged");
    return out;
  }
  out.pivot = j;
  for (std::size_t i = 1; i <= d; ++i) {
    double g = 1.0;
    if (i < j) {
      g = 0.5 * static_cast<double>(i) / static_cast<double>(j - 1);
    } else if (i > j) {
      g = 1.0 + 0.5 * static_cast<double>(i - j) / static_cast<double>(d - j);
    }
    out.gammas[i - 1] = g;
  }
  return out;
}

bool should_update(const GammaSchedule& sched, std::size_t epoch) {
  return epoch >= sched.last_update_epoch && epoch - sched.last_update_epoch >= sched.period;
}

}  // namespace pcae
