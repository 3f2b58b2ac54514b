#pragma once

#include <cstddef>
#include <filesystem>

#include "pcae/network.hpp"

namespace pcae {

struct Checkpoint {
  MlpModel model;
  std::size_t epoch = 0;
};

/// Magic line, u64 LE manifest length, JSON manifest (widths, activations,
/// seed, epoch, parameter_count), then float64 LE parameters in declaration
/// order (see get_parameters).
void save_checkpoint(const std::filesystem::path& path, const MlpModel& model, std::size_t epoch);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pcae
