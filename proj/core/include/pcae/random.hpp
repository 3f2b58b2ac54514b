#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "pcae/matrix.hpp"

namespace pcae {

using Rng = std::mt19937_64;

/// Independent stream derived from a base seed and a stream tag, so that
/// e.g. weight init and minibatch shuffling never share a generator.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng, double sd = 1.0);

/// Uniformly random permutation of 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, Rng& rng);

}  // namespace pcae
