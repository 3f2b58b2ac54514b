#include "pcae/random.hpp"

#include <algorithm>
#include <numeric>

namespace pcae {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return Rng(z);
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng, double sd) {
  std::normal_distribution<double> normal(0.0, sd);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = normal(rng);
  return m;
}

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Fisher-Yates with an explicit uniform draw; std::shuffle's sequence is
  // implementation-defined.
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  return idx;
}

}  // namespace pcae
