#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "pcae/matrix.hpp"

namespace pcae {

struct Edge {
  std::size_t to;
  double length;
};

/// Edge added to join two connected components.
struct RepairEdge {
  std::size_t u;
  std::size_t v;
  double length;
};

/// Symmetric k-nearest-neighbour graph with Euclidean edge lengths.
/// Connected by construction: disconnected components are joined by their
/// shortest inter-component edges, which are also listed in `repairs`.
struct KnnGraph {
  std::size_t node_count = 0;
  std::vector<std::vector<Edge>> adjacency;
  std::vector<RepairEdge> repairs;
};

/// Links every column of X (p x n) to its k nearest neighbours, symmetrizes
/// by union, then repairs connectivity.
KnnGraph build_knn_graph(const Matrix& x, std::size_t k);

/// Dijkstra from `source`. Throws NumericalError if any node is unreachable.
std::vector<double> shortest_paths_from(const KnnGraph& graph, std::size_t source);

/// Landmark geodesic table. Graph distances are computed once between
/// landmarks; any pair of points is answered through their nearest landmarks.
struct GeodesicIndex {
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> landmarks;    // dataset column of each landmark
  Matrix landmark_dists;                 // |landmarks| x |landmarks|
  std::vector<std::size_t> assignment;   // per point: position in `landmarks`
  std::size_t repair_count = 0;
  double covering_radius = 0.0;          // max Euclidean point-to-landmark distance

  bool exact() const { return landmarks.size() == n; }
  /// landmark_dists[assignment[i]][assignment[j]], 0 when they coincide.
  double approx_dist(std::size_t i, std::size_t j) const;
};

/// Landmarks by Euclidean farthest-point sampling from a seeded random start;
/// per-landmark shortest paths run in parallel (PCAE_THREADS).
GeodesicIndex build_index(const Matrix& x, std::size_t k, std::size_t landmark_count,
                          std::uint64_t seed);

/// `.geo` layout: "PCAEGEO\n", u64 header length, JSON header, float32
/// landmark matrix (row-major), u64 assignment array; all little-endian.
void save_index(const std::filesystem::path& path, const GeodesicIndex& index);
GeodesicIndex load_index(const std::filesystem::path& path);

}  // namespace pcae
