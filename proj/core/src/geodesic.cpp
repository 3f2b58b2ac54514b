#include "pcae/geodesic.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>

#include "binary_io.hpp"
#include "pcae/error.hpp"
#include "pcae/parallel.hpp"
#include "pcae/random.hpp"

namespace pcae {

using detail::get_le;
using detail::put_le;

namespace {

constexpr char kGeoMagic[8] = {'P', 'C', 'A', 'E', 'G', 'E', 'O', '\n'};

double squared_distance(const Matrix& xt, std::size_t i, std::size_t j) {
  // xt is n x p (sample-major) so each sample is contiguous
  const auto a = xt.row(i);
  const auto b = xt.row(j);
  double s = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double d = a[r] - b[r];
    s += d * d;
  }
  return s;
}

std::vector<std::size_t> component_labels(const KnnGraph& g, std::size_t& count) {
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(g.node_count, kUnset);
  count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < g.node_count; ++s) {
    if (label[s] != kUnset) continue;
    label[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const Edge& e : g.adjacency[u]) {
        if (label[e.to] == kUnset) {
          label[e.to] = count;
          stack.push_back(e.to);
        }
      }
    }
    ++count;
  }
  return label;
}

void add_edge(KnnGraph& g, std::size_t u, std::size_t v, double length) {
  g.adjacency[u].push_back({v, length});
  g.adjacency[v].push_back({u, length});
}

// Prim over contracted components on the complete Euclidean graph: yields the
// same edge set as repeatedly adding the globally shortest inter-component edge.
void repair_connectivity(KnnGraph& g, const Matrix& xt) {
  std::size_t count = 0;
  const auto label = component_labels(g, count);
  if (count <= 1) return;

  const std::size_t n = g.node_count;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<char> in_tree(count, 0);
  std::vector<double> best(n, kInf);
  std::vector<std::size_t> best_from(n, 0);
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t i = 0; i < n; ++i) members[label[i]].push_back(i);

  auto absorb = [&](std::size_t comp) {
    in_tree[comp] = 1;
    for (std::size_t u : members[comp]) {
      for (std::size_t v = 0; v < n; ++v) {
        if (in_tree[label[v]]) continue;
        const double d2 = squared_distance(xt, u, v);
        if (d2 < best[v]) {
          best[v] = d2;
          best_from[v] = u;
        }
      }
    }
  };

  absorb(label[0]);
  for (std::size_t added = 1; added < count; ++added) {
    std::size_t arg = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[label[v]]) continue;
      if (arg == n || best[v] < best[arg]) arg = v;
    }
    const std::size_t u = best_from[arg];
    const double length = std::sqrt(best[arg]);
    add_edge(g, u, arg, length);
    g.repairs.push_back({u, arg, length});
    spdlog::info("knn graph: repair edge {} -- {} (length {:.6g}) joins components {} and {}", u, arg,
                 length, label[u], label[arg]);
    absorb(label[arg]);
  }
}

}  // namespace

KnnGraph build_knn_graph(const Matrix& x, std::size_t k) {
  const std::size_t n = x.cols();
  if (n < 2) throw PreconditionError("build_knn_graph: need at least 2 points");
  if (k < 1 || k >= n) throw PreconditionError("build_knn_graph: need 1 <= k < n");

  const Matrix xt = x.transpose();
  KnnGraph g;
  g.node_count = n;
  g.adjacency.resize(n);

  std::vector<std::vector<std::pair<double, std::size_t>>> nearest(n);
  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) cand.emplace_back(squared_distance(xt, i, j), j);
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    nearest[i].assign(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k));
  }

  // union symmetrization
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [d2, j] : nearest[i]) {
      nbrs[i].push_back(j);
      nbrs[j].push_back(i);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& list = nbrs[i];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    g.adjacency[i].reserve(list.size());
    for (std::size_t j : list) g.adjacency[i].push_back({j, std::sqrt(squared_distance(xt, i, j))});
  }

  repair_connectivity(g, xt);
  return g;
}

std::vector<double> shortest_paths_from(const KnnGraph& graph, std::size_t source) {
  if (source >= graph.node_count) throw PreconditionError("shortest_paths_from: source out of range");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(graph.node_count, kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const Edge& e : graph.adjacency[u]) {
      const double nd = d + e.length;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        heap.emplace(nd, e.to);
      }
    }
  }
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] == kInf)
      throw NumericalError("shortest_paths_from: node " + std::to_string(i) + " unreachable from " +
                           std::to_string(source));
  }
  return dist;
}

double GeodesicIndex::approx_dist(std::size_t i, std::size_t j) const {
  if (i >= n || j >= n) throw PreconditionError("approx_dist: index out of range");
  const std::size_t a = assignment[i];
  const std::size_t b = assignment[j];
  if (a == b) return 0.0;
  return landmark_dists(a, b);
}

GeodesicIndex build_index(const Matrix& x, std::size_t k, std::size_t landmark_count,
                          std::uint64_t seed) {
  const std::size_t n = x.cols();
  if (landmark_count < 2) throw PreconditionError("build_index: need at least 2 landmarks");
  if (landmark_count > n) throw PreconditionError("build_index: more landmarks than points");

  const KnnGraph graph = build_knn_graph(x, k);
  const Matrix xt = x.transpose();

  GeodesicIndex index;
  index.n = n;
  index.k = k;
  index.seed = seed;
  index.repair_count = graph.repairs.size();

  // farthest-point sampling; nearest[] doubles as the assignment
  Rng rng = make_rng(seed, 5);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> gap(n, kInf);
  std::vector<std::size_t> nearest(n, 0);
  std::vector<char> chosen(n, 0);
  std::size_t next = pick(rng);
  for (std::size_t l = 0; l < landmark_count; ++l) {
    index.landmarks.push_back(next);
    chosen[next] = 1;
    std::size_t far = n;
    for (std::size_t i = 0; i < n; ++i) {
      const double d2 = squared_distance(xt, next, i);
      if (d2 < gap[i]) {
        gap[i] = d2;
        nearest[i] = l;
      }
      if (!chosen[i] && (far == n || gap[i] > gap[far])) far = i;
    }
    next = far;
  }
  index.assignment = nearest;
  for (double g2 : gap) index.covering_radius = std::max(index.covering_radius, std::sqrt(g2));

  const std::size_t m = landmark_count;
  index.landmark_dists = Matrix(m, m);
  parallel_for(m, [&](std::size_t a) {
    const auto dist = shortest_paths_from(graph, index.landmarks[a]);
    for (std::size_t b = 0; b < m; ++b) index.landmark_dists(a, b) = dist[index.landmarks[b]];
  });
  for (std::size_t a = 0; a < m; ++a) {
    index.landmark_dists(a, a) = 0.0;
    for (std::size_t b = a + 1; b < m; ++b) {
      const double d = std::min(index.landmark_dists(a, b), index.landmark_dists(b, a));
      index.landmark_dists(a, b) = d;
      index.landmark_dists(b, a) = d;
    }
  }
  return index;
}

void save_index(const std::filesystem::path& path, const GeodesicIndex& index) {
  nlohmann::ordered_json header;
  header["format"] = "pcae-geo";
  header["version"] = 1;
  header["n"] = index.n;
  header["k"] = index.k;
  header["seed"] = index.seed;
  header["landmark_count"] = index.landmarks.size();
  header["exact"] = index.exact();
  header["repair_count"] = index.repair_count;
  header["covering_radius"] = index.covering_radius;
  header["landmarks"] = index.landmarks;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_index: cannot open " + path.string());
  out.write(kGeoMagic, sizeof(kGeoMagic));
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double v : index.landmark_dists.data()) put_le<float>(out, static_cast<float>(v));
  for (std::size_t a : index.assignment) put_le<std::uint64_t>(out, a);
  if (!out) throw IoError("save_index: write failed for " + path.string());
}

GeodesicIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_index: cannot open " + path.string());
  char magic[sizeof(kGeoMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kGeoMagic, sizeof(kGeoMagic)) != 0)
    throw IoError("load_index: " + path.string() + " is not a .geo file");
  const auto header_len = get_le<std::uint64_t>(in);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw IoError("load_index: truncated header");

  GeodesicIndex index;
  try {
    const auto header = nlohmann::json::parse(text);
    index.n = header.at("n").get<std::size_t>();
    index.k = header.at("k").get<std::size_t>();
    index.seed = header.at("seed").get<std::uint64_t>();
    index.repair_count = header.value("repair_count", std::size_t{0});
    index.covering_radius = header.value("covering_radius", 0.0);
    index.landmarks = header.at("landmarks").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_index: bad header: " + std::string(e.what()));
  }
  const std::size_t m = index.landmarks.size();
  index.landmark_dists = Matrix(m, m);
  for (double& v : index.landmark_dists.data()) v = static_cast<double>(get_le<float>(in));
  index.assignment.resize(index.n);
  for (auto& a : index.assignment) {
    a = static_cast<std::size_t>(get_le<std::uint64_t>(in));
    if (a >= m) throw IoError("load_index: assignment out of range");
  }
  return index;
}

}  // namespace pcae
