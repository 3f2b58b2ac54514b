#include "pcae/datasets.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pcae/error.hpp"
#include "pcae/linalg.hpp"
#include "pcae/random.hpp"

namespace pcae {

namespace {

constexpr std::uint64_t kFactorStream = 1;
constexpr std::uint64_t kEmbeddingStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kSplitStream = 4;

void add_noise(Matrix& x, double sd, Rng& rng) {
  if (sd == 0.0) return;
  std::normal_distribution<double> normal(0.0, sd);
  for (double& v : x.data()) v += normal(rng);
}

std::size_t held_out_size(std::size_t n, double frac) {
  // nearest integer, ties down
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n) * frac - 0.5));
}

}  // namespace

Matrix center(const Matrix& x) {
  Matrix out = x;
  const auto means = row_means(x);
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (double& v : out.row(r)) v -= means[r];
  return out;
}

Dataset gen_swiss_roll(std::size_t n, double noise_sd, std::uint64_t seed) {
  if (n < 10) throw PreconditionError("gen_swiss_roll: need n >= 10");
  if (noise_sd < 0.0) throw PreconditionError("gen_swiss_roll: negative noise_sd");

  Rng rng = make_rng(seed, kFactorStream);
  std::uniform_real_distribution<double> angle(1.5 * std::numbers::pi, 4.5 * std::numbers::pi);
  std::uniform_real_distribution<double> height(0.0, 21.0);

  Dataset ds;
  ds.samples = Matrix(3, n);
  ds.factors = Matrix(2, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = angle(rng);
    const double h = height(rng);
    ds.samples(0, i) = t * std::cos(t);
    ds.samples(1, i) = h;
    ds.samples(2, i) = t * std::sin(t);
    (*ds.factors)(0, i) = t;
    (*ds.factors)(1, i) = h;
  }
  Rng noise = make_rng(seed, kNoiseStream);
  add_noise(ds.samples, noise_sd, noise);
  ds.samples = center(ds.samples);
  ds.intrinsic_dim = 2;
  ds.seed = seed;
  ds.generator = "swiss_roll";
  return ds;
}

std::vector<double> FactorEmbedding::apply(std::span<const double> z) const {
  if (z.size() != latent_dim()) throw ShapeError("FactorEmbedding::apply: factor length mismatch");
  std::vector<double> x(ambient_dim(), 0.0);
  for (std::size_t r = 0; r < ambient_dim(); ++r) {
    double u = 0.0;
    for (std::size_t c = 0; c < latent_dim(); ++c) u += injection(r, c) * z[c];
    x[r] = u + kCubic * u * u * u;
  }
  return x;
}

Matrix FactorEmbedding::jacobian(std::span<const double> z) const {
  if (z.size() != latent_dim()) throw ShapeError("FactorEmbedding::jacobian: factor length mismatch");
  Matrix j(ambient_dim(), latent_dim());
  for (std::size_t r = 0; r < ambient_dim(); ++r) {
    double u = 0.0;
    for (std::size_t c = 0; c < latent_dim(); ++c) u += injection(r, c) * z[c];
    const double slope = 1.0 + 3.0 * kCubic * u * u;
    for (std::size_t c = 0; c < latent_dim(); ++c) j(r, c) = slope * injection(r, c);
  }
  return j;
}

FactorEmbedding make_factor_embedding(std::size_t d_true, std::size_t p, std::uint64_t seed) {
  if (d_true < 1 || d_true >= p)
    throw PreconditionError("make_factor_embedding: need 1 <= d_true < p");
  Rng rng = make_rng(seed, kEmbeddingStream);
  return FactorEmbedding{random_orthonormal(p, d_true, rng)};
}

Dataset gen_factor_manifold(std::size_t d_true, std::size_t p, std::size_t n,
                            std::span<const double> variance_profile, std::uint64_t seed,
                            double noise_sd) {
  if (d_true < 1 || d_true >= p) throw PreconditionError("gen_factor_manifold: need 1 <= d_true < p");
  if (variance_profile.size() != d_true)
    throw PreconditionError("gen_factor_manifold: variance_profile length must equal d_true");
  if (n < 2) throw PreconditionError("gen_factor_manifold: need n >= 2");
  if (noise_sd < 0.0) throw PreconditionError("gen_factor_manifold: negative noise_sd");
  for (std::size_t i = 0; i < d_true; ++i) {
    if (!(variance_profile[i] > 0.0))
      throw PreconditionError("gen_factor_manifold: variance_profile must be strictly positive");
    if (i > 0 && variance_profile[i] > variance_profile[i - 1])
      throw PreconditionError("gen_factor_manifold: variance_profile must be descending");
  }

  const FactorEmbedding embedding = make_factor_embedding(d_true, p, seed);
  Rng rng = make_rng(seed, kFactorStream);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  // U[-a, a] has variance a^2 / 3.
  std::vector<double> half_width(d_true);
  for (std::size_t i = 0; i < d_true; ++i) half_width[i] = std::sqrt(3.0 * variance_profile[i]);

  Dataset ds;
  ds.samples = Matrix(p, n);
  ds.factors = Matrix(d_true, n);
  std::vector<double> z(d_true);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < d_true; ++i) {
      z[i] = half_width[i] * unit(rng);
      (*ds.factors)(i, k) = z[i];
    }
    ds.samples.set_col(k, embedding.apply(z));
  }
  Rng noise = make_rng(seed, kNoiseStream);
  add_noise(ds.samples, noise_sd, noise);
  ds.samples = center(ds.samples);
  ds.intrinsic_dim = d_true;
  ds.seed = seed;
  ds.generator = "factor_manifold";
  return ds;
}

Dataset gen_flat_strip(std::size_t n, std::uint64_t seed, double radius, double height) {
  if (n < 10) throw PreconditionError("gen_flat_strip: need n >= 10");
  if (!(radius > 0.0) || !(height > 0.0)) throw PreconditionError("gen_flat_strip: non-positive size");
  Rng rng = make_rng(seed, kFactorStream);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> along(0.0, height);

  Dataset ds;
  ds.samples = Matrix(3, n);
  ds.factors = Matrix(2, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = angle(rng);
    const double h = along(rng);
    ds.samples(0, i) = radius * std::cos(theta);
    ds.samples(1, i) = radius * std::sin(theta);
    ds.samples(2, i) = h;
    (*ds.factors)(0, i) = radius * theta;
    (*ds.factors)(1, i) = h;
  }
  ds.samples = center(ds.samples);
  ds.intrinsic_dim = 2;
  ds.seed = seed;
  ds.generator = "flat_strip";
  return ds;
}

DatasetSplit split(const Dataset& ds, const SplitSpec& spec, std::uint64_t seed) {
  const double fracs[] = {spec.train, spec.val, spec.test};
  for (double f : fracs)
    if (!(f > 0.0)) throw PreconditionError("split: fractions must be positive");
  if (std::abs(spec.train + spec.val + spec.test - 1.0) > 1e-12)
    throw PreconditionError("split: fractions must sum to 1");

  const std::size_t n = ds.size();
  const std::size_t n_val = held_out_size(n, spec.val);
  const std::size_t n_test = held_out_size(n, spec.test);
  if (n_val == 0 || n_test == 0 || n_val + n_test >= n)
    throw PreconditionError("split: a part would be empty for n = " + std::to_string(n));

  Rng rng = make_rng(seed, kSplitStream);
  const auto order = permutation(n, rng);

  DatasetSplit out;
  const std::size_t n_train = n - n_val - n_test;
  out.train_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.val_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                     order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());

  auto part = [&](const std::vector<std::size_t>& idx) {
    Dataset d;
    d.samples = ds.samples.select_cols(idx);
    if (ds.factors) d.factors = ds.factors->select_cols(idx);
    d.intrinsic_dim = ds.intrinsic_dim;
    d.seed = ds.seed;
    d.generator = ds.generator;
    return d;
  };
  out.train = part(out.train_idx);
  out.val = part(out.val_idx);
  out.test = part(out.test_idx);
  return out;
}

void write_csv(const std::filesystem::path& path, const Matrix& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_csv: cannot open " + path.string());
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    if (r > 0) out << ',';
    out << 'x' << (r + 1);
  }
  out << '\n';
  char buf[64];
  for (std::size_t c = 0; c < samples.cols(); ++c) {
    for (std::size_t r = 0; r < samples.rows(); ++r) {
      if (r > 0) out << ',';
      const auto res = std::to_chars(buf, buf + sizeof(buf), samples(r, c));
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw IoError("write_csv: write failed for " + path.string());
}

Matrix read_csv(const std::filesystem::path& path, bool center_data) {
  std::ifstream in(path);
  if (!in) throw IoError("read_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("read_csv: empty file " + path.string());
  std::size_t p = 1;
  for (char ch : line)
    if (ch == ',') ++p;

  std::vector<double> values;
  std::size_t n = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t fields = 0;
    const char* it = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double v = 0.0;
      while (it < end && *it == ' ') ++it;
      const auto res = std::from_chars(it, end, v);
      if (res.ec != std::errc{})
        throw IoError("read_csv: bad number on line " + std::to_string(line_no));
      values.push_back(v);
      ++fields;
      it = res.ptr;
      while (it < end && *it == ' ') ++it;
      if (it == end) break;
      if (*it != ',') throw IoError("read_csv: bad separator on line " + std::to_string(line_no));
      ++it;
    }
    if (fields != p)
      throw IoError("read_csv: line " + std::to_string(line_no) + " has " + std::to_string(fields) +
                    " fields, header has " + std::to_string(p));
    ++n;
  }
  // values are sample-major; transpose into column-per-sample
  Matrix x(p, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = 0; r < p; ++r) x(r, c) = values[c * p + r];
  return center_data ? center(x) : x;
}

std::filesystem::path metadata_path_for(const std::filesystem::path& csv_path) {
  std::filesystem::path meta = csv_path;
  meta.replace_extension(".meta.json");
  return meta;
}

void write_metadata(const std::filesystem::path& path, const DatasetMetadata& meta) {
  nlohmann::ordered_json j;
  j["intrinsic_dim"] = meta.intrinsic_dim ? nlohmann::ordered_json(*meta.intrinsic_dim) : nullptr;
  j["seed"] = meta.seed;
  j["generator"] = meta.generator;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_metadata: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

DatasetMetadata read_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_metadata: cannot open " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    DatasetMetadata meta;
    if (j.contains("intrinsic_dim") && !j["intrinsic_dim"].is_null())
      meta.intrinsic_dim = j["intrinsic_dim"].get<std::size_t>();
    meta.seed = j.value("seed", std::uint64_t{0});
    meta.generator = j.value("generator", std::string{});
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("read_metadata: " + std::string(e.what()));
  }
}

}  // namespace pcae
