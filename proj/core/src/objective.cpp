#include "pcae/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcae/error.hpp"

namespace pcae {

std::string_view to_string(IsoVariant v) {
  switch (v) {
    case IsoVariant::abs_sq_diff: return "abs_sq_diff";
    case IsoVariant::square: return "square";
    case IsoVariant::log_sq: return "log_sq";
  }
  return "?";
}

IsoVariant parse_iso_variant(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "abs_sq_diff") return IsoVariant::abs_sq_diff;
  if (s == "square") return IsoVariant::square;
  if (s == "log_sq" || s == "log") return IsoVariant::log_sq;
  throw PreconditionError("unknown isometry variant '" + std::string(name) + "'");
}

LossGrad recon_loss(const Matrix& x, const Matrix& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols())
    throw ShapeError("recon_loss: X and Xhat differ in shape");
  if (x.cols() == 0) throw ShapeError("recon_loss: empty batch");
  const double n = static_cast<double>(x.cols());
  LossGrad out{0.0, Matrix(x.rows(), x.cols())};
  const auto a = x.data();
  const auto b = xhat.data();
  auto g = out.grad.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = b[i] - a[i];
    out.value += r * r;
    g[i] = 2.0 * r / n;
  }
  out.value /= n;
  return out;
}

LossGrad weighted_variance_loss(const Matrix& z, std::span<const double> gammas) {
  if (gammas.size() != z.rows())
    throw ShapeError("weighted_variance_loss: " + std::to_string(gammas.size()) + " gammas for " +
                     std::to_string(z.rows()) + " latent rows");
  if (z.cols() < 2) throw PreconditionError("weighted_variance_loss: batch of 1 has no variance");
  const double n = static_cast<double>(z.cols());
  LossGrad out{0.0, Matrix(z.rows(), z.cols())};
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const auto row = z.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= n;
    out.value += gammas[r] * var;
    auto g = out.grad.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) g[c] = gammas[r] * 2.0 * (row[c] - mean) / n;
  }
  return out;
}

IsoElement iso_elementwise(double d, double dhat, IsoVariant variant) {
  if (!(d >= 0.0) || !(dhat >= 0.0))
    throw PreconditionError("iso_elementwise: distances must be non-negative");
  switch (variant) {
    case IsoVariant::abs_sq_diff: {
      const double diff = dhat * dhat - d * d;
      const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      return {std::abs(diff), sign};
    }
    case IsoVariant::square: {
      const double diff = dhat - d;
      return {diff * diff, 2.0 * diff};
    }
    case IsoVariant::log_sq: {
      if (d <= 0.0 || dhat <= 0.0)
        throw DomainError("iso_elementwise: log_sq needs positive distances");
      const double l = std::log(d / dhat);
      return {l * l, -2.0 * l / dhat};
    }
  }
  return {};
}

LossGrad iso_loss(const Matrix& z, const PairBatch& batch, IsoVariant variant) {
  if (batch.pairs.empty()) throw PreconditionError("iso_loss: empty pair set");
  if (batch.pairs.size() != batch.target_dists.size())
    throw ShapeError("iso_loss: pair and target counts differ");
  const std::size_t rows = z.rows();
  LossGrad out{0.0, Matrix(rows, z.cols())};
  std::vector<double> delta(rows);
  std::size_t used = 0;
  // gradients are accumulated unscaled and divided by the pair count at the end
  for (std::size_t p = 0; p < batch.pairs.size(); ++p) {
    const auto [i, j] = batch.pairs[p];
    if (i >= z.cols() || j >= z.cols() || i == j)
      throw PreconditionError("iso_loss: invalid pair (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
    const double d = batch.target_dists[p];
    if (variant == IsoVariant::log_sq && d == 0.0) continue;
    double sq = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      delta[r] = z(r, i) - z(r, j);
      sq += delta[r] * delta[r];
    }
    const double dhat = std::sqrt(sq);
    const IsoElement e = iso_elementwise(d, dhat, variant);
    out.value += e.value;
    ++used;
    double scale = 0.0;  // d value / d delta = scale * delta
    if (variant == IsoVariant::abs_sq_diff) {
      scale = 2.0 * e.partial;
    } else if (dhat > 0.0) {
      scale = e.partial / dhat;
    }
    if (scale == 0.0) continue;
    for (std::size_t r = 0; r < rows; ++r) {
      out.grad(r, i) += scale * delta[r];
      out.grad(r, j) -= scale * delta[r];
    }
  }
  if (used == 0) throw PreconditionError("iso_loss: no usable pairs (all targets zero)");
  const double inv = 1.0 / static_cast<double>(used);
  out.value *= inv;
  out.grad *= inv;
  return out;
}

PairBatch sample_pairs(std::span<const std::size_t> global_indices, const GeodesicIndex& index,
                       Rng& rng, std::size_t rounds) {
  const std::size_t n = global_indices.size();
  if (n < 2) throw PreconditionError("sample_pairs: batch needs at least 2 points");
  PairBatch batch;
  batch.pairs.reserve(rounds * (n / 2));
  batch.target_dists.reserve(rounds * (n / 2));
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto order = permutation(n, rng);
    for (std::size_t s = 0; s + 1 < n; s += 2) {
      const std::size_t a = order[s];
      const std::size_t b = order[s + 1];
      batch.pairs.emplace_back(a, b);
      batch.target_dists.push_back(index.approx_dist(global_indices[a], global_indices[b]));
    }
  }
  return batch;
}

PairBatch sample_pairs(std::span<const std::size_t> global_indices, const GeodesicIndex& index,
                       std::uint64_t seed, std::size_t rounds) {
  Rng rng = make_rng(seed, 6);
  return sample_pairs(global_indices, index, rng, rounds);
}

PcaeLossResult pcae_loss(const Matrix& x, const Matrix& z, const Matrix& xhat,
                         const PairBatch& batch, std::span<const double> gammas, double beta,
                         IsoVariant variant, LossTerms terms) {
  if (beta < 0.0) throw PreconditionError("pcae_loss: beta must be non-negative");
  PcaeLossResult out;
  out.breakdown.beta = beta;
  out.grad_z = Matrix(z.rows(), z.cols());
  if (terms.recon) {
    auto r = recon_loss(x, xhat);
    out.breakdown.recon = r.value;
    out.grad_xhat = std::move(r.grad);
  }
  if (terms.var) {
    auto v = weighted_variance_loss(z, gammas);
    out.breakdown.var = v.value;
    out.grad_z += beta * v.grad;
  }
  if (terms.iso) {
    auto i = iso_loss(z, batch, variant);
    out.breakdown.iso = i.value;
    out.grad_z += beta * i.grad;
  }
  out.breakdown.total = out.breakdown.recon + beta * (out.breakdown.var + out.breakdown.iso);
  return out;
}

HaeResult hae_loss_and_grad(const MlpModel& model, const Matrix& x, std::span<const double> alpha) {
  if (!model.has_decoder()) throw ShapeError("hae_loss: model has no decoder");
  const std::size_t d = model.latent_dim();
  if (alpha.size() != d)
    throw ShapeError("hae_loss: alpha length " + std::to_string(alpha.size()) + " != latent_dim " +
                     std::to_string(d));
  const StackCache enc = run_stack(model.encoder, x);
  const Matrix& z = enc.outputs.back();

  HaeResult out;
  out.grads = zero_gradients(model);
  out.prefix_losses.resize(d);
  Matrix grad_z(d, z.cols());
  for (std::size_t k = 1; k <= d; ++k) {
    Matrix masked = z;
    for (std::size_t r = k; r < d; ++r)
      for (double& v : masked.row(r)) v = 0.0;
    const StackCache dec = run_stack(model.decoder, masked);
    auto rec = recon_loss(x, dec.outputs.back());
    out.prefix_losses[k - 1] = rec.value;
    out.value += alpha[k - 1] * rec.value;
    if (alpha[k - 1] == 0.0) continue;
    rec.grad *= alpha[k - 1];
    auto back = backward_stack(model.decoder, dec, rec.grad);
    for (std::size_t l = 0; l < back.grads.size(); ++l) {
      out.grads.decoder[l].weight += back.grads[l].weight;
      for (std::size_t i = 0; i < back.grads[l].bias.size(); ++i)
        out.grads.decoder[l].bias[i] += back.grads[l].bias[i];
    }
    for (std::size_t r = 0; r < k; ++r) {
      auto dst = grad_z.row(r);
      const auto src = back.input_grad.row(r);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
    }
  }
  out.grads.encoder = backward_stack(model.encoder, enc, grad_z).grads;
  return out;
}

double hae_loss(const Matrix& x, const MlpModel& model, std::span<const double> alpha) {
  return hae_loss_and_grad(model, x, alpha).value;
}

}  // namespace pcae
