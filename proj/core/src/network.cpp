#include "pcae/network.hpp"

#include <cmath>
#include <string>

#include "pcae/error.hpp"
#include "pcae/random.hpp"

namespace pcae {

namespace {

void apply_layer(const Layer& layer, const Matrix& input, Matrix& out) {
  out = matmul(layer.weight, input);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const double b = layer.bias[r];
    auto row = out.row(r);
    if (layer.activation == Activation::relu) {
      for (double& v : row) v = std::max(0.0, v + b);
    } else {
      for (double& v : row) v += b;
    }
  }
}

std::vector<Layer> make_stack(std::span<const std::size_t> widths, Rng& rng) {
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t fan_in = widths[l];
    const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
    Layer layer;
    layer.weight = gaussian_matrix(widths[l + 1], fan_in, rng, sd);
    layer.bias.assign(widths[l + 1], 0.0);
    layer.activation = (l + 2 == widths.size()) ? Activation::identity : Activation::relu;
    layers.push_back(std::move(layer));
  }
  return layers;
}

std::vector<std::size_t> widths_of(const std::vector<Layer>& layers) {
  std::vector<std::size_t> w;
  if (layers.empty()) return w;
  w.push_back(layers.front().in_dim());
  for (const auto& l : layers) w.push_back(l.out_dim());
  return w;
}

void validate_stack(const std::vector<Layer>& layers, const char* name) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].bias.size() != layers[l].out_dim())
      throw ShapeError(std::string(name) + " layer " + std::to_string(l) + ": bias length mismatch");
    if (l > 0 && layers[l].in_dim() != layers[l - 1].out_dim())
      throw ShapeError(std::string(name) + " layer " + std::to_string(l) + ": width does not chain");
  }
}

}  // namespace

std::size_t MlpModel::input_dim() const { return encoder.empty() ? 0 : encoder.front().in_dim(); }

std::size_t MlpModel::latent_dim() const { return encoder.empty() ? 0 : encoder.back().out_dim(); }

std::size_t MlpModel::parameter_count() const {
  std::size_t count = 0;
  for (const auto* stack : {&encoder, &decoder})
    for (const auto& l : *stack) count += l.weight.size() + l.bias.size();
  return count;
}

std::vector<std::size_t> MlpModel::encoder_widths() const { return widths_of(encoder); }
std::vector<std::size_t> MlpModel::decoder_widths() const { return widths_of(decoder); }

void validate_model(const MlpModel& model) {
  if (model.encoder.empty()) throw ShapeError("model has no encoder layers");
  validate_stack(model.encoder, "encoder");
  validate_stack(model.decoder, "decoder");
  if (model.has_decoder()) {
    if (model.decoder.front().in_dim() != model.latent_dim())
      throw ShapeError("decoder input width does not match latent_dim");
    if (model.decoder.back().out_dim() != model.input_dim())
      throw ShapeError("decoder output width does not match input dim");
  }
}

MlpModel init_model(std::span<const std::size_t> encoder_widths,
                    std::span<const std::size_t> decoder_widths, std::uint64_t seed) {
  if (encoder_widths.size() < 2) throw ShapeError("init_model: encoder needs at least two widths");
  for (std::size_t w : encoder_widths)
    if (w == 0) throw ShapeError("init_model: zero width");
  if (!decoder_widths.empty()) {
    if (decoder_widths.size() < 2) throw ShapeError("init_model: decoder needs at least two widths");
    if (decoder_widths.front() != encoder_widths.back())
      throw ShapeError("init_model: decoder must start at latent_dim");
    if (decoder_widths.back() != encoder_widths.front())
      throw ShapeError("init_model: decoder must end at input dim");
    for (std::size_t w : decoder_widths)
      if (w == 0) throw ShapeError("init_model: zero width");
  }
  Rng rng = make_rng(seed, 10);
  MlpModel model;
  model.seed = seed;
  model.encoder = make_stack(encoder_widths, rng);
  model.decoder = make_stack(decoder_widths, rng);
  return model;
}

StackCache run_stack(std::span<const Layer> layers, const Matrix& input) {
  StackCache cache;
  cache.outputs.reserve(layers.size() + 1);
  cache.outputs.push_back(input);
  for (const Layer& layer : layers) {
    Matrix out;
    apply_layer(layer, cache.outputs.back(), out);
    cache.outputs.push_back(std::move(out));
  }
  return cache;
}

Matrix encode(const MlpModel& model, const Matrix& x) {
  if (x.rows() != model.input_dim())
    throw ShapeError("encode: input has " + std::to_string(x.rows()) + " rows, model expects " +
                     std::to_string(model.input_dim()));
  Matrix cur = x;
  Matrix next;
  for (const Layer& layer : model.encoder) {
    apply_layer(layer, cur, next);
    std::swap(cur, next);
  }
  return cur;
}

Matrix decode(const MlpModel& model, const Matrix& z) {
  if (!model.has_decoder()) throw ShapeError("decode: model has no decoder");
  if (z.rows() != model.latent_dim())
    throw ShapeError("decode: code has " + std::to_string(z.rows()) + " rows, latent_dim is " +
                     std::to_string(model.latent_dim()));
  Matrix cur = z;
  Matrix next;
  for (const Layer& layer : model.decoder) {
    apply_layer(layer, cur, next);
    std::swap(cur, next);
  }
  return cur;
}

ForwardResult forward(const MlpModel& model, const Matrix& x) {
  if (x.rows() != model.input_dim())
    throw ShapeError("forward: input has " + std::to_string(x.rows()) + " rows, model expects " +
                     std::to_string(model.input_dim()));
  ForwardResult out;
  out.cache.encoder = run_stack(model.encoder, x);
  out.z = out.cache.encoder.outputs.back();
  if (model.has_decoder()) {
    out.cache.decoder = run_stack(model.decoder, out.z);
    out.xhat = out.cache.decoder.outputs.back();
  }
  out.cache.model_version = model.version;
  out.cache.batch = x.cols();
  return out;
}

Gradients zero_gradients(const MlpModel& model) {
  Gradients g;
  for (const auto& l : model.encoder)
    g.encoder.push_back({Matrix(l.out_dim(), l.in_dim()), std::vector<double>(l.out_dim(), 0.0)});
  for (const auto& l : model.decoder)
    g.decoder.push_back({Matrix(l.out_dim(), l.in_dim()), std::vector<double>(l.out_dim(), 0.0)});
  return g;
}

StackBackward backward_stack(std::span<const Layer> layers, const StackCache& cache,
                             const Matrix& upstream) {
  if (cache.outputs.size() != layers.size() + 1)
    throw PreconditionError("backward_stack: cache does not match layer count");
  StackBackward out;
  out.grads.resize(layers.size());
  Matrix g = upstream;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Layer& layer = layers[l];
    const Matrix& output = cache.outputs[l + 1];
    if (g.rows() != output.rows() || g.cols() != output.cols())
      throw ShapeError("backward_stack: upstream gradient shape mismatch");
    if (layer.activation == Activation::relu) {
      auto gd = g.data();
      const auto od = output.data();
      for (std::size_t i = 0; i < gd.size(); ++i)
        if (od[i] <= 0.0) gd[i] = 0.0;
    }
    LayerGrad& lg = out.grads[l];
    lg.weight = matmul_nt(g, cache.outputs[l]);
    lg.bias.assign(g.rows(), 0.0);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      double s = 0.0;
      for (double v : g.row(r)) s += v;
      lg.bias[r] = s;
    }
    g = matmul_tn(layer.weight, g);
  }
  out.input_grad = std::move(g);
  return out;
}

Gradients backward(const MlpModel& model, const ForwardCache& cache, const Matrix& grad_z,
                   const Matrix& grad_xhat) {
  if (cache.model_version != model.version || cache.encoder.outputs.size() != model.encoder.size() + 1)
    throw PreconditionError("backward: stale forward cache (model parameters changed since forward)");

  Gradients grads = zero_gradients(model);
  const std::size_t batch = cache.batch;
  Matrix total_z = grad_z.empty() ? Matrix(model.latent_dim(), batch) : grad_z;
  if (total_z.rows() != model.latent_dim() || total_z.cols() != batch)
    throw ShapeError("backward: grad_z shape mismatch");

  if (!grad_xhat.empty()) {
    if (!model.has_decoder()) throw ShapeError("backward: grad_xhat given for encoder-only model");
    if (cache.decoder.outputs.size() != model.decoder.size() + 1)
      throw PreconditionError("backward: stale forward cache (decoder)");
    auto dec = backward_stack(model.decoder, cache.decoder, grad_xhat);
    grads.decoder = std::move(dec.grads);
    total_z += dec.input_grad;
  }
  auto enc = backward_stack(model.encoder, cache.encoder, total_z);
  grads.encoder = std::move(enc.grads);
  return grads;
}

std::vector<double> get_parameters(const MlpModel& model) {
  std::vector<double> out;
  out.reserve(model.parameter_count());
  for (const auto* stack : {&model.encoder, &model.decoder}) {
    for (const auto& l : *stack) {
      out.insert(out.end(), l.weight.data().begin(), l.weight.data().end());
      out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
  }
  return out;
}

void set_parameters(MlpModel& model, std::span<const double> values) {
  if (values.size() != model.parameter_count())
    throw ShapeError("set_parameters: expected " + std::to_string(model.parameter_count()) +
                     " values, got " + std::to_string(values.size()));
  std::size_t pos = 0;
  for (auto* stack : {&model.encoder, &model.decoder}) {
    for (auto& l : *stack) {
      for (double& v : l.weight.data()) v = values[pos++];
      for (double& v : l.bias) v = values[pos++];
    }
  }
  ++model.version;
}

std::vector<double> flatten(const Gradients& grads) {
  std::vector<double> out;
  for (const auto* stack : {&grads.encoder, &grads.decoder}) {
    for (const auto& l : *stack) {
      out.insert(out.end(), l.weight.data().begin(), l.weight.data().end());
      out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
  }
  return out;
}

AdamState make_adam(const MlpModel& model, double learning_rate) {
  AdamState s;
  s.m.assign(model.parameter_count(), 0.0);
  s.v.assign(model.parameter_count(), 0.0);
  s.learning_rate = learning_rate;
  return s;
}

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state) {
  const std::size_t count = model.parameter_count();
  if (state.m.size() != count || state.v.size() != count)
    throw ShapeError("adam_step: optimizer state does not match model");
  if (grads.encoder.size() != model.encoder.size() || grads.decoder.size() != model.decoder.size())
    throw ShapeError("adam_step: gradient layout does not match model");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  std::size_t pos = 0;
  auto update = [&](std::span<double> params, std::span<const double> g) {
    if (params.size() != g.size()) throw ShapeError("adam_step: gradient shape mismatch");
    for (std::size_t i = 0; i < params.size(); ++i, ++pos) {
      double& m = state.m[pos];
      double& v = state.v[pos];
      m = state.beta1 * m + (1.0 - state.beta1) * g[i];
      v = state.beta2 * v + (1.0 - state.beta2) * g[i] * g[i];
      params[i] -= state.learning_rate * (m / c1) / (std::sqrt(v / c2) + state.eps);
    }
  };
  for (std::size_t l = 0; l < model.encoder.size(); ++l) {
    update(model.encoder[l].weight.data(), grads.encoder[l].weight.data());
    update(model.encoder[l].bias, grads.encoder[l].bias);
  }
  for (std::size_t l = 0; l < model.decoder.size(); ++l) {
    update(model.decoder[l].weight.data(), grads.decoder[l].weight.data());
    update(model.decoder[l].bias, grads.decoder[l].bias);
  }
  ++model.version;
}

}  // namespace pcae
