#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pcae/matrix.hpp"

namespace pcae {

enum class Activation { relu, identity };

/// Affine layer y = act(W x + b); W is out x in.
struct Layer {
  Matrix weight;
  std::vector<double> bias;
  Activation activation = Activation::relu;

  std::size_t in_dim() const { return weight.cols(); }
  std::size_t out_dim() const { return weight.rows(); }
};

/// Encoder/decoder pair. The decoder may be empty (encoder-only models).
/// Final layers of both stacks use the identity activation.
struct MlpModel {
  std::vector<Layer> encoder;
  std::vector<Layer> decoder;
  std::uint64_t seed = 0;
  /// Bumped on every parameter update; forward caches remember it.
  std::uint64_t version = 0;

  std::size_t input_dim() const;
  std::size_t latent_dim() const;
  bool has_decoder() const { return !decoder.empty(); }
  std::size_t parameter_count() const;
  std::vector<std::size_t> encoder_widths() const;
  std::vector<std::size_t> decoder_widths() const;
};

/// He-initialized weights (sd = sqrt(2 / fan_in)), zero biases. Hidden layers
/// use ReLU. `decoder_widths` may be empty for an encoder-only model.
MlpModel init_model(std::span<const std::size_t> encoder_widths,
                    std::span<const std::size_t> decoder_widths, std::uint64_t seed);

/// Throws ShapeError unless the layer chain is consistent.
void validate_model(const MlpModel& model);

/// Post-activation outputs of a layer stack; outputs[0] is the stack input.
struct StackCache {
  std::vector<Matrix> outputs;
};

struct ForwardCache {
  StackCache encoder;
  StackCache decoder;
  std::uint64_t model_version = 0;
  std::size_t batch = 0;
};

struct ForwardResult {
  Matrix z;
  Matrix xhat;  // empty for encoder-only models
  ForwardCache cache;
};

StackCache run_stack(std::span<const Layer> layers, const Matrix& input);

Matrix encode(const MlpModel& model, const Matrix& x);
Matrix decode(const MlpModel& model, const Matrix& z);
ForwardResult forward(const MlpModel& model, const Matrix& x);

struct LayerGrad {
  Matrix weight;
  std::vector<double> bias;
};

struct Gradients {
  std::vector<LayerGrad> encoder;
  std::vector<LayerGrad> decoder;
};

Gradients zero_gradients(const MlpModel& model);

struct StackBackward {
  std::vector<LayerGrad> grads;
  Matrix input_grad;
};

/// Reverse pass through one stack given dLoss/d(stack output).
StackBackward backward_stack(std::span<const Layer> layers, const StackCache& cache,
                             const Matrix& upstream);

/// Exact reverse-mode gradients for upstream gradients entering at the
/// latent codes (grad_z) and at the reconstruction (grad_xhat). Either may be
/// an empty Matrix, meaning zero. Contributions reaching the encoder through
/// the decoder are summed with grad_z. Throws PreconditionError if the cache
/// was produced by a different parameter version.
Gradients backward(const MlpModel& model, const ForwardCache& cache, const Matrix& grad_z,
                   const Matrix& grad_xhat);

/// Parameters in declaration order: encoder layers then decoder layers, each
/// layer's weight (row-major) followed by its bias.
std::vector<double> get_parameters(const MlpModel& model);
void set_parameters(MlpModel& model, std::span<const double> values);
std::vector<double> flatten(const Gradients& grads);

struct AdamState {
  std::size_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double learning_rate = 1e-4;
};

AdamState make_adam(const MlpModel& model, double learning_rate);

/// One bias-corrected Adam update in place.
void adam_step(MlpModel& model, const Gradients& grads, AdamState& state);

}  // namespace pcae
