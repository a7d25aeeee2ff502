#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "defrost/dataset.hpp"
#include "defrost/matrix.hpp"

namespace defrost {

enum class Activation { ReLU, GeLU, Tanh, Identity };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

struct LayerSpec {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::ReLU;
};

/// Ordered dense layers; the final layer is the readout (Identity activation,
/// width = number of classes or reconstruction dimension).
struct NetworkSpec {
  std::vector<LayerSpec> layers;

  std::size_t num_layers() const { return layers.size(); }
  std::size_t input_width() const { return layers.front().in; }
  std::size_t output_width() const { return layers.back().out; }
  /// Width of the representation at layer index l, 0 = input, L = readout output.
  std::size_t width_at(std::size_t layer) const {
    return layer == 0 ? layers.front().in : layers[layer - 1].out;
  }
  /// Throws unless widths chain, there are >= 2 layers and the readout is Identity.
  void validate() const;

  /// Layers [first, last) as a standalone network.
  NetworkSpec slice(std::size_t first, std::size_t last) const;
};

struct LayerParams {
  Matrix weights;               // in x out
  std::vector<double> biases;   // out
};

struct ParamSet {
  std::vector<LayerParams> layers;
  /// Throws if shapes disagree with the spec or entries are non-finite.
  void validate(const NetworkSpec& spec) const;
  ParamSet slice(std::size_t first, std::size_t last) const;
};

using Gradients = ParamSet;

enum class LrSchedule { Cosine, WarmupAnneal, Constant };
enum class LossKind { CrossEntropy, MeanSquaredError };
enum class Optimizer { SgdMomentum, Adam };

struct TrainConfig {
  int epochs = 200;
  int batch_size = 128;
  double lr0 = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  LrSchedule schedule = LrSchedule::Cosine;
  LossKind loss = LossKind::CrossEntropy;
  Optimizer optimizer = Optimizer::SgdMomentum;
  int warmup_epochs = 0;    // warmup-anneal schedule only
  double lr_floor = 0.0;    // warmup-anneal schedule only
  std::uint64_t seed = 0;   // reinitialization-free: shuffling only

  void validate() const;
};

/// True entries mark layers whose parameters the optimizer must not touch.
struct FreezeMask {
  std::vector<bool> frozen;

  static FreezeMask none(std::size_t num_layers) { return {std::vector<bool>(num_layers, false)}; }
  /// Freezes the first k layers; the readout is never frozen (k <= L-1).
  static FreezeMask prefix(std::size_t num_layers, std::size_t k);
  bool any() const;
  void validate(std::size_t num_layers) const;
};

/// Quadratic attraction lambda * ||W - W_ref||^2 on the weight matrices of the
/// listed layers; gradient contribution 2 lambda (W - W_ref). Biases are not
/// coupled, matching the weight-only distance readout.
struct ElasticCoupling {
  double lambda = 0.0;
  std::vector<std::size_t> layer_indices;
  ParamSet reference;

  void validate(const NetworkSpec& spec) const;
};

/// Input, per-layer post-activation matrices and pre-activations.
/// post[0] = input, post[l] = layer l output, post[L] = logits.
struct ActivationStack {
  std::vector<Matrix> post;  // L + 1 entries
  std::vector<Matrix> pre;   // L entries, pre[l] feeds layer l+1's activation
  const Matrix& logits() const { return post.back(); }
};

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;
  double accuracy = 0.0;  // NaN for regression losses
};

struct TrainResult {
  ParamSet params;
  std::vector<EpochStats> history;
};

struct SgdState {
  ParamSet velocity;
};

struct AdamState {
  ParamSet first_moment;
  ParamSet second_moment;
  long step = 0;
};

/// Weights ~ N(0, 2/fan_in), biases zero. Deterministic given the seed.
ParamSet he_init(const NetworkSpec& spec, std::uint64_t rng_seed);

SgdState make_sgd_state(const NetworkSpec& spec);
AdamState make_adam_state(const NetworkSpec& spec);

ActivationStack forward(const NetworkSpec& spec, const ParamSet& params, const Matrix& x);

/// Mean over samples of -log softmax(logits)[label], max-subtracted.
double cross_entropy(const Matrix& logits, std::span<const int> labels);

/// Mean over samples and output dimensions of squared error.
double mean_squared_error(const Matrix& outputs, const Matrix& targets);

/// Exact reverse-mode gradients of the mean loss for every layer, frozen or not.
Gradients backward(const NetworkSpec& spec, const ParamSet& params, const Matrix& x,
                   std::span<const int> labels);
Gradients backward(const NetworkSpec& spec, const ParamSet& params, const Matrix& x,
                   const Matrix& targets);

/// lr0 * (1 + cos(pi t / T)) / 2; T = 0 yields lr0, t = T yields exactly 0.
double cosine_lr(int t, int total_epochs, double lr0);

/// Linear ramp 0 -> peak over the warmup epochs, then cosine decay peak -> floor.
double warmup_anneal_lr(int t, int total_epochs, int warmup_epochs, double peak, double floor);

/// g = grad + weight_decay * W (+ 2 lambda (W - W_ref) on coupled layers);
/// v = momentum * v + g; W -= lr * v. Biases skip weight decay. Frozen layers
/// and their velocities are left bit-identical.
void sgd_momentum_step(ParamSet& params, const Gradients& grads, SgdState& state, double lr,
                       const TrainConfig& config, const FreezeMask& mask,
                       const ElasticCoupling* coupling = nullptr);

/// Standard bias-corrected Adam update; frozen layers untouched.
void adam_step(ParamSet& params, const Gradients& grads, AdamState& state, double lr,
               const FreezeMask& mask, double beta1 = 0.9, double beta2 = 0.999,
               double epsilon = 1e-8);

/// Mini-batch training with per-epoch seeded reshuffling and per-epoch
/// scheduler. The last incomplete batch is used. Aborts with epoch/batch
/// index if the loss turns non-finite.
TrainResult train(const NetworkSpec& spec, const ParamSet& init, const LabeledDataset& data,
                  const TrainConfig& config, const FreezeMask& mask,
                  const ElasticCoupling* coupling = nullptr);

/// Regression form: targets is an N x output_width matrix (MSE loss).
TrainResult train(const NetworkSpec& spec, const ParamSet& init, const Matrix& x,
                  const Matrix& targets, const TrainConfig& config, const FreezeMask& mask,
                  const ElasticCoupling* coupling = nullptr);

/// Fraction of rows whose argmax logit (ties toward the smaller index)
/// equals the label. Throws on an empty dataset.
double evaluate(const NetworkSpec& spec, const ParamSet& params, const LabeledDataset& data);

/// N x width_at(layer) post-activation matrix; layer 0 returns x, layer L the logits.
Matrix extract_representation(const NetworkSpec& spec, const ParamSet& params, const Matrix& x,
                              std::size_t layer);

/// 1 - cos angle between the flattened weight matrices of one layer.
double cosine_distance(const ParamSet& a, const ParamSet& b, std::size_t layer);

}  // namespace defrost
