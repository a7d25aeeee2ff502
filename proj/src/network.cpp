#include "defrost/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "defrost/rng.hpp"

namespace defrost {
namespace {

constexpr double kSqrt2OverPi = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluCubic = 0.044715;              // tanh-approximation cubic coefficient

double activate(Activation a, double x) {
  switch (a) {
    case Activation::ReLU: return x > 0.0 ? x : 0.0;
    case Activation::GeLU: {
      const double u = kSqrt2OverPi * (x + kGeluCubic * x * x * x);
      return 0.5 * x * (1.0 + std::tanh(u));
    }
    case Activation::Tanh: return std::tanh(x);
    case Activation::Identity: return x;
  }
  return x;
}

/// Derivative of the activation at pre-activation `x`; `y` is activate(a, x).
double activate_grad(Activation a, double x, double y) {
  switch (a) {
    case Activation::ReLU: return x > 0.0 ? 1.0 : 0.0;
    case Activation::GeLU: {
      const double u = kSqrt2OverPi * (x + kGeluCubic * x * x * x);
      const double t = std::tanh(u);
      const double du = kSqrt2OverPi * (1.0 + 3.0 * kGeluCubic * x * x);
      return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
    }
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

Matrix apply_activation(Activation a, const Matrix& pre) {
  Matrix post(pre.rows(), pre.cols());
  const double* src = pre.data();
  double* dst = post.data();
  for (std::size_t i = 0; i < pre.size(); ++i) dst[i] = activate(a, src[i]);
  return post;
}

/// Forward through layers [0, up_to); returns only the final post-activation.
Matrix forward_to(const NetworkSpec& spec, const ParamSet& params, const Matrix& x,
                  std::size_t up_to) {
  Matrix cur = x;
  Matrix pre;
  for (std::size_t l = 0; l < up_to; ++l) {
    affine_forward(cur, params.layers[l].weights, params.layers[l].biases, pre);
    cur = apply_activation(spec.layers[l].activation, pre);
  }
  return cur;
}

struct LossGrad {
  double loss = 0.0;
  std::size_t correct = 0;  // classification only
  Matrix dlogits;
};

LossGrad cross_entropy_grad(const Matrix& logits, std::span<const int> labels) {
  const std::size_t n = logits.rows(), c = logits.cols();
  LossGrad out;
  out.dlogits = Matrix(n, c);
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = logits.row_ptr(i);
    double m = row[0];
    std::size_t arg = 0;
    for (std::size_t j = 1; j < c; ++j)
      if (row[j] > m) { m = row[j]; arg = j; }
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - m);
    const double log_z = std::log(z);
    const int label = labels[i];
    loss += log_z - (row[label] - m);
    if (static_cast<int>(arg) == label) ++out.correct;
    double* drow = out.dlogits.row_ptr(i);
    for (std::size_t j = 0; j < c; ++j) drow[j] = std::exp(row[j] - m) / z * inv_n;
    drow[label] -= inv_n;
  }
  out.loss = loss * inv_n;
  return out;
}

LossGrad mse_grad(const Matrix& outputs, const Matrix& targets) {
  if (!outputs.same_shape(targets)) throw std::invalid_argument("mse: shape mismatch");
  LossGrad out;
  out.dlogits = Matrix(outputs.rows(), outputs.cols());
  const double scale = 1.0 / static_cast<double>(outputs.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const double diff = outputs.data()[i] - targets.data()[i];
    loss += diff * diff;
    out.dlogits.data()[i] = 2.0 * diff * scale;
  }
  out.loss = loss * scale;
  return out;
}

Gradients zero_like(const NetworkSpec& spec) {
  Gradients g;
  g.layers.reserve(spec.num_layers());
  for (const auto& layer : spec.layers)
    g.layers.push_back({Matrix(layer.in, layer.out), std::vector<double>(layer.out, 0.0)});
  return g;
}

/// Backprop from dlogits; gradients below `lowest_layer` are left at zero and
/// the input gradient is never formed.
Gradients backprop(const NetworkSpec& spec, const ParamSet& params, const ActivationStack& stack,
                   Matrix dlogits, std::size_t lowest_layer) {
  const std::size_t num_layers = spec.num_layers();
  Gradients grads = zero_like(spec);
  Matrix dpost = std::move(dlogits);
  Matrix dprev;
  for (std::size_t l = num_layers; l-- > lowest_layer;) {
    // dpre = dpost (.) act'(pre)
    const Matrix& pre = stack.pre[l];
    const Matrix& post = stack.post[l + 1];
    Matrix& dpre = dpost;  // in place
    const Activation act = spec.layers[l].activation;
    if (act != Activation::Identity) {
      for (std::size_t i = 0; i < pre.size(); ++i)
        dpre.data()[i] *= activate_grad(act, pre.data()[i], post.data()[i]);
    }
    accumulate_affine_grads(stack.post[l], dpre, grads.layers[l].weights, grads.layers[l].biases);
    if (l > lowest_layer) {
      matmul_bt(dpre, params.layers[l].weights, dprev);
      dpost = std::move(dprev);
    }
  }
  return grads;
}

struct TrainProblem {
  LossKind kind;
  std::span<const int> labels;  // CrossEntropy
  const Matrix* targets = nullptr;  // MeanSquaredError
};

TrainResult train_impl(const NetworkSpec& spec, const ParamSet& init, const Matrix& x,
                       const TrainProblem& problem, const TrainConfig& config,
                       const FreezeMask& mask, const ElasticCoupling* coupling) {
  spec.validate();
  config.validate();
  init.validate(spec);
  mask.validate(spec.num_layers());
  if (coupling) coupling->validate(spec);
  if (x.rows() == 0) throw std::invalid_argument("train: empty dataset");
  if (x.cols() != spec.input_width()) throw std::invalid_argument("train: input width mismatch");
  if (problem.kind == LossKind::CrossEntropy && problem.labels.size() != x.rows())
    throw std::invalid_argument("train: label count mismatch");

  const std::size_t n = x.rows();
  std::size_t lowest = 0;
  while (lowest < spec.num_layers() && mask.frozen[lowest]) ++lowest;
  if (lowest == spec.num_layers()) throw std::invalid_argument("train: every layer is frozen");

  TrainResult result;
  result.params = init;
  SgdState sgd = make_sgd_state(spec);
  AdamState adam = make_adam_state(spec);

  auto rng = make_rng(config.seed);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> batch_labels;
  std::vector<std::size_t> batch_idx;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.schedule == LrSchedule::Cosine
                          ? cosine_lr(epoch, config.epochs, config.lr0)
                      : config.schedule == LrSchedule::WarmupAnneal
                          ? warmup_anneal_lr(epoch, config.epochs, config.warmup_epochs, config.lr0,
                                             config.lr_floor)
                          : config.lr0;
    std::shuffle(perm.begin(), perm.end(), rng);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    const std::size_t batch = static_cast<std::size_t>(config.batch_size);
    int batch_index = 0;
    for (std::size_t start = 0; start < n; start += batch, ++batch_index) {
      const std::size_t count = std::min(batch, n - start);
      batch_idx.assign(perm.begin() + start, perm.begin() + start + count);
      Matrix xb = x.gather_rows(batch_idx);

      ActivationStack stack = forward(spec, result.params, xb);
      LossGrad lg;
      if (problem.kind == LossKind::CrossEntropy) {
        batch_labels.resize(count);
        for (std::size_t i = 0; i < count; ++i) batch_labels[i] = problem.labels[batch_idx[i]];
        lg = cross_entropy_grad(stack.logits(), batch_labels);
      } else {
        Matrix tb = problem.targets->gather_rows(batch_idx);
        lg = mse_grad(stack.logits(), tb);
      }
      if (!std::isfinite(lg.loss))
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(batch_index));
      loss_sum += lg.loss * static_cast<double>(count);
      correct += lg.correct;

      Gradients grads = backprop(spec, result.params, stack, std::move(lg.dlogits), lowest);
      if (config.optimizer == Optimizer::SgdMomentum) {
        sgd_momentum_step(result.params, grads, sgd, lr, config, mask, coupling);
      } else {
        // Weight decay and elastic coupling enter through the gradient here;
        // the Adam update itself stays the textbook rule.
        for (std::size_t l = 0; l < spec.num_layers(); ++l) {
          if (mask.frozen[l]) continue;
          Matrix& gw = grads.layers[l].weights;
          const Matrix& w = result.params.layers[l].weights;
          if (config.weight_decay > 0.0)
            for (std::size_t i = 0; i < gw.size(); ++i)
              gw.data()[i] += config.weight_decay * w.data()[i];
          if (coupling && coupling->lambda != 0.0 &&
              std::find(coupling->layer_indices.begin(), coupling->layer_indices.end(), l) !=
                  coupling->layer_indices.end()) {
            const Matrix& ref = coupling->reference.layers[l].weights;
            for (std::size_t i = 0; i < gw.size(); ++i)
              gw.data()[i] += 2.0 * coupling->lambda * (w.data()[i] - ref.data()[i]);
          }
        }
        adam_step(result.params, grads, adam, lr, mask);
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = lr;
    stats.loss = loss_sum / static_cast<double>(n);
    stats.accuracy = problem.kind == LossKind::CrossEntropy
                         ? static_cast<double>(correct) / static_cast<double>(n)
                         : std::numeric_limits<double>::quiet_NaN();
    result.history.push_back(stats);
  }
  return result;
}

}  // namespace

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "gelu") return Activation::GeLU;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation: " + name);
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::GeLU: return "gelu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

void NetworkSpec::validate() const {
  if (layers.size() < 2) throw std::invalid_argument("spec: need at least 2 parameterized layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].in == 0 || layers[l].out == 0)
      throw std::invalid_argument("spec: zero width at layer " + std::to_string(l));
    if (l > 0 && layers[l].in != layers[l - 1].out)
      throw std::invalid_argument("spec: width mismatch between layers " + std::to_string(l - 1) +
                                  " and " + std::to_string(l));
  }
  if (layers.back().activation != Activation::Identity)
    throw std::invalid_argument("spec: readout layer must have identity activation");
}

NetworkSpec NetworkSpec::slice(std::size_t first, std::size_t last) const {
  if (first >= last || last > layers.size()) throw std::invalid_argument("spec: bad slice range");
  NetworkSpec out;
  out.layers.assign(layers.begin() + first, layers.begin() + last);
  return out;
}

void ParamSet::validate(const NetworkSpec& spec) const {
  if (layers.size() != spec.num_layers()) throw std::invalid_argument("params: layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].weights.rows() != spec.layers[l].in || layers[l].weights.cols() != spec.layers[l].out)
      throw std::invalid_argument("params: weight shape mismatch at layer " + std::to_string(l));
    if (layers[l].biases.size() != spec.layers[l].out)
      throw std::invalid_argument("params: bias length mismatch at layer " + std::to_string(l));
    for (double v : layers[l].biases)
      if (!std::isfinite(v)) throw std::invalid_argument("params: non-finite bias");
    for (std::size_t i = 0; i < layers[l].weights.size(); ++i)
      if (!std::isfinite(layers[l].weights.data()[i]))
        throw std::invalid_argument("params: non-finite weight at layer " + std::to_string(l));
  }
}

ParamSet ParamSet::slice(std::size_t first, std::size_t last) const {
  if (first >= last || last > layers.size()) throw std::invalid_argument("params: bad slice range");
  ParamSet out;
  out.layers.assign(layers.begin() + first, layers.begin() + last);
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("config: epochs must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
  if (!(lr0 > 0.0)) throw std::invalid_argument("config: lr0 must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("config: momentum must be in [0,1)");
  if (weight_decay < 0.0) throw std::invalid_argument("config: weight_decay must be >= 0");
  if (schedule == LrSchedule::WarmupAnneal && (warmup_epochs < 0 || warmup_epochs > epochs))
    throw std::invalid_argument("config: warmup_epochs must be in [0, epochs]");
}

FreezeMask FreezeMask::prefix(std::size_t num_layers, std::size_t k) {
  if (k + 1 > num_layers)
    throw std::invalid_argument("freeze mask: cut " + std::to_string(k) +
                                " would freeze the readout (layers: " + std::to_string(num_layers) + ")");
  std::vector<bool> frozen(num_layers, false);
  for (std::size_t l = 0; l < k; ++l) frozen[l] = true;
  return {std::move(frozen)};
}

bool FreezeMask::any() const {
  return std::any_of(frozen.begin(), frozen.end(), [](bool b) { return b; });
}

void FreezeMask::validate(std::size_t num_layers) const {
  if (frozen.size() != num_layers) throw std::invalid_argument("freeze mask: length mismatch");
  if (!frozen.empty() && frozen.back()) throw std::invalid_argument("freeze mask: readout cannot be frozen");
}

void ElasticCoupling::validate(const NetworkSpec& spec) const {
  if (lambda < 0.0) throw std::invalid_argument("coupling: lambda must be >= 0");
  for (std::size_t l : layer_indices)
    if (l >= spec.num_layers())
      throw std::invalid_argument("coupling: layer index " + std::to_string(l) + " out of range");
  reference.validate(spec);
}

ParamSet he_init(const NetworkSpec& spec, std::uint64_t rng_seed) {
  spec.validate();
  auto rng = make_rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ParamSet params;
  params.layers.reserve(spec.num_layers());
  for (const auto& layer : spec.layers) {
    LayerParams p;
    p.weights = Matrix(layer.in, layer.out);
    const double stddev = std::sqrt(2.0 / static_cast<double>(layer.in));
    for (std::size_t i = 0; i < p.weights.size(); ++i) p.weights.data()[i] = stddev * normal(rng);
    p.biases.assign(layer.out, 0.0);
    params.layers.push_back(std::move(p));
  }
  return params;
}

SgdState make_sgd_state(const NetworkSpec& spec) { return {zero_like(spec)}; }

AdamState make_adam_state(const NetworkSpec& spec) { return {zero_like(spec), zero_like(spec), 0}; }

ActivationStack forward(const NetworkSpec& spec, const ParamSet& params, const Matrix& x) {
  if (x.cols() != spec.input_width()) throw std::invalid_argument("forward: input width mismatch");
  const std::size_t num_layers = spec.num_layers();
  ActivationStack stack;
  stack.post.resize(num_layers + 1);
  stack.pre.resize(num_layers);
  stack.post[0] = x;
  for (std::size_t l = 0; l < num_layers; ++l) {
    affine_forward(stack.post[l], params.layers[l].weights, params.layers[l].biases, stack.pre[l]);
    stack.post[l + 1] = apply_activation(spec.layers[l].activation, stack.pre[l]);
  }
  return stack;
}

double cross_entropy(const Matrix& logits, std::span<const int> labels) {
  if (labels.size() != logits.rows()) throw std::invalid_argument("cross_entropy: label count mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const double* row = logits.row_ptr(i);
    double m = row[0];
    for (std::size_t j = 1; j < logits.cols(); ++j) m = std::max(m, row[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < logits.cols(); ++j) z += std::exp(row[j] - m);
    loss += std::log(z) - (row[labels[i]] - m);
  }
  return loss / static_cast<double>(logits.rows());
}

double mean_squared_error(const Matrix& outputs, const Matrix& targets) {
  if (!outputs.same_shape(targets)) throw std::invalid_argument("mse: shape mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const double diff = outputs.data()[i] - targets.data()[i];
    loss += diff * diff;
  }
  return loss / static_cast<double>(outputs.size());
}

Gradients backward(const NetworkSpec& spec, const ParamSet& params, const Matrix& x,
                   std::span<const int> labels) {
  ActivationStack stack = forward(spec, params, x);
  LossGrad lg = cross_entropy_grad(stack.logits(), labels);
  return backprop(spec, params, stack, std::move(lg.dlogits), 0);
}

Gradients backward(const NetworkSpec& spec, const ParamSet& params, const Matrix& x,
                   const Matrix& targets) {
  ActivationStack stack = forward(spec, params, x);
  LossGrad lg = mse_grad(stack.logits(), targets);
  return backprop(spec, params, stack, std::move(lg.dlogits), 0);
}

double cosine_lr(int t, int total_epochs, double lr0) {
  if (t < 0 || (total_epochs > 0 && t > total_epochs))
    throw std::invalid_argument("cosine_lr: t outside [0, T]");
  if (total_epochs == 0 || t == 0) return lr0;
  if (t == total_epochs) return 0.0;
  return lr0 * 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(t) / static_cast<double>(total_epochs)));
}

double warmup_anneal_lr(int t, int total_epochs, int warmup_epochs, double peak, double floor) {
  if (warmup_epochs > total_epochs) throw std::invalid_argument("warmup_anneal_lr: warmup > total");
  if (t >= total_epochs) return floor;
  if (t < warmup_epochs) return peak * static_cast<double>(t) / static_cast<double>(warmup_epochs);
  if (total_epochs == warmup_epochs) return floor;
  const double progress =
      static_cast<double>(t - warmup_epochs) / static_cast<double>(total_epochs - warmup_epochs);
  return floor + (peak - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

void sgd_momentum_step(ParamSet& params, const Gradients& grads, SgdState& state, double lr,
                       const TrainConfig& config, const FreezeMask& mask,
                       const ElasticCoupling* coupling) {
  const std::size_t num_layers = params.layers.size();
  std::vector<bool> coupled(num_layers, false);
  if (coupling && coupling->lambda != 0.0)
    for (std::size_t l : coupling->layer_indices) coupled[l] = true;

  for (std::size_t l = 0; l < num_layers; ++l) {
    if (mask.frozen[l]) continue;
    Matrix& w = params.layers[l].weights;
    Matrix& vw = state.velocity.layers[l].weights;
    const Matrix& gw = grads.layers[l].weights;
    const Matrix* ref = coupled[l] ? &coupling->reference.layers[l].weights : nullptr;
    for (std::size_t i = 0; i < w.size(); ++i) {
      double g = gw.data()[i] + config.weight_decay * w.data()[i];
      if (ref) g += 2.0 * coupling->lambda * (w.data()[i] - ref->data()[i]);
      vw.data()[i] = config.momentum * vw.data()[i] + g;
      w.data()[i] -= lr * vw.data()[i];
    }
    auto& b = params.layers[l].biases;
    auto& vb = state.velocity.layers[l].biases;
    const auto& gb = grads.layers[l].biases;
    for (std::size_t i = 0; i < b.size(); ++i) {
      vb[i] = config.momentum * vb[i] + gb[i];
      b[i] -= lr * vb[i];
    }
  }
}

void adam_step(ParamSet& params, const Gradients& grads, AdamState& state, double lr,
               const FreezeMask& mask, double beta1, double beta2, double epsilon) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    if (mask.frozen[l]) continue;
    auto update = [&](double* value, double* m, double* v, const double* g, std::size_t count) {
      for (std::size_t i = 0; i < count; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        value[i] -= lr * mhat / (std::sqrt(vhat) + epsilon);
      }
    };
    update(params.layers[l].weights.data(), state.first_moment.layers[l].weights.data(),
           state.second_moment.layers[l].weights.data(), grads.layers[l].weights.data(),
           params.layers[l].weights.size());
    update(params.layers[l].biases.data(), state.first_moment.layers[l].biases.data(),
           state.second_moment.layers[l].biases.data(), grads.layers[l].biases.data(),
           params.layers[l].biases.size());
  }
}

TrainResult train(const NetworkSpec& spec, const ParamSet& init, const LabeledDataset& data,
                  const TrainConfig& config, const FreezeMask& mask, const ElasticCoupling* coupling) {
  if (config.loss != LossKind::CrossEntropy)
    throw std::invalid_argument("train: labeled datasets use the cross-entropy loss");
  if (spec.output_width() != static_cast<std::size_t>(data.num_classes))
    throw std::invalid_argument("train: readout width does not match class count");
  TrainProblem problem{LossKind::CrossEntropy, data.labels, nullptr};
  return train_impl(spec, init, data.features, problem, config, mask, coupling);
}

TrainResult train(const NetworkSpec& spec, const ParamSet& init, const Matrix& x,
                  const Matrix& targets, const TrainConfig& config, const FreezeMask& mask,
                  const ElasticCoupling* coupling) {
  if (config.loss != LossKind::MeanSquaredError)
    throw std::invalid_argument("train: matrix targets use the mean-squared-error loss");
  if (targets.rows() != x.rows()) throw std::invalid_argument("train: target row count mismatch");
  if (targets.cols() != spec.output_width())
    throw std::invalid_argument("train: target width does not match readout");
  TrainProblem problem{LossKind::MeanSquaredError, {}, &targets};
  return train_impl(spec, init, x, problem, config, mask, coupling);
}

double evaluate(const NetworkSpec& spec, const ParamSet& params, const LabeledDataset& data) {
  if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
  if (data.dim() != spec.input_width()) throw std::invalid_argument("evaluate: input width mismatch");
  std::size_t correct = 0;
  // Chunked so large datasets never materialize a full activation stack.
  const std::size_t chunk = 2048;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < data.size(); start += chunk) {
    const std::size_t count = std::min(chunk, data.size() - start);
    idx.resize(count);
    std::iota(idx.begin(), idx.end(), start);
    Matrix logits = forward_to(spec, params, data.features.gather_rows(idx), spec.num_layers());
    for (std::size_t i = 0; i < count; ++i) {
      const double* row = logits.row_ptr(i);
      std::size_t arg = 0;
      for (std::size_t j = 1; j < logits.cols(); ++j)
        if (row[j] > row[arg]) arg = j;
      if (static_cast<int>(arg) == data.labels[start + i]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

Matrix extract_representation(const NetworkSpec& spec, const ParamSet& params, const Matrix& x,
                              std::size_t layer) {
  if (layer > spec.num_layers())
    throw std::invalid_argument("extract_representation: layer " + std::to_string(layer) +
                                " out of range [0, " + std::to_string(spec.num_layers()) + "]");
  if (x.cols() != spec.input_width())
    throw std::invalid_argument("extract_representation: input width mismatch");
  return forward_to(spec, params, x, layer);
}

double cosine_distance(const ParamSet& a, const ParamSet& b, std::size_t layer) {
  if (layer >= a.layers.size() || layer >= b.layers.size())
    throw std::invalid_argument("cosine_distance: layer out of range");
  const Matrix& wa = a.layers[layer].weights;
  const Matrix& wb = b.layers[layer].weights;
  if (!wa.same_shape(wb)) throw std::invalid_argument("cosine_distance: shape mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    dot += wa.data()[i] * wb.data()[i];
    na += wa.data()[i] * wa.data()[i];
    nb += wb.data()[i] * wb.data()[i];
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_distance: zero-norm weights");
  // sqrt(na*nb) rather than sqrt(na)*sqrt(nb): identical weights then give
  // dot == na == sqrt(na*na) and the distance is exactly 0.
  return 1.0 - dot / std::sqrt(na * nb);
}

}  // namespace defrost
