#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "defrost/network.hpp"
#include "defrost/rng.hpp"
#include "oracles.hpp"

using namespace defrost;

namespace {

NetworkSpec mlp(std::initializer_list<std::size_t> widths, Activation hidden = Activation::ReLU) {
  NetworkSpec spec;
  auto it = widths.begin();
  std::size_t prev = *it++;
  std::vector<std::size_t> rest(it, widths.end());
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const bool last = i + 1 == rest.size();
    spec.layers.push_back({prev, rest[i], last ? Activation::Identity : hidden});
    prev = rest[i];
  }
  return spec;
}

bool params_equal(const ParamSet& a, const ParamSet& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (!(a.layers[l].weights == b.layers[l].weights)) return false;
    if (a.layers[l].biases != b.layers[l].biases) return false;
  }
  return true;
}

LabeledDataset two_blobs(std::size_t n_per_class, std::size_t dim, double offset,
                         std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledDataset data;
  data.num_classes = 2;
  data.features = Matrix(2 * n_per_class, dim);
  for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
    const int label = i < n_per_class ? 0 : 1;
    for (std::size_t j = 0; j < dim; ++j)
      data.features(i, j) = normal(rng) + (label == 0 ? -offset : offset);
    data.labels.push_back(label);
  }
  return data;
}

}  // namespace

TEST_CASE("he_init draws the documented distribution") {
  NetworkSpec spec = mlp({50, 500, 10});
  ParamSet params = he_init(spec, 42);

  for (const auto& layer : params.layers)
    for (double b : layer.biases) CHECK(b == 0.0);

  // fan_in = 50: weight variance should be near 2/50 = 0.04.
  const Matrix& w = params.layers[0].weights;
  double mean = 0.0, var = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) mean += w.data()[i];
  mean /= static_cast<double>(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    var += (w.data()[i] - mean) * (w.data()[i] - mean);
  var /= static_cast<double>(w.size());
  CHECK(var == doctest::Approx(0.04).epsilon(0.15));

  CHECK(params_equal(params, he_init(spec, 42)));
  CHECK_FALSE(params_equal(params, he_init(spec, 43)));
}

TEST_CASE("forward reproduces identity and saturation cases") {
  SUBCASE("identity chain returns the input") {
    NetworkSpec spec = mlp({3, 3, 3}, Activation::Identity);
    ParamSet params;
    for (int l = 0; l < 2; ++l) {
      LayerParams p;
      p.weights = Matrix(3, 3);
      for (int i = 0; i < 3; ++i) p.weights(i, i) = 1.0;
      p.biases.assign(3, 0.0);
      params.layers.push_back(p);
    }
    auto rng = make_rng(7);
    Matrix x = oracle::random_matrix(5, 3, rng);
    ActivationStack stack = forward(spec, params, x);
    CHECK(stack.logits() == x);
    CHECK(stack.post.size() == 3);
    CHECK(stack.pre.size() == 2);
  }

  SUBCASE("relu of all-negative pre-activations is the zero matrix") {
    NetworkSpec spec = mlp({2, 4, 2});
    ParamSet params;
    params.layers.push_back({Matrix(2, 4, 0.0), std::vector<double>(4, -1.0)});
    params.layers.push_back({Matrix(4, 2, 0.0), std::vector<double>(2, 0.0)});
    Matrix x(3, 2, 1.0);
    ActivationStack stack = forward(spec, params, x);
    for (std::size_t i = 0; i < stack.post[1].size(); ++i) CHECK(stack.post[1].data()[i] == 0.0);
  }

  SUBCASE("hand-computed two-layer example") {
    NetworkSpec spec = mlp({2, 2, 2}, Activation::Tanh);
    ParamSet params;
    params.layers.push_back({Matrix::from_rows({{0.2, -0.4}, {0.1, 0.3}}), {0.05, -0.02}});
    params.layers.push_back({Matrix::from_rows({{1.2, -0.7}, {0.4, 0.25}}), {0.1, 0.2}});
    Matrix x = Matrix::from_rows({{0.5, -1.0}});
    ActivationStack stack = forward(spec, params, x);

    const double pre0 = 0.5 * 0.2 + (-1.0) * 0.1 + 0.05;
    const double pre1 = 0.5 * (-0.4) + (-1.0) * 0.3 + (-0.02);
    const double h0 = std::tanh(pre0);
    const double h1 = std::tanh(pre1);
    const double out0 = h0 * 1.2 + h1 * 0.4 + 0.1;
    const double out1 = h0 * (-0.7) + h1 * 0.25 + 0.2;
    CHECK(stack.logits()(0, 0) == doctest::Approx(out0).epsilon(1e-12));
    CHECK(stack.logits()(0, 1) == doctest::Approx(out1).epsilon(1e-12));
  }
}

TEST_CASE("cross_entropy matches closed forms and a naive oracle") {
  SUBCASE("uniform logits give ln C") {
    Matrix logits(3, 10, 0.7);
    std::vector<int> labels{0, 5, 9};
    CHECK(cross_entropy(logits, labels) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
  }
  SUBCASE("saturated correct logit gives ~0 loss") {
    Matrix logits(1, 4, 0.0);
    logits(0, 2) = 50.0;
    std::vector<int> labels{2};
    CHECK(cross_entropy(logits, labels) < 1e-10);
  }
  SUBCASE("random case matches direct softmax in extended precision") {
    auto rng = make_rng(11);
    Matrix logits = oracle::random_matrix(17, 6, rng, 3.0);
    std::vector<int> labels(17);
    std::uniform_int_distribution<int> pick(0, 5);
    for (auto& l : labels) l = pick(rng);
    long double naive = 0.0L;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
      long double z = 0.0L;
      for (std::size_t j = 0; j < logits.cols(); ++j)
        z += std::exp(static_cast<long double>(logits(i, j)));
      naive += -std::log(std::exp(static_cast<long double>(logits(i, labels[i]))) / z);
    }
    naive /= logits.rows();
    CHECK(cross_entropy(logits, labels) ==
          doctest::Approx(static_cast<double>(naive)).epsilon(1e-12));
  }
}

TEST_CASE("backward matches central finite differences on random small networks") {
  auto rng = make_rng(123);
  std::uniform_int_distribution<std::size_t> width(1, 8);
  std::uniform_int_distribution<int> depth(2, 3), act(0, 2), n_samples(1, 6);
  const Activation acts[] = {Activation::ReLU, Activation::GeLU, Activation::Tanh};

  double worst = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    NetworkSpec spec;
    const int layers = depth(rng);
    std::size_t prev = width(rng);
    const std::size_t input = prev;
    for (int l = 0; l < layers; ++l) {
      const std::size_t out = width(rng);
      spec.layers.push_back({prev, out, l + 1 == layers ? Activation::Identity : acts[act(rng)]});
      prev = out;
    }
    ParamSet params = he_init(spec, 1000 + trial);
    const std::size_t n = n_samples(rng);
    Matrix x = oracle::random_matrix(n, input, rng);

    if (trial % 2 == 0) {
      std::vector<int> labels(n);
      std::uniform_int_distribution<int> pick(0, static_cast<int>(spec.output_width()) - 1);
      for (auto& l : labels) l = pick(rng);
      Gradients analytic = backward(spec, params, x, labels);
      auto loss = [&](const ParamSet& p) {
        return cross_entropy(forward(spec, p, x).logits(), labels);
      };
      worst = std::max(worst, oracle::fd_gradients(params, analytic, loss).max_rel_err);
    } else {
      Matrix targets = oracle::random_matrix(n, spec.output_width(), rng);
      Gradients analytic = backward(spec, params, x, targets);
      auto loss = [&](const ParamSet& p) {
        return mean_squared_error(forward(spec, p, x).logits(), targets);
      };
      worst = std::max(worst, oracle::fd_gradients(params, analytic, loss).max_rel_err);
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("backward edge contracts") {
  SUBCASE("zero loss gives zero gradients") {
    NetworkSpec spec = mlp({2, 3, 2}, Activation::Tanh);
    ParamSet params = he_init(spec, 5);
    auto rng = make_rng(6);
    Matrix x = oracle::random_matrix(4, 2, rng);
    Matrix targets = forward(spec, params, x).logits();  // loss is exactly 0
    Gradients g = backward(spec, params, x, targets);
    for (const auto& layer : g.layers) {
      for (std::size_t i = 0; i < layer.weights.size(); ++i) CHECK(layer.weights.data()[i] == 0.0);
      for (double b : layer.biases) CHECK(b == 0.0);
    }
  }
  SUBCASE("gradients are produced for every layer; masking is the optimizer's job") {
    NetworkSpec spec = mlp({3, 4, 2});
    ParamSet params = he_init(spec, 9);
    auto rng = make_rng(10);
    Matrix x = oracle::random_matrix(6, 3, rng);
    std::vector<int> labels{0, 1, 0, 1, 0, 1};
    Gradients g = backward(spec, params, x, labels);
    REQUIRE(g.layers.size() == 2);
    double norm0 = 0.0;
    for (std::size_t i = 0; i < g.layers[0].weights.size(); ++i)
      norm0 += std::abs(g.layers[0].weights.data()[i]);
    CHECK(norm0 > 0.0);
  }
}

TEST_CASE("learning rate schedules hit their endpoints") {
  CHECK(cosine_lr(0, 100, 0.1) == 0.1);
  CHECK(cosine_lr(100, 100, 0.1) == 0.0);
  CHECK(cosine_lr(50, 100, 0.1) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(cosine_lr(0, 0, 0.1) == 0.1);

  CHECK(warmup_anneal_lr(10, 50, 10, 1e-3, 1e-5) == 1e-3);
  CHECK(warmup_anneal_lr(50, 50, 10, 1e-3, 1e-5) == 1e-5);
  CHECK(warmup_anneal_lr(5, 50, 10, 1e-3, 1e-5) == doctest::Approx(5e-4).epsilon(1e-14));
  CHECK(warmup_anneal_lr(0, 50, 10, 1e-3, 1e-5) == 0.0);
}

TEST_CASE("sgd_momentum_step follows the update rule") {
  NetworkSpec spec = mlp({1, 1, 1}, Activation::Identity);
  auto build = [&]() {
    ParamSet p;
    p.layers.push_back({Matrix(1, 1, 2.0), {0.5}});
    p.layers.push_back({Matrix(1, 1, -1.0), {0.25}});
    return p;
  };
  Gradients grads;
  grads.layers.push_back({Matrix(1, 1, 0.3), {0.1}});
  grads.layers.push_back({Matrix(1, 1, -0.2), {0.05}});
  TrainConfig config;
  config.momentum = 0.9;
  config.weight_decay = 0.01;

  SUBCASE("hand-computed step, no coupling") {
    ParamSet params = build();
    SgdState state = make_sgd_state(spec);
    state.velocity.layers[0].weights(0, 0) = 0.5;
    sgd_momentum_step(params, grads, state, 0.1, config, FreezeMask::none(2));
    // layer 0 weight: g = 0.3 + 0.01*2 = 0.32; v = 0.9*0.5 + 0.32 = 0.77; w = 2 - 0.077
    CHECK(params.layers[0].weights(0, 0) == doctest::Approx(2.0 - 0.077).epsilon(1e-15));
    // layer 0 bias: no weight decay; v = 0.1; b = 0.5 - 0.01
    CHECK(params.layers[0].biases[0] == doctest::Approx(0.49).epsilon(1e-15));
  }

  SUBCASE("all-frozen mask leaves parameters bit-identical") {
    ParamSet params = build();
    SgdState state = make_sgd_state(spec);
    FreezeMask mask{{true, true}};
    sgd_momentum_step(params, grads, state, 0.1, config, mask);
    CHECK(params_equal(params, build()));
  }

  SUBCASE("dominant coupling pulls weights toward the reference") {
    ParamSet params = build();
    ParamSet reference = build();
    reference.layers[0].weights(0, 0) = 10.0;
    ElasticCoupling coupling{50.0, {0}, reference};
    Gradients zero;
    zero.layers.push_back({Matrix(1, 1, 0.0), {0.0}});
    zero.layers.push_back({Matrix(1, 1, 0.0), {0.0}});
    TrainConfig plain;
    plain.weight_decay = 0.0;
    plain.momentum = 0.0;
    SgdState state = make_sgd_state(spec);
    const double before = std::abs(params.layers[0].weights(0, 0) - 10.0);
    sgd_momentum_step(params, zero, state, 1e-3, plain, FreezeMask::none(2), &coupling);
    const double after = std::abs(params.layers[0].weights(0, 0) - 10.0);
    CHECK(after < before);
  }
}

TEST_CASE("adam_step basics and scripted 1-d quadratic trajectory") {
  NetworkSpec spec = mlp({1, 2, 1}, Activation::Identity);

  SUBCASE("first step moves by ~ -lr * sign(g)") {
    ParamSet params;
    params.layers.push_back({Matrix(1, 2, 1.0), {0.0, 0.0}});
    params.layers.push_back({Matrix(2, 1, 1.0), {0.0}});
    Gradients grads;
    grads.layers.push_back({Matrix(1, 2, 0.0), {0.0, 0.0}});
    grads.layers.push_back({Matrix(2, 1, 0.0), {0.0}});
    grads.layers[0].weights(0, 0) = 0.3;
    grads.layers[0].weights(0, 1) = -2.0;
    AdamState state = make_adam_state(spec);
    adam_step(params, grads, state, 0.01, FreezeMask::none(2));
    CHECK(params.layers[0].weights(0, 0) == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
    CHECK(params.layers[0].weights(0, 1) == doctest::Approx(1.0 + 0.01).epsilon(1e-6));
  }

  SUBCASE("zero gradients never move parameters") {
    ParamSet params;
    params.layers.push_back({Matrix(1, 2, 1.5), {0.25, -0.5}});
    params.layers.push_back({Matrix(2, 1, -0.75), {1.0}});
    ParamSet before = params;
    Gradients zero;
    zero.layers.push_back({Matrix(1, 2, 0.0), {0.0, 0.0}});
    zero.layers.push_back({Matrix(2, 1, 0.0), {0.0}});
    AdamState state = make_adam_state(spec);
    for (int i = 0; i < 10; ++i) adam_step(params, zero, state, 0.05, FreezeMask::none(2));
    CHECK(params_equal(params, before));
  }

  SUBCASE("1-d quadratic trajectory matches an independent scalar loop") {
    // minimize (w - 3)^2 from w = 0
    NetworkSpec tiny;
    tiny.layers.push_back({1, 1, Activation::Identity});
    tiny.layers.push_back({1, 1, Activation::Identity});
    ParamSet params;
    params.layers.push_back({Matrix(1, 1, 0.0), {0.0}});
    params.layers.push_back({Matrix(1, 1, 0.0), {0.0}});
    AdamState state = make_adam_state(tiny);
    FreezeMask mask{{false, true}};  // only the first scalar moves

    double w = 0.0, m = 0.0, v = 0.0;
    const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    for (int t = 1; t <= 120; ++t) {
      const double g = 2.0 * (w - 3.0);
      m = b1 * m + (1 - b1) * g;
      v = b2 * v + (1 - b2) * g * g;
      w -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);

      Gradients grads;
      grads.layers.push_back({Matrix(1, 1, 2.0 * (params.layers[0].weights(0, 0) - 3.0)), {0.0}});
      grads.layers.push_back({Matrix(1, 1, 0.0), {0.0}});
      adam_step(params, grads, state, lr, mask);
      // the frozen second layer must not even accumulate moments
      CHECK(state.first_moment.layers[1].weights(0, 0) == 0.0);
    }
    CHECK(params.layers[0].weights(0, 0) == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("train behavior on small problems") {
  SUBCASE("zero epochs returns the initialization") {
    NetworkSpec spec = mlp({4, 8, 2});
    ParamSet init = he_init(spec, 3);
    LabeledDataset data = two_blobs(16, 4, 1.0, 21);
    TrainConfig config;
    config.epochs = 0;
    TrainResult result = train(spec, init, data, config, FreezeMask::none(2));
    CHECK(params_equal(result.params, init));
    CHECK(result.history.empty());
  }

  SUBCASE("separable blobs reach >= 0.99 train accuracy") {
    NetworkSpec spec = mlp({4, 8, 2});
    LabeledDataset data = two_blobs(100, 4, 2.0, 22);
    TrainConfig config;
    config.epochs = 30;
    config.lr0 = 0.1;
    TrainResult result = train(spec, he_init(spec, 4), data, config, FreezeMask::none(2));
    CHECK(evaluate(spec, result.params, data) >= 0.99);
    CHECK(result.history.size() == 30);
    CHECK(result.history.back().accuracy >= 0.99);
  }

  SUBCASE("random frozen features near chance on a hard nonlinear task") {
    // 2-d xor-style labels: a frozen random 2-unit relu layer rarely helps,
    // while full training solves the task.
    auto rng = make_rng(77);
    std::normal_distribution<double> normal(0.0, 1.0);
    LabeledDataset data;
    data.num_classes = 2;
    data.features = Matrix(400, 2);
    for (std::size_t i = 0; i < 400; ++i) {
      data.features(i, 0) = normal(rng);
      data.features(i, 1) = normal(rng);
      data.labels.push_back((data.features(i, 0) > 0) != (data.features(i, 1) > 0) ? 1 : 0);
    }
    NetworkSpec spec = mlp({2, 2, 2, 2});
    TrainConfig config;
    config.epochs = 60;
    double frozen_mean = 0.0, scratch_mean = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      ParamSet init = he_init(spec, 100 + seed);
      TrainConfig c = config;
      c.seed = seed;
      FreezeMask frozen{{true, true, false}};
      frozen_mean += evaluate(spec, train(spec, init, data, c, frozen).params, data);
      scratch_mean += evaluate(spec, train(spec, init, data, c, FreezeMask::none(3)).params, data);
    }
    frozen_mean /= 3.0;
    scratch_mean /= 3.0;
    CHECK(frozen_mean < 0.70);
    CHECK(scratch_mean > 0.90);
  }

  SUBCASE("training is deterministic given identical inputs") {
    NetworkSpec spec = mlp({4, 6, 3, 2});
    LabeledDataset data = two_blobs(24, 4, 1.0, 30);
    TrainConfig config;
    config.epochs = 8;
    config.seed = 99;
    ParamSet init = he_init(spec, 12);
    TrainResult a = train(spec, init, data, config, FreezeMask::none(3));
    TrainResult b = train(spec, init, data, config, FreezeMask::none(3));
    CHECK(params_equal(a.params, b.params));
  }

  SUBCASE("frozen layers stay bit-identical through training") {
    NetworkSpec spec = mlp({4, 6, 3, 2});
    LabeledDataset data = two_blobs(24, 4, 1.0, 31);
    TrainConfig config;
    config.epochs = 10;
    ParamSet init = he_init(spec, 13);
    FreezeMask mask = FreezeMask::prefix(3, 2);
    TrainResult result = train(spec, init, data, config, mask);
    CHECK(result.params.layers[0].weights == init.layers[0].weights);
    CHECK(result.params.layers[0].biases == init.layers[0].biases);
    CHECK(result.params.layers[1].weights == init.layers[1].weights);
    CHECK_FALSE(result.params.layers[2].weights == init.layers[2].weights);
  }

  SUBCASE("lambda zero coupling is bit-identical to no coupling") {
    NetworkSpec spec = mlp({4, 6, 2});
    LabeledDataset data = two_blobs(24, 4, 1.0, 32);
    TrainConfig config;
    config.epochs = 6;
    ParamSet init = he_init(spec, 14);
    ElasticCoupling coupling{0.0, {0}, he_init(spec, 15)};
    TrainResult with = train(spec, init, data, config, FreezeMask::none(2), &coupling);
    TrainResult without = train(spec, init, data, config, FreezeMask::none(2));
    CHECK(params_equal(with.params, without.params));
  }
}

TEST_CASE("evaluate counts argmax matches") {
  SUBCASE("perfect hand-built classifier scores 1.0") {
    NetworkSpec spec;
    spec.layers.push_back({1, 2, Activation::Identity});
    spec.layers.push_back({2, 2, Activation::Identity});
    ParamSet params;
    params.layers.push_back({Matrix::from_rows({{-1.0, 1.0}}), {0.0, 0.0}});
    params.layers.push_back({Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}}), {0.0, 0.0}});
    LabeledDataset data;
    data.num_classes = 2;
    data.features = Matrix::from_rows({{-2.0}, {0.5}, {3.0}, {-0.25}});
    data.labels = {0, 1, 1, 0};
    CHECK(evaluate(spec, params, data) == 1.0);
  }

  SUBCASE("random labels score about 1/C") {
    auto rng = make_rng(41);
    NetworkSpec spec = mlp({6, 8, 4});
    ParamSet params = he_init(spec, 40);
    LabeledDataset data;
    data.num_classes = 4;
    data.features = oracle::random_matrix(4000, 6, rng);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int i = 0; i < 4000; ++i) data.labels.push_back(pick(rng));
    CHECK(evaluate(spec, params, data) == doctest::Approx(0.25).epsilon(0.2));
  }

  SUBCASE("single sample is 0 or 1") {
    NetworkSpec spec = mlp({2, 4, 3});
    ParamSet params = he_init(spec, 50);
    LabeledDataset data;
    data.num_classes = 3;
    data.features = Matrix(1, 2, 0.3);
    data.labels = {1};
    const double acc = evaluate(spec, params, data);
    CHECK((acc == 0.0 || acc == 1.0));
  }

  SUBCASE("empty dataset is rejected") {
    NetworkSpec spec = mlp({2, 4, 3});
    LabeledDataset data;
    data.num_classes = 3;
    CHECK_THROWS(evaluate(spec, he_init(spec, 1), data));
  }
}

TEST_CASE("extract_representation taps the requested layer") {
  NetworkSpec spec = mlp({3, 5, 4, 2});
  ParamSet params = he_init(spec, 60);
  auto rng = make_rng(61);
  Matrix x = oracle::random_matrix(7, 3, rng);

  CHECK(extract_representation(spec, params, x, 0) == x);
  CHECK(extract_representation(spec, params, x, 3) == forward(spec, params, x).logits());
  Matrix mid = extract_representation(spec, params, x, 2);
  CHECK(mid.rows() == 7);
  CHECK(mid.cols() == spec.width_at(2));
  CHECK(mid == forward(spec, params, x).post[2]);
  CHECK_THROWS(extract_representation(spec, params, x, 4));
}

TEST_CASE("cosine_distance endpoints") {
  ParamSet a;
  a.layers.push_back({Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}}), {0.0, 0.0}});
  a.layers.push_back({Matrix(2, 2, 1.0), {0.0, 0.0}});
  ParamSet b = a;
  CHECK(cosine_distance(a, b, 0) == 0.0);

  for (std::size_t i = 0; i < 4; ++i) b.layers[0].weights.data()[i] = -a.layers[0].weights.data()[i];
  CHECK(cosine_distance(a, b, 0) == doctest::Approx(2.0).epsilon(1e-15));

  b.layers[0].weights = Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.0}});
  CHECK(cosine_distance(a, b, 0) == doctest::Approx(1.0).epsilon(1e-15));

  b.layers[0].weights = Matrix(2, 2, 0.0);
  CHECK_THROWS(cosine_distance(a, b, 0));
}

TEST_CASE("spec and config validation") {
  NetworkSpec bad = mlp({4, 8, 2});
  bad.layers.back().activation = Activation::ReLU;
  CHECK_THROWS(bad.validate());

  NetworkSpec mismatched = mlp({4, 8, 2});
  mismatched.layers[1].in = 7;
  CHECK_THROWS(mismatched.validate());

  TrainConfig config;
  config.momentum = 1.0;
  CHECK_THROWS(config.validate());

  CHECK_THROWS(FreezeMask::prefix(3, 3));
  FreezeMask bad_mask{{false, false, true}};
  CHECK_THROWS(bad_mask.validate(3));
}
