#include "defrost/datagen.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "defrost/rng.hpp"

namespace defrost {
namespace {

struct ClassMoments {
  std::vector<std::vector<std::size_t>> members;  // row indices per class
  std::vector<std::vector<double>> means;
};

ClassMoments class_means(const LabeledDataset& dataset, const char* op) {
  const std::size_t d = dataset.dim();
  ClassMoments out;
  out.members.resize(dataset.num_classes);
  for (std::size_t i = 0; i < dataset.labels.size(); ++i) out.members[dataset.labels[i]].push_back(i);
  for (int c = 0; c < dataset.num_classes; ++c)
    if (out.members[c].empty())
      throw std::invalid_argument(std::string(op) + ": class " + std::to_string(c) + " has no samples");

  out.means.assign(dataset.num_classes, std::vector<double>(d, 0.0));
  for (int c = 0; c < dataset.num_classes; ++c) {
    for (std::size_t idx : out.members[c]) {
      const double* row = dataset.features.row_ptr(idx);
      for (std::size_t j = 0; j < d; ++j) out.means[c][j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(out.members[c].size());
    for (std::size_t j = 0; j < d; ++j) out.means[c][j] *= inv;
  }
  return out;
}

}  // namespace

IsoGMModel fit_isogm(const LabeledDataset& dataset) {
  const std::size_t d = dataset.dim();
  ClassMoments m = class_means(dataset, "fit_isogm");

  IsoGMModel model;
  model.means = std::move(m.means);
  model.variances.assign(dataset.num_classes, 0.0);
  for (int c = 0; c < dataset.num_classes; ++c) {
    double sum_sq = 0.0;
    for (std::size_t idx : m.members[c]) {
      const double* row = dataset.features.row_ptr(idx);
      for (std::size_t j = 0; j < d; ++j) {
        const double delta = row[j] - model.means[c][j];
        sum_sq += delta * delta;
      }
    }
    // Average of the D per-dimension ML variances.
    model.variances[c] = sum_sq / (static_cast<double>(m.members[c].size()) * static_cast<double>(d));
  }
  return model;
}

GMModel fit_gm(const LabeledDataset& dataset) {
  const std::size_t d = dataset.dim();
  ClassMoments m = class_means(dataset, "fit_gm");

  GMModel model;
  model.means = std::move(m.means);
  model.covariances.reserve(dataset.num_classes);
  model.cholesky_factors.reserve(dataset.num_classes);
  model.jitters.reserve(dataset.num_classes);

  std::vector<double> centered(d);
  for (int c = 0; c < dataset.num_classes; ++c) {
    Matrix cov(d, d);
    for (std::size_t idx : m.members[c]) {
      const double* row = dataset.features.row_ptr(idx);
      for (std::size_t j = 0; j < d; ++j) centered[j] = row[j] - model.means[c][j];
      for (std::size_t j = 0; j < d; ++j) {
        const double cj = centered[j];
        double* covj = cov.row_ptr(j);
        for (std::size_t k = 0; k <= j; ++k) covj[k] += cj * centered[k];
      }
    }
    const double inv = 1.0 / static_cast<double>(m.members[c].size());
    double trace = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k <= j; ++k) {
        cov(j, k) *= inv;
        cov(k, j) = cov(j, k);
      }
      trace += cov(j, j);
    }
    // Relative jitter with an absolute floor so rank-deficient classes
    // (down to a single sample) still factorize.
    const double jitter = 1e-6 * trace / static_cast<double>(d) + 1e-12;
    model.covariances.push_back(cov);
    model.cholesky_factors.push_back(cholesky(cov, jitter));
    model.jitters.push_back(jitter);
  }
  return model;
}

Matrix cholesky(const Matrix& sigma, double jitter) {
  const std::size_t d = sigma.rows();
  if (sigma.cols() != d) throw std::invalid_argument("cholesky: matrix must be square");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(sigma(i, j) - sigma(j, i)) > 1e-12 * (1.0 + std::abs(sigma(i, j))))
        throw std::invalid_argument("cholesky: matrix is not symmetric at (" + std::to_string(i) +
                                    "," + std::to_string(j) + ")");

  Matrix l(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = sigma(j, j) + jitter;
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (diag <= 0.0)
      throw std::runtime_error("cholesky: not positive definite after jitter, pivot " +
                               std::to_string(diag) + " at column " + std::to_string(j));
    l(j, j) = std::sqrt(diag);
    const double inv = 1.0 / l(j, j);
    for (std::size_t i = j + 1; i < d; ++i) {
      double acc = sigma(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      l(i, j) = acc * inv;
    }
  }
  return l;
}

namespace {

LabeledDataset sample_classwise(std::size_t d, int classes, std::size_t n_per_class,
                                std::uint64_t rng_seed,
                                const std::function<void(int, const double*, double*)>& transform) {
  LabeledDataset out;
  out.num_classes = classes;
  out.features = Matrix(n_per_class * static_cast<std::size_t>(classes), d);
  out.labels.reserve(out.features.rows());

  auto rng = make_rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(d);
  std::size_t row = 0;
  for (int c = 0; c < classes; ++c) {
    for (std::size_t s = 0; s < n_per_class; ++s, ++row) {
      for (std::size_t j = 0; j < d; ++j) z[j] = normal(rng);
      transform(c, z.data(), out.features.row_ptr(row));
      out.labels.push_back(c);
    }
  }
  return out;
}

}  // namespace

LabeledDataset sample_mixture(const IsoGMModel& model, std::size_t n_per_class, std::uint64_t rng_seed) {
  if (n_per_class < 1) throw std::invalid_argument("sample_mixture: n_per_class must be >= 1");
  const std::size_t d = model.dim();
  std::vector<double> sigmas(model.classes());
  for (std::size_t c = 0; c < model.classes(); ++c) {
    if (model.variances[c] < 0.0) throw std::invalid_argument("sample_mixture: negative variance");
    sigmas[c] = std::sqrt(model.variances[c]);
  }
  return sample_classwise(d, static_cast<int>(model.classes()), n_per_class, rng_seed,
                          [&](int c, const double* z, double* x) {
                            for (std::size_t j = 0; j < d; ++j) x[j] = model.means[c][j] + sigmas[c] * z[j];
                          });
}

LabeledDataset sample_mixture(const GMModel& model, std::size_t n_per_class, std::uint64_t rng_seed) {
  if (n_per_class < 1) throw std::invalid_argument("sample_mixture: n_per_class must be >= 1");
  const std::size_t d = model.dim();
  return sample_classwise(d, static_cast<int>(model.classes()), n_per_class, rng_seed,
                          [&](int c, const double* z, double* x) {
                            const Matrix& l = model.cholesky_factors[c];
                            for (std::size_t i = 0; i < d; ++i) {
                              double acc = model.means[c][i];
                              const double* li = l.row_ptr(i);
                              for (std::size_t k = 0; k <= i; ++k) acc += li[k] * z[k];
                              x[i] = acc;
                            }
                          });
}

LabeledDataset make_reference(const ReferenceConfig& cfg, std::size_t n_per_class,
                              std::uint64_t rng_seed) {
  if (cfg.latent_dim > cfg.dim) throw std::invalid_argument("make_reference: latent_dim must be <= dim");
  if (cfg.latent_dim < 2) throw std::invalid_argument("make_reference: latent_dim must be >= 2");
  if (!(cfg.higher_order_strength >= 0.0) || !std::isfinite(cfg.higher_order_strength))
    throw std::invalid_argument("make_reference: higher_order_strength must be finite and >= 0");
  if (cfg.num_classes < 2) throw std::invalid_argument("make_reference: num_classes must be >= 2");

  const std::size_t d = cfg.dim, k = cfg.latent_dim;

  // Structural randomness: class-specific mixing matrices and latent index
  // pairings, fixed by the structure seed so every call sees the same task.
  auto struct_rng = make_rng(mix_seed(cfg.structure_seed, 0xb0d1));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double mix_scale = 1.0 / std::sqrt(static_cast<double>(k));
  std::vector<Matrix> mixing(cfg.num_classes, Matrix(d, k));
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairing(cfg.num_classes);
  for (int c = 0; c < cfg.num_classes; ++c) {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < k; ++j) mixing[c](i, j) = mix_scale * normal(struct_rng);
    pairing[c].resize(d);
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    for (std::size_t i = 0; i < d; ++i) {
      std::size_t a = pick(struct_rng);
      std::size_t b = pick(struct_rng);
      while (b == a) b = pick(struct_rng);
      pairing[c][i] = {a, b};
    }
  }

  const double alpha = cfg.higher_order_strength;
  auto rng = make_rng(rng_seed);
  LabeledDataset out;
  out.num_classes = cfg.num_classes;
  out.features = Matrix(n_per_class * static_cast<std::size_t>(cfg.num_classes), d);
  out.labels.reserve(out.features.rows());
  std::vector<double> z(k);
  std::size_t row = 0;
  for (int c = 0; c < cfg.num_classes; ++c) {
    const Matrix& b = mixing[c];
    for (std::size_t s = 0; s < n_per_class; ++s, ++row) {
      for (std::size_t j = 0; j < k; ++j) z[j] = normal(rng);
      double* x = out.features.row_ptr(row);
      for (std::size_t i = 0; i < d; ++i) {
        const double* bi = b.row_ptr(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += bi[j] * z[j];
        const auto [pa, pb] = pairing[c][i];
        x[i] = acc + alpha * z[pa] * z[pb];
      }
      out.labels.push_back(c);
    }
  }
  return out;
}

}  // namespace defrost
