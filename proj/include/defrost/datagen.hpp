#pragma once

#include <cstdint>
#include <vector>

#include "defrost/dataset.hpp"
#include "defrost/matrix.hpp"

namespace defrost {

/// Per-class mean plus a single isotropic variance. First level of the
/// clone hierarchy: only first moments (and an overall scale) are matched.
struct IsoGMModel {
  std::vector<std::vector<double>> means;  // C x D
  std::vector<double> variances;           // C, each >= 0
  std::size_t dim() const { return means.empty() ? 0 : means[0].size(); }
  std::size_t classes() const { return means.size(); }
};

/// Per-class mean and full covariance; second level of the hierarchy.
/// The Cholesky factor of sigma + jitter*I is cached for sampling.
struct GMModel {
  std::vector<std::vector<double>> means;  // C x D
  std::vector<Matrix> covariances;         // C, each D x D symmetric
  std::vector<Matrix> cholesky_factors;    // C, lower-triangular
  std::vector<double> jitters;             // epsilon actually added per class
  std::size_t dim() const { return means.empty() ? 0 : means[0].size(); }
  std::size_t classes() const { return means.size(); }
};

/// Desk-scale ground-truth generator: class-conditional latent-linear data
/// with optional beyond-second-moment structure.
struct ReferenceConfig {
  std::size_t dim = 32;             // D
  int num_classes = 4;              // C
  std::size_t latent_dim = 8;       // K <= D
  double higher_order_strength = 0.0;  // alpha >= 0
  std::uint64_t structure_seed = 0;    // fixes mixing matrices and index pairings
};

/// Maximum-likelihood fit (1/N_c normalization): per-class mean, isotropic
/// variance = average of per-dimension variances. Throws naming any class
/// with no samples.
IsoGMModel fit_isogm(const LabeledDataset& dataset);

/// Maximum-likelihood fit of per-class mean and full covariance; caches the
/// Cholesky factor of sigma_c + eps*I with eps = 1e-6 * trace(sigma_c)/D + 1e-12.
GMModel fit_gm(const LabeledDataset& dataset);

/// Lower-triangular L with L L^T = sigma + jitter*I. Throws if the jittered
/// matrix is not positive definite, reporting the failing pivot.
Matrix cholesky(const Matrix& sigma, double jitter);

/// Draws n_per_class samples per class, class-major order, x = mu_c + L_c z
/// with z standard normal. Deterministic given the seed.
LabeledDataset sample_mixture(const IsoGMModel& model, std::size_t n_per_class, std::uint64_t rng_seed);
LabeledDataset sample_mixture(const GMModel& model, std::size_t n_per_class, std::uint64_t rng_seed);

/// Reference data: per class c, latent z ~ N(0, I_K), x = B_c z + alpha * q_c(z)
/// where B_c is a fixed class-specific D x K mixing matrix and q_c(z) has
/// components z_a z_b over a fixed class-specific pairing of distinct latent
/// indices. alpha > 0 injects class-conditional structure invisible to the
/// first two moments. Structure is fixed by cfg.structure_seed; sample noise
/// by rng_seed.
LabeledDataset make_reference(const ReferenceConfig& cfg, std::size_t n_per_class,
                              std::uint64_t rng_seed);

}  // namespace defrost
