#pragma once

#include <string>
#include <vector>

#include "defrost/matrix.hpp"
#include "defrost/network.hpp"

namespace defrost {

/// A representation is an N x d activation matrix whose rows are aligned
/// across everything being compared (same probe points, same order).
using Representation = Matrix;

struct CurvePoint {
  std::size_t layer = 0;
  std::string metric;
  double value = 0.0;
};

struct SimilarityCurve {
  std::vector<CurvePoint> points;
};

/// Exact squared Euclidean distances, zero diagonal, symmetric by construction.
Matrix pairwise_sq_dist(const Representation& rep);

/// Rank-based directional dissimilarity: for each point i, j = nearest
/// neighbor of i in A (ties toward the smaller index), n_i = number of points
/// p != i, j strictly closer to i than j is in B; returns (2/N^2) sum n_i.
/// 0 means A's neighborhoods fully predict B's; ~1 means no information.
double information_imbalance(const Representation& a, const Representation& b);

/// Both directions at once (A->B, B->A); saves one distance-matrix pass.
std::pair<double, double> information_imbalance_both(const Representation& a, const Representation& b);

/// Linear centered kernel alignment on column-centered matrices:
/// ||B_c^T A_c||_F^2 / (||A_c^T A_c||_F ||B_c^T B_c||_F), in [0, 1].
/// Invariant to orthogonal transforms and isotropic scaling of either side.
double linear_cka(const Representation& a, const Representation& b);

/// Mean over points of |kNN_A(i) intersect kNN_B(i)| / k, ties by index.
double neighborhood_overlap(const Representation& a, const Representation& b, std::size_t k);

/// For each point, Spearman rank correlation (midrank ties) between the
/// distances of its k A-nearest neighbors measured in A and in B; averaged.
double spearman_neighborhoods(const Representation& a, const Representation& b, std::size_t k);

struct MetricRequest {
  std::string name;      // "ii", "cka", "overlap", "spearman"
  std::size_t k = 0;     // overlap/spearman neighborhood size; 0 = default (30 / 100)
};

/// Applies the metric to the two networks' representations at every layer
/// l >= 1 on the shared probe set (layer 0 is the probe set itself and is
/// omitted). For "ii" the reported direction is II(A -> B).
SimilarityCurve layerwise_curve(const NetworkSpec& spec_a, const ParamSet& params_a,
                                const NetworkSpec& spec_b, const ParamSet& params_b,
                                const Matrix& probe, const MetricRequest& metric);

}  // namespace defrost
