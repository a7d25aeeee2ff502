#include "defrost/simmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace defrost {
namespace {

constexpr std::size_t kDefaultOverlapK = 30;
constexpr std::size_t kDefaultSpearmanK = 100;

/// Nearest neighbor of i, ties toward the smaller index.
std::size_t nearest(const Matrix& dist, std::size_t i) {
  std::size_t best = i == 0 ? 1 : 0;
  for (std::size_t j = 0; j < dist.rows(); ++j) {
    if (j == i) continue;
    if (dist(i, j) < dist(i, best)) best = j;
  }
  return best;
}

double directional_ii(const Matrix& da, const Matrix& db) {
  const std::size_t n = da.rows();
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = nearest(da, i);
    const double cutoff = db(i, j);
    std::int64_t count = 0;
    const double* row = db.row_ptr(i);
    for (std::size_t p = 0; p < n; ++p) {
      if (p == i || p == j) continue;
      if (row[p] < cutoff) ++count;
    }
    total += count;
  }
  return 2.0 * static_cast<double>(total) / (static_cast<double>(n) * static_cast<double>(n));
}

/// Indices of the k nearest neighbors of i, ordered by (distance, index).
std::vector<std::size_t> knn_of(const Matrix& dist, std::size_t i, std::size_t k) {
  std::vector<std::size_t> order;
  order.reserve(dist.rows() - 1);
  for (std::size_t j = 0; j < dist.rows(); ++j)
    if (j != i) order.push_back(j);
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](std::size_t x, std::size_t y) {
                      if (dist(i, x) != dist(i, y)) return dist(i, x) < dist(i, y);
                      return x < y;
                    });
  order.resize(k);
  return order;
}

/// Ranks 1..n with ties replaced by their midrank.
std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 && syy == 0.0) return 1.0;  // two constant rank vectors: identical rankings
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

void check_pair(const Representation& a, const Representation& b, const char* op) {
  if (a.rows() != b.rows())
    throw std::invalid_argument(std::string(op) + ": representations must have the same row count");
  if (a.rows() < 3) throw std::invalid_argument(std::string(op) + ": need at least 3 points");
}

}  // namespace

Matrix pairwise_sq_dist(const Representation& rep) {
  const std::size_t n = rep.rows(), d = rep.cols();
  Matrix dist(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* ri = rep.row_ptr(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* rj = rep.row_ptr(j);
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double delta = ri[c] - rj[c];
        acc += delta * delta;
      }
      dist(i, j) = acc;
      dist(j, i) = acc;
    }
  }
  return dist;
}

double information_imbalance(const Representation& a, const Representation& b) {
  check_pair(a, b, "information_imbalance");
  return directional_ii(pairwise_sq_dist(a), pairwise_sq_dist(b));
}

std::pair<double, double> information_imbalance_both(const Representation& a, const Representation& b) {
  check_pair(a, b, "information_imbalance");
  const Matrix da = pairwise_sq_dist(a);
  const Matrix db = pairwise_sq_dist(b);
  return {directional_ii(da, db), directional_ii(db, da)};
}

double linear_cka(const Representation& a, const Representation& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("linear_cka: row count mismatch");
  if (a.rows() < 2) throw std::invalid_argument("linear_cka: need at least 2 points");
  const std::size_t n = a.rows();

  auto column_centered = [n](const Matrix& m) {
    std::vector<double> mean(m.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = m.row_ptr(i);
      for (std::size_t j = 0; j < m.cols(); ++j) mean[j] += row[j];
    }
    for (double& v : mean) v /= static_cast<double>(n);
    Matrix out(n, m.cols());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j) - mean[j];
    return out;
  };
  const Matrix ac = column_centered(a);
  const Matrix bc = column_centered(b);

  auto cross_frob_sq = [n](const Matrix& x, const Matrix& y) {
    Matrix m(x.cols(), y.cols());
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = x.row_ptr(i);
      const double* yi = y.row_ptr(i);
      for (std::size_t p = 0; p < x.cols(); ++p) {
        const double v = xi[p];
        if (v == 0.0) continue;
        double* mp = m.row_ptr(p);
        for (std::size_t q = 0; q < y.cols(); ++q) mp[q] += v * yi[q];
      }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) acc += m.data()[i] * m.data()[i];
    return acc;
  };

  const double num = cross_frob_sq(bc, ac);
  const double den_a = std::sqrt(cross_frob_sq(ac, ac));
  const double den_b = std::sqrt(cross_frob_sq(bc, bc));
  if (den_a == 0.0 || den_b == 0.0)
    throw std::invalid_argument("linear_cka: zero-variance representation");
  return num / (den_a * den_b);
}

double neighborhood_overlap(const Representation& a, const Representation& b, std::size_t k) {
  check_pair(a, b, "neighborhood_overlap");
  if (k == 0) k = kDefaultOverlapK;
  const std::size_t n = a.rows();
  if (k < 1 || k > n - 1)
    throw std::invalid_argument("neighborhood_overlap: k must be in [1, N-1], got " + std::to_string(k));
  const Matrix dist_a = pairwise_sq_dist(a);
  const Matrix dist_b = pairwise_sq_dist(b);
  std::vector<char> in_a(n, 0);
  std::int64_t shared = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto nn_a = knn_of(dist_a, i, k);
    const auto nn_b = knn_of(dist_b, i, k);
    for (std::size_t j : nn_a) in_a[j] = 1;
    for (std::size_t j : nn_b) shared += in_a[j];
    for (std::size_t j : nn_a) in_a[j] = 0;
  }
  return static_cast<double>(shared) / (static_cast<double>(n) * static_cast<double>(k));
}

double spearman_neighborhoods(const Representation& a, const Representation& b, std::size_t k) {
  check_pair(a, b, "spearman_neighborhoods");
  if (k == 0) k = kDefaultSpearmanK;
  const std::size_t n = a.rows();
  if (k < 3 || k > n - 1)
    throw std::invalid_argument("spearman_neighborhoods: k must be in [3, N-1], got " + std::to_string(k));
  const Matrix dist_a = pairwise_sq_dist(a);
  const Matrix dist_b = pairwise_sq_dist(b);
  double total = 0.0;
  std::vector<double> da(k), db(k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto nn = knn_of(dist_a, i, k);
    for (std::size_t t = 0; t < k; ++t) {
      da[t] = dist_a(i, nn[t]);
      db[t] = dist_b(i, nn[t]);
    }
    const auto ranks_a = midranks(da);
    const auto ranks_b = midranks(db);
    total += pearson(ranks_a, ranks_b);
  }
  return total / static_cast<double>(n);
}

SimilarityCurve layerwise_curve(const NetworkSpec& spec_a, const ParamSet& params_a,
                                const NetworkSpec& spec_b, const ParamSet& params_b,
                                const Matrix& probe, const MetricRequest& metric) {
  if (spec_a.num_layers() != spec_b.num_layers())
    throw std::invalid_argument("layerwise_curve: layer count mismatch (" +
                                std::to_string(spec_a.num_layers()) + " vs " +
                                std::to_string(spec_b.num_layers()) + ")");
  SimilarityCurve curve;
  for (std::size_t layer = 1; layer <= spec_a.num_layers(); ++layer) {
    const Matrix rep_a = extract_representation(spec_a, params_a, probe, layer);
    const Matrix rep_b = extract_representation(spec_b, params_b, probe, layer);
    double value = 0.0;
    if (metric.name == "ii") value = information_imbalance(rep_a, rep_b);
    else if (metric.name == "cka") value = linear_cka(rep_a, rep_b);
    else if (metric.name == "overlap") value = neighborhood_overlap(rep_a, rep_b, metric.k);
    else if (metric.name == "spearman") value = spearman_neighborhoods(rep_a, rep_b, metric.k);
    else throw std::invalid_argument("layerwise_curve: unknown metric " + metric.name);
    curve.points.push_back({layer, metric.name, value});
  }
  return curve;
}

}  // namespace defrost
