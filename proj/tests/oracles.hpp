// Independent reference implementations used only by tests. Everything here
// is written the plain, slow way (full sorts, double loops, long-double
// accumulation) and must stay decoupled from the production code paths it
// checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "defrost/matrix.hpp"
#include "defrost/network.hpp"

namespace oracle {

inline defrost::Matrix pairwise(const defrost::Matrix& rep) {
  defrost::Matrix dist(rep.rows(), rep.rows());
  for (std::size_t i = 0; i < rep.rows(); ++i)
    for (std::size_t j = 0; j < rep.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < rep.cols(); ++c) {
        const double d = rep(i, c) - rep(j, c);
        acc += d * d;
      }
      dist(i, j) = acc;
    }
  return dist;
}

/// Sorted neighbor list of i by (distance, index), excluding i itself.
inline std::vector<std::size_t> sorted_neighbors(const defrost::Matrix& dist, std::size_t i) {
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < dist.rows(); ++j)
    if (j != i) order.push_back(j);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (dist(i, x) != dist(i, y)) return dist(i, x) < dist(i, y);
    return x < y;
  });
  return order;
}

inline double information_imbalance(const defrost::Matrix& a, const defrost::Matrix& b) {
  const defrost::Matrix da = pairwise(a);
  const defrost::Matrix db = pairwise(b);
  const std::size_t n = a.rows();
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = sorted_neighbors(da, i).front();
    for (std::size_t p = 0; p < n; ++p)
      if (p != i && p != j && db(i, p) < db(i, j)) ++total;
  }
  return 2.0 * static_cast<double>(total) / (static_cast<double>(n) * static_cast<double>(n));
}

inline double neighborhood_overlap(const defrost::Matrix& a, const defrost::Matrix& b, std::size_t k) {
  const defrost::Matrix da = pairwise(a);
  const defrost::Matrix db = pairwise(b);
  const std::size_t n = a.rows();
  std::int64_t shared = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto na = sorted_neighbors(da, i);
    auto nb = sorted_neighbors(db, i);
    na.resize(k);
    nb.resize(k);
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    std::vector<std::size_t> common;
    std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(common));
    shared += static_cast<std::int64_t>(common.size());
  }
  return static_cast<double>(shared) / (static_cast<double>(n) * static_cast<double>(k));
}

/// Gram-matrix (HSIC) evaluation of linear CKA with centered kernels.
inline double cka_gram(const defrost::Matrix& a, const defrost::Matrix& b) {
  const std::size_t n = a.rows();
  auto gram = [n](const defrost::Matrix& m) {
    defrost::Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        long double acc = 0.0L;
        for (std::size_t c = 0; c < m.cols(); ++c)
          acc += static_cast<long double>(m(i, c)) * static_cast<long double>(m(j, c));
        g(i, j) = static_cast<double>(acc);
      }
    return g;
  };
  auto center = [n](const defrost::Matrix& g) {
    std::vector<double> row_mean(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) row_mean[i] += g(i, j);
      total += row_mean[i];
      row_mean[i] /= static_cast<double>(n);
    }
    total /= static_cast<double>(n) * static_cast<double>(n);
    defrost::Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) = g(i, j) - row_mean[i] - row_mean[j] + total;
    return out;
  };
  const defrost::Matrix kc = center(gram(a));
  const defrost::Matrix lc = center(gram(b));
  long double cross = 0.0L, kk = 0.0L, ll = 0.0L;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cross += static_cast<long double>(kc(i, j)) * lc(i, j);
      kk += static_cast<long double>(kc(i, j)) * kc(i, j);
      ll += static_cast<long double>(lc(i, j)) * lc(i, j);
    }
  return static_cast<double>(cross / std::sqrt(kk * ll));
}

inline std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = 0.5 * static_cast<double>(i + j) + 1.0;
    i = j + 1;
  }
  return ranks;
}

inline double spearman_neighborhoods(const defrost::Matrix& a, const defrost::Matrix& b, std::size_t k) {
  const defrost::Matrix da = pairwise(a);
  const defrost::Matrix db = pairwise(b);
  const std::size_t n = a.rows();
  long double total = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    auto nn = sorted_neighbors(da, i);
    nn.resize(k);
    std::vector<double> va(k), vb(k);
    for (std::size_t t = 0; t < k; ++t) {
      va[t] = da(i, nn[t]);
      vb[t] = db(i, nn[t]);
    }
    const auto ra = midranks(va);
    const auto rb = midranks(vb);
    long double ma = 0.0L, mb = 0.0L;
    for (std::size_t t = 0; t < k; ++t) { ma += ra[t]; mb += rb[t]; }
    ma /= k;
    mb /= k;
    long double sab = 0.0L, saa = 0.0L, sbb = 0.0L;
    for (std::size_t t = 0; t < k; ++t) {
      sab += (ra[t] - ma) * (rb[t] - mb);
      saa += (ra[t] - ma) * (ra[t] - ma);
      sbb += (rb[t] - mb) * (rb[t] - mb);
    }
    if (saa == 0.0L && sbb == 0.0L) total += 1.0L;
    else if (saa == 0.0L || sbb == 0.0L) total += 0.0L;
    else total += sab / std::sqrt(saa * sbb);
  }
  return static_cast<double>(total / static_cast<long double>(n));
}

/// Central finite differences of the training loss through the public
/// forward/loss entry points only.
struct FdCheck {
  double max_rel_err = 0.0;
};

template <typename LossFn>
inline FdCheck fd_gradients(defrost::ParamSet params, const defrost::Gradients& analytic,
                            const LossFn& loss, double h = 1e-5) {
  FdCheck result;
  auto probe = [&](double& slot, double analytic_g) {
    const double saved = slot;
    slot = saved + h;
    const double up = loss(params);
    slot = saved - h;
    const double down = loss(params);
    slot = saved;
    const double fd = (up - down) / (2.0 * h);
    const double rel =
        std::abs(fd - analytic_g) / std::max({1.0, std::abs(fd), std::abs(analytic_g)});
    result.max_rel_err = std::max(result.max_rel_err, rel);
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& layer = params.layers[l];
    for (std::size_t i = 0; i < layer.weights.size(); ++i)
      probe(layer.weights.data()[i], analytic.layers[l].weights.data()[i]);
    for (std::size_t i = 0; i < layer.biases.size(); ++i)
      probe(layer.biases[i], analytic.layers[l].biases[i]);
  }
  return result;
}

inline defrost::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                     double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  defrost::Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

/// Random orthogonal matrix via Gram-Schmidt on a Gaussian draw.
inline defrost::Matrix random_rotation(std::size_t d, std::mt19937_64& rng) {
  defrost::Matrix m = random_matrix(d, d, rng);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double dot = 0.0;
      for (std::size_t r = 0; r < d; ++r) dot += m(r, c) * m(r, p);
      for (std::size_t r = 0; r < d; ++r) m(r, c) -= dot * m(r, p);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < d; ++r) norm += m(r, c) * m(r, c);
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < d; ++r) m(r, c) /= norm;
  }
  return m;
}

}  // namespace oracle
