#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace defrost {

/// Dense row-major matrix of doubles. The workhorse container for sample
/// batches (rows = samples), weight matrices (rows = inputs, cols = outputs)
/// and distance matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(const Matrix&) = default;
  Matrix& operator=(const Matrix&) = default;
  Matrix(Matrix&& other) noexcept
      : rows_(other.rows_), cols_(other.cols_), data_(std::move(other.data_)) {
    other.rows_ = other.cols_ = 0;  // moved-from state must report empty
  }
  Matrix& operator=(Matrix&& other) noexcept {
    rows_ = other.rows_;
    cols_ = other.cols_;
    data_ = std::move(other.data_);
    other.rows_ = other.cols_ = 0;
    return *this;
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw std::invalid_argument("Matrix::from_rows: ragged rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
  const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }
  std::span<const double> row(std::size_t r) const { return {row_ptr(r), cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  /// Copies the given rows (in order) into a new matrix.
  Matrix gather_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double* src = row_ptr(idx[i]);
      double* dst = out.row_ptr(i);
      for (std::size_t j = 0; j < cols_; ++j) dst[j] = src[j];
    }
    return out;
  }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Dense kernels. Each output row is accumulated independently with a fixed
// k-order, so computing a row batch gives bit-identical results to computing
// the full matrix and gathering rows. Training-path bit-reproducibility
// (frozen-prefix caching, freeze masks) relies on this.

/// Y = X * W + 1 b^T, X is N x in, W is in x out, b length out.
void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& y);

/// dX = dY * W^T.
void matmul_bt(const Matrix& dy, const Matrix& w, Matrix& dx);

/// dW += X^T * dY; db += column sums of dY.
void accumulate_affine_grads(const Matrix& x, const Matrix& dy, Matrix& dw, std::vector<double>& db);

}  // namespace defrost
