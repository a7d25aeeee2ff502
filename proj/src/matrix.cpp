#include "defrost/matrix.hpp"

namespace defrost {

void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& y) {
  const std::size_t n = x.rows(), in = x.cols(), out = w.cols();
  if (w.rows() != in) throw std::invalid_argument("affine_forward: inner dimension mismatch");
  if (b.size() != out) throw std::invalid_argument("affine_forward: bias length mismatch");
  if (y.rows() != n || y.cols() != out) y = Matrix(n, out);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row_ptr(i);
    double* yi = y.row_ptr(i);
    for (std::size_t j = 0; j < out; ++j) yi[j] = b[j];
    for (std::size_t k = 0; k < in; ++k) {
      const double xik = xi[k];
      const double* wk = w.row_ptr(k);
      for (std::size_t j = 0; j < out; ++j) yi[j] += xik * wk[j];
    }
  }
}

void matmul_bt(const Matrix& dy, const Matrix& w, Matrix& dx) {
  const std::size_t n = dy.rows(), out = dy.cols(), in = w.rows();
  if (w.cols() != out) throw std::invalid_argument("matmul_bt: inner dimension mismatch");
  if (dx.rows() != n || dx.cols() != in) dx = Matrix(n, in);
  for (std::size_t i = 0; i < n; ++i) {
    const double* dyi = dy.row_ptr(i);
    double* dxi = dx.row_ptr(i);
    for (std::size_t j = 0; j < in; ++j) {
      const double* wj = w.row_ptr(j);
      double acc = 0.0;
      for (std::size_t o = 0; o < out; ++o) acc += dyi[o] * wj[o];
      dxi[j] = acc;
    }
  }
}

void accumulate_affine_grads(const Matrix& x, const Matrix& dy, Matrix& dw, std::vector<double>& db) {
  const std::size_t n = x.rows(), in = x.cols(), out = dy.cols();
  if (dy.rows() != n) throw std::invalid_argument("accumulate_affine_grads: row count mismatch");
  if (dw.rows() != in || dw.cols() != out) dw = Matrix(in, out);
  if (db.size() != out) db.assign(out, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row_ptr(i);
    const double* dyi = dy.row_ptr(i);
    for (std::size_t k = 0; k < in; ++k) {
      const double xik = xi[k];
      if (xik == 0.0) continue;
      double* dwk = dw.row_ptr(k);
      for (std::size_t j = 0; j < out; ++j) dwk[j] += xik * dyi[j];
    }
    for (std::size_t j = 0; j < out; ++j) db[j] += dyi[j];
  }
}

}  // namespace defrost
