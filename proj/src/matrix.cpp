#include "dga/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dga/errors.hpp"

namespace dga {

namespace {

std::string shape_str(const Matrix& m) {
  return "(" + std::to_string(m.rows) + "x" + std::to_string(m.cols) + ")";
}

// Below this many multiply-adds the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelFlopThreshold = 1u << 18;

}  // namespace

void Matrix::set_row(std::size_t r, const Vec& v) {
  if (v.size() != cols) throw DimensionError("set_row: length " + std::to_string(v.size()) + " into " + shape_str(*this));
  std::copy(v.begin(), v.end(), data.begin() + r * cols);
}

void Matrix::fill(real v) { std::fill(data.begin(), data.end(), v); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw DimensionError("matmul: " + shape_str(a) + " * " + shape_str(b));
  Matrix c(a.rows, b.cols);
  const std::size_t n = a.rows, k = a.cols, m = b.cols;
  const bool parallel = n * k * m >= kParallelFlopThreshold;
  // i-k-j order keeps both b and c accesses contiguous.
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t i = 0; i < n; ++i) {
    const real* ai = a[i];
    real* ci = c[i];
    for (std::size_t kk = 0; kk < k; ++kk) {
      const real aik = ai[kk];
      const real* bk = b[kk];
      for (std::size_t j = 0; j < m; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix matmul_reference(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw DimensionError("matmul_reference: " + shape_str(a) + " * " + shape_str(b));
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t kk = 0; kk < a.cols; ++kk)
      for (std::size_t j = 0; j < b.cols; ++j)
        c.at(i, j) += a.at(i, kk) * b.at(kk, j);
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
  return t;
}

Vec matvec(const Matrix& m, const Vec& x) {
  if (m.cols != x.size())
    throw DimensionError("matvec: " + shape_str(m) + " * vec(" + std::to_string(x.size()) + ")");
  Vec y(m.rows, real(0));
  for (std::size_t i = 0; i < m.rows; ++i) {
    const real* mi = m[i];
    real acc = 0;
    for (std::size_t j = 0; j < m.cols; ++j) acc += mi[j] * x[j];
    y[i] = acc;
  }
  return y;
}

Vec matvec_t(const Matrix& m, const Vec& x) {
  if (m.rows != x.size())
    throw DimensionError("matvec_t: " + shape_str(m) + "^T * vec(" + std::to_string(x.size()) + ")");
  Vec y(m.cols, real(0));
  for (std::size_t i = 0; i < m.rows; ++i) {
    const real xi = x[i];
    const real* mi = m[i];
    for (std::size_t j = 0; j < m.cols; ++j) y[j] += xi * mi[j];
  }
  return y;
}

void add_outer(Matrix& m, const Vec& a, const Vec& b) {
  if (m.rows != a.size() || m.cols != b.size())
    throw DimensionError("add_outer: " + shape_str(m) + " += (" + std::to_string(a.size()) + ")(" + std::to_string(b.size()) + ")^T");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const real ai = a[i];
    real* mi = m[i];
    for (std::size_t j = 0; j < b.size(); ++j) mi[j] += ai * b[j];
  }
}

real dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw DimensionError("dot: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  real acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(real alpha, const Vec& x, Vec& y) {
  if (x.size() != y.size())
    throw DimensionError("axpy: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void add_inplace(Vec& y, const Vec& x) { axpy(real(1), x, y); }

void add_inplace(Matrix& y, const Matrix& x) {
  if (!y.same_shape(x)) throw DimensionError("add_inplace: " + shape_str(y) + " += " + shape_str(x));
  for (std::size_t i = 0; i < y.size(); ++i) y.data[i] += x.data[i];
}

void scale_inplace(Matrix& y, real alpha) {
  for (real& v : y.data) v *= alpha;
}

Vec softmax(const Vec& v) {
  if (v.empty()) throw std::invalid_argument("softmax: empty input");
  const real mx = *std::max_element(v.begin(), v.end());
  Vec out(v.size());
  real sum = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    // Floor keeps entries strictly positive even when exp underflows
    // (spreads beyond ~745 in double); untouched otherwise.
    out[i] = std::max(std::exp(v[i] - mx), std::numeric_limits<real>::denorm_min());
    sum += out[i];
  }
  for (real& o : out) o /= sum;
  return out;
}

real sigmoid(real x) { return real(1) / (real(1) + std::exp(-x)); }

Vec sigmoid(const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = sigmoid(v[i]);
  return out;
}

Vec tanh_vec(const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
  return out;
}

Matrix sigmoid(const Matrix& m) {
  Matrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.size(); ++i) out.data[i] = sigmoid(m.data[i]);
  return out;
}

Matrix tanh_mat(const Matrix& m) {
  Matrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.size(); ++i) out.data[i] = std::tanh(m.data[i]);
  return out;
}

bool all_finite(const Vec& v) {
  for (real x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.data); }

}  // namespace dga
