#pragma once

#include <cstddef>
#include <vector>

namespace dga {

#ifdef DGA_REAL_FLOAT32
using real = float;
#else
using real = double;
#endif

using Vec = std::vector<real>;

// Dense row-major matrix. Vectors that take part in matrix math are plain
// Vec; Matrix is for anything genuinely 2-D (weights, token stacks).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<real> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, real(0)) {}

  real* operator[](std::size_t r) { return data.data() + r * cols; }
  const real* operator[](std::size_t r) const { return data.data() + r * cols; }
  real& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  real at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return data.size(); }

  Vec row(std::size_t r) const { return Vec(data.begin() + r * cols, data.begin() + (r + 1) * cols); }
  void set_row(std::size_t r, const Vec& v);

  void fill(real v);
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// c = a * b. Parallelized over output rows once the product is big enough;
// each output element is still one serial dot product, so the result is
// bit-identical to matmul_reference at any thread count.
Matrix matmul(const Matrix& a, const Matrix& b);

// Naive triple loop. The reference the parallel kernel is tested against.
Matrix matmul_reference(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

// y = m x  (m is out x in)
Vec matvec(const Matrix& m, const Vec& x);
// y = m^T x
Vec matvec_t(const Matrix& m, const Vec& x);
// m += a b^T
void add_outer(Matrix& m, const Vec& a, const Vec& b);

real dot(const Vec& a, const Vec& b);
void axpy(real alpha, const Vec& x, Vec& y);  // y += alpha * x
void add_inplace(Vec& y, const Vec& x);
void add_inplace(Matrix& y, const Matrix& x);
void scale_inplace(Matrix& y, real alpha);

// Max-subtracted softmax. Output entries are in (0,1) and sum to 1; throws
// on empty input.
Vec softmax(const Vec& v);

real sigmoid(real x);
Vec sigmoid(const Vec& v);
Vec tanh_vec(const Vec& v);
Matrix sigmoid(const Matrix& m);
Matrix tanh_mat(const Matrix& m);

bool all_finite(const Vec& v);
bool all_finite(const Matrix& m);

}  // namespace dga
