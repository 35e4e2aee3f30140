#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtbm/clustering.hpp"

namespace dtbm {

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace detail

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(static_cast<std::size_t>(rows) * cols, fill) {
    detail::require(rows >= 1 && cols >= 1, "matrix: dimensions must be positive");
  }
  DenseMatrix(int rows, int cols, std::vector<double> values)
      : rows_(rows), cols_(cols), v_(std::move(values)) {
    detail::require(rows >= 1 && cols >= 1, "matrix: dimensions must be positive");
    detail::require(v_.size() == static_cast<std::size_t>(rows) * cols,
                    "matrix: value count does not match rows*cols");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * cols_ + j]; }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }
  const double* row_ptr(int i) const { return v_.data() + static_cast<std::size_t>(i) * cols_; }
  double* row_ptr(int i) { return v_.data() + static_cast<std::size_t>(i) * cols_; }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

// Dense order-K array. Values are stored lexicographically with the last
// index varying fastest; all entries are expected finite.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<int> dims, double fill = 0.0) : dims_(std::move(dims)) {
    check_dims();
    v_.assign(static_cast<std::size_t>(size()), fill);
  }
  DenseTensor(std::vector<int> dims, std::vector<double> values)
      : dims_(std::move(dims)), v_(std::move(values)) {
    check_dims();
    detail::require(v_.size() == static_cast<std::size_t>(size()),
                    "tensor: value count does not match product of dims");
  }

  int order() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const { return dims_[k]; }
  const std::vector<int>& dims() const { return dims_; }
  std::int64_t size() const {
    std::int64_t n = 1;
    for (int d : dims_) n *= d;
    return n;
  }

  std::int64_t offset(const std::vector<int>& idx) const {
    std::int64_t off = 0;
    for (int k = 0; k < order(); ++k) off = off * dims_[k] + idx[k];
    return off;
  }
  double at(const std::vector<int>& idx) const { return v_[offset(idx)]; }
  double& at(const std::vector<int>& idx) { return v_[offset(idx)]; }
  double at(std::initializer_list<int> idx) const { return at(std::vector<int>(idx)); }
  double& at(std::initializer_list<int> idx) { return v_[offset(std::vector<int>(idx))]; }

  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  // Stride of mode k in the flat layout.
  std::int64_t stride(int k) const {
    std::int64_t s = 1;
    for (int j = k + 1; j < order(); ++j) s *= dims_[j];
    return s;
  }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  double frobenius_norm_sq() const {
    double acc = 0.0;
    for (double x : v_) acc += x * x;
    return acc;
  }

 private:
  void check_dims() {
    detail::require(!dims_.empty(), "tensor: order must be >= 1");
    for (int d : dims_) detail::require(d >= 1, "tensor: every dim must be >= 1");
  }

  std::vector<int> dims_;
  std::vector<double> v_;
};

// ---------------------------------------------------------------------------
// Unfoldings.
//
// Mode-k matricization puts mode k on the rows. Columns run over the
// remaining modes with the smallest mode index varying fastest, so that
// Mat_k(S x_1 M_1 ... x_K M_K) = M_k Mat_k(S) (M_K (x) ... (x) M_{k+1} (x)
// M_{k-1} (x) ... (x) M_1)^T.
// ---------------------------------------------------------------------------

inline DenseMatrix matricize(const DenseTensor& T, int mode) {
  const int K = T.order();
  detail::require(mode >= 0 && mode < K, "matricize: mode out of range");
  std::int64_t cols = T.size() / T.dim(mode);
  DenseMatrix M(T.dim(mode), static_cast<int>(cols));

  // Column strides: smaller off-modes vary fastest.
  std::vector<std::int64_t> col_stride(K, 0);
  std::int64_t s = 1;
  for (int j = 0; j < K; ++j) {
    if (j == mode) continue;
    col_stride[j] = s;
    s *= T.dim(j);
  }

  std::vector<int> idx(K, 0);
  const std::vector<double>& v = T.values();
  for (std::int64_t flat = 0; flat < T.size(); ++flat) {
    std::int64_t col = 0;
    for (int j = 0; j < K; ++j)
      if (j != mode) col += idx[j] * col_stride[j];
    M(idx[mode], static_cast<int>(col)) = v[flat];
    for (int j = K - 1; j >= 0; --j) {
      if (++idx[j] < T.dim(j)) break;
      idx[j] = 0;
    }
  }
  return M;
}

inline DenseTensor refold(const DenseMatrix& M, int mode, const std::vector<int>& dims) {
  const int K = static_cast<int>(dims.size());
  detail::require(mode >= 0 && mode < K, "refold: mode out of range");
  DenseTensor T(dims);
  detail::require(M.rows() == dims[mode] && static_cast<std::int64_t>(M.cols()) == T.size() / dims[mode],
                  "refold: matrix shape inconsistent with dims");

  std::vector<std::int64_t> col_stride(K, 0);
  std::int64_t s = 1;
  for (int j = 0; j < K; ++j) {
    if (j == mode) continue;
    col_stride[j] = s;
    s *= dims[j];
  }

  std::vector<int> idx(K, 0);
  std::vector<double>& v = T.values();
  for (std::int64_t flat = 0; flat < T.size(); ++flat) {
    std::int64_t col = 0;
    for (int j = 0; j < K; ++j)
      if (j != mode) col += idx[j] * col_stride[j];
    v[flat] = M(idx[mode], static_cast<int>(col));
    for (int j = K - 1; j >= 0; --j) {
      if (++idx[j] < dims[j]) break;
      idx[j] = 0;
    }
  }
  return T;
}

// R(..., a, ...) = sum_b M(a, b) T(..., b, ...) along the given mode.
inline DenseTensor mode_multiply(const DenseTensor& T, const DenseMatrix& M, int mode) {
  const int K = T.order();
  detail::require(mode >= 0 && mode < K, "mode_multiply: mode out of range");
  detail::require(M.cols() == T.dim(mode), "mode_multiply: factor columns must match tensor dim");

  std::vector<int> out_dims = T.dims();
  out_dims[mode] = M.rows();
  DenseTensor R(out_dims);

  const std::int64_t inner = T.stride(mode);
  const std::int64_t outer = T.size() / (inner * T.dim(mode));
  const int dk = T.dim(mode);
  const int m = M.rows();
  const double* tv = T.data();
  double* rv = R.data();

  for (std::int64_t o = 0; o < outer; ++o) {
    const double* tblock = tv + o * dk * inner;
    double* rblock = rv + o * m * inner;
    for (int a = 0; a < m; ++a) {
      const double* mrow = M.row_ptr(a);
      double* rrow = rblock + a * inner;
      for (int b = 0; b < dk; ++b) {
        const double w = mrow[b];
        if (w == 0.0) continue;
        const double* trow = tblock + b * inner;
        for (std::int64_t i = 0; i < inner; ++i) rrow[i] += w * trow[i];
      }
    }
  }
  return R;
}

// X = S x_{m1} M1 x_{m2} M2 ... applied left to right.
inline DenseTensor multilinear_multiply(const DenseTensor& S,
                                        const std::vector<std::pair<DenseMatrix, int>>& factors) {
  DenseTensor out = S;
  for (const auto& [M, mode] : factors) out = mode_multiply(out, M, mode);
  return out;
}

// Reshape a cubical tensor into a nearly square matrix: the first floor(K/2)
// modes form rows, the rest form columns. With row-major storage this is a
// flat reshape, hence trivially bijective.
inline DenseMatrix square_unfold(const DenseTensor& T) {
  const int K = T.order();
  const int p = T.dim(0);
  for (int k = 1; k < K; ++k)
    detail::require(T.dim(k) == p, "square_unfold: tensor must be cubical");
  const int h = K / 2 > 0 ? K / 2 : 1;  // K=1 degenerates to a p x 1 column
  std::int64_t rows = 1, cols = 1;
  for (int k = 0; k < K; ++k) (k < h ? rows : cols) *= T.dim(k);
  return DenseMatrix(static_cast<int>(rows), static_cast<int>(cols), T.values());
}

inline DenseTensor square_refold(const DenseMatrix& M, const std::vector<int>& dims) {
  const int K = static_cast<int>(dims.size());
  const int h = K / 2 > 0 ? K / 2 : 1;
  std::int64_t rows = 1, cols = 1;
  for (int k = 0; k < K; ++k) (k < h ? rows : cols) *= dims[k];
  detail::require(M.rows() == rows && M.cols() == cols,
                  "square_refold: matrix shape inconsistent with dims");
  return DenseTensor(dims, M.values());
}

// ---------------------------------------------------------------------------
// Block and reduced averaging.
// ---------------------------------------------------------------------------

struct BlockAverageResult {
  DenseTensor core;                      // r_1 x ... x r_K block means
  std::vector<std::int64_t> empty_blocks;  // flat indices of cells with no members (value 0)
};

// core(a_1..a_K) = mean of Y over index tuples with z_k(i_k) = a_k.
inline BlockAverageResult block_average(const DenseTensor& Y, const Clustering& z) {
  const int K = Y.order();
  detail::require(z.order() == K, "block_average: clustering must cover every mode");
  for (int k = 0; k < K; ++k)
    detail::require(z.num_items(k) == Y.dim(k), "block_average: assignment length mismatch");

  DenseTensor sums(z.num_clusters);
  std::vector<std::int64_t> counts(sums.size(), 0);

  std::vector<int> idx(K, 0);
  std::vector<std::int64_t> cell_stride(K);
  cell_stride[K - 1] = 1;
  for (int k = K - 2; k >= 0; --k) cell_stride[k] = cell_stride[k + 1] * z.num_clusters[k + 1];

  const std::vector<double>& v = Y.values();
  std::int64_t cell = 0;
  for (int k = 0; k < K; ++k) cell += cell_stride[k] * z.assignments[k][0];
  for (std::int64_t flat = 0; flat < Y.size(); ++flat) {
    sums.values()[cell] += v[flat];
    ++counts[cell];
    for (int k = K - 1; k >= 0; --k) {
      cell -= cell_stride[k] * z.assignments[k][idx[k]];
      if (++idx[k] < Y.dim(k)) {
        cell += cell_stride[k] * z.assignments[k][idx[k]];
        break;
      }
      idx[k] = 0;
      cell += cell_stride[k] * z.assignments[k][0];
    }
  }

  BlockAverageResult out{std::move(sums), {}};
  for (std::int64_t c = 0; c < out.core.size(); ++c) {
    if (counts[c] == 0) {
      out.empty_blocks.push_back(c);
      out.core.values()[c] = 0.0;
    } else {
      out.core.values()[c] /= static_cast<double>(counts[c]);
    }
  }
  return out;
}

struct ReducedTensorResult {
  DenseTensor tensor;                    // p_k on mode k, r_j elsewhere
  std::vector<std::int64_t> empty_cells;  // flat indices of cells with no members
};

// tensor(a_1..i..a_K) = mean of Y(i_1..i..i_K) over tuples whose off-mode
// indices fall in the given clusters, keeping mode k at full resolution.
inline ReducedTensorResult reduced_tensor(const DenseTensor& Y, const Clustering& z, int mode) {
  const int K = Y.order();
  detail::require(mode >= 0 && mode < K, "reduced_tensor: mode out of range");
  detail::require(z.order() == K, "reduced_tensor: clustering must cover every mode");
  for (int k = 0; k < K; ++k) {
    if (k == mode) continue;
    detail::require(z.num_items(k) == Y.dim(k), "reduced_tensor: assignment length mismatch");
  }

  std::vector<int> out_dims(K);
  for (int k = 0; k < K; ++k) out_dims[k] = (k == mode) ? Y.dim(k) : z.num_clusters[k];
  DenseTensor sums(out_dims);
  std::vector<std::int64_t> counts(sums.size(), 0);

  std::vector<std::int64_t> cell_stride(K);
  cell_stride[K - 1] = 1;
  for (int k = K - 2; k >= 0; --k) cell_stride[k] = cell_stride[k + 1] * out_dims[k + 1];

  auto cell_index = [&](int k, int i) {
    return cell_stride[k] * (k == mode ? i : z.assignments[k][i]);
  };

  std::vector<int> idx(K, 0);
  const std::vector<double>& v = Y.values();
  std::int64_t cell = 0;
  for (int k = 0; k < K; ++k) cell += cell_index(k, 0);
  for (std::int64_t flat = 0; flat < Y.size(); ++flat) {
    sums.values()[cell] += v[flat];
    ++counts[cell];
    for (int k = K - 1; k >= 0; --k) {
      cell -= cell_index(k, idx[k]);
      if (++idx[k] < Y.dim(k)) {
        cell += cell_index(k, idx[k]);
        break;
      }
      idx[k] = 0;
      cell += cell_index(k, 0);
    }
  }

  ReducedTensorResult out{std::move(sums), {}};
  for (std::int64_t c = 0; c < out.tensor.size(); ++c) {
    if (counts[c] == 0) {
      out.empty_cells.push_back(c);
      out.tensor.values()[c] = 0.0;
    } else {
      out.tensor.values()[c] /= static_cast<double>(counts[c]);
    }
  }
  return out;
}

}  // namespace dtbm
