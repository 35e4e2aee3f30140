#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "dtbm/tensor.hpp"

namespace dtbm {

// ---------------------------------------------------------------------------
// Vector geometry. Zero vectors normalize to zero and have cosine 0 with
// everything, so degenerate rows never win an angle argmax.
// ---------------------------------------------------------------------------

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: length mismatch");
  double na = norm2(a), nb = norm2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

inline std::vector<double> normalize(std::span<const double> a) {
  std::vector<double> out(a.begin(), a.end());
  double n = norm2(a);
  if (n == 0.0) return out;
  for (double& x : out) x /= n;
  return out;
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition by cyclic Jacobi sweeps. Deterministic;
// converges when the off-diagonal Frobenius mass drops below 1e-13 of the
// total. Adequate for the desk-scale Gram matrices used here (p <= ~200).
// ---------------------------------------------------------------------------

struct SymmetricEigen {
  std::vector<double> eigenvalues;  // nonincreasing
  DenseMatrix eigenvectors;         // columns matching eigenvalues
};

inline SymmetricEigen jacobi_eigen(DenseMatrix A) {
  const int n = A.rows();
  detail::require(A.cols() == n, "jacobi_eigen: matrix must be square");
  detail::require(A.all_finite(), "jacobi_eigen: non-finite entries");

  DenseMatrix V(n, n);
  for (int i = 0; i < n; ++i) V(i, i) = 1.0;

  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) total += A(i, j) * A(i, j);
  const double tol = 1e-13 * std::sqrt(total);

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * A(i, j) * A(i, j);
    if (std::sqrt(off) <= tol) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = A(p, q);
        if (apq == 0.0) continue;
        double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
        double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = A(i, i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return diag[a] > diag[b]; });

  SymmetricEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.eigenvalues[j] = diag[order[j]];
    for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = V(i, order[j]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncated SVD via the smaller Gram matrix.
// ---------------------------------------------------------------------------

struct TruncatedSvd {
  DenseMatrix left_vectors;            // p x r, orthonormal columns
  std::vector<double> singular_values;  // nonincreasing, >= 0
};

namespace detail {

// Make the first component above 1e-12 of the column max nonnegative;
// gives deterministic vector signs across runs.
inline void fix_column_signs(DenseMatrix& U) {
  for (int j = 0; j < U.cols(); ++j) {
    double colmax = 0.0;
    for (int i = 0; i < U.rows(); ++i) colmax = std::max(colmax, std::abs(U(i, j)));
    if (colmax == 0.0) continue;
    for (int i = 0; i < U.rows(); ++i) {
      if (std::abs(U(i, j)) > 1e-12 * colmax) {
        if (U(i, j) < 0.0)
          for (int k = 0; k < U.rows(); ++k) U(k, j) = -U(k, j);
        break;
      }
    }
  }
}

// One modified Gram-Schmidt pass in column order, tightening orthonormality.
// Columns that vanish are replaced by the first standard basis vector
// orthogonal to the ones already kept.
inline void orthonormalize_columns(DenseMatrix& U) {
  const int m = U.rows(), r = U.cols();
  for (int j = 0; j < r; ++j) {
    for (int k = 0; k < j; ++k) {
      double proj = 0.0;
      for (int i = 0; i < m; ++i) proj += U(i, k) * U(i, j);
      for (int i = 0; i < m; ++i) U(i, j) -= proj * U(i, k);
    }
    double n = 0.0;
    for (int i = 0; i < m; ++i) n += U(i, j) * U(i, j);
    n = std::sqrt(n);
    if (n > 1e-300) {
      for (int i = 0; i < m; ++i) U(i, j) /= n;
      continue;
    }
    // Degenerate column: substitute a basis vector not already spanned.
    for (int e = 0; e < m; ++e) {
      for (int i = 0; i < m; ++i) U(i, j) = (i == e) ? 1.0 : 0.0;
      for (int k = 0; k < j; ++k) {
        double proj = U(e, k);
        for (int i = 0; i < m; ++i) U(i, j) -= proj * U(i, k);
      }
      double nn = 0.0;
      for (int i = 0; i < m; ++i) nn += U(i, j) * U(i, j);
      nn = std::sqrt(nn);
      if (nn > 0.5) {
        for (int i = 0; i < m; ++i) U(i, j) /= nn;
        break;
      }
    }
  }
}

}  // namespace detail

// Top-r left singular vectors of M, through the eigendecomposition of the
// smaller of M M^T and M^T M.
inline TruncatedSvd top_left_singular_vectors(const DenseMatrix& M, int r) {
  const int m = M.rows(), n = M.cols();
  detail::require(r >= 1 && r <= std::min(m, n), "svd: rank out of range");
  detail::require(M.all_finite(), "svd: non-finite entries");

  TruncatedSvd out;
  out.singular_values.resize(r);

  if (m <= n) {
    DenseMatrix G(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        double acc = dot({M.row_ptr(i), static_cast<std::size_t>(n)},
                         {M.row_ptr(j), static_cast<std::size_t>(n)});
        G(i, j) = acc;
        G(j, i) = acc;
      }
    SymmetricEigen eig = jacobi_eigen(G);
    out.left_vectors = DenseMatrix(m, r);
    for (int j = 0; j < r; ++j) {
      out.singular_values[j] = std::sqrt(std::max(0.0, eig.eigenvalues[j]));
      for (int i = 0; i < m; ++i) out.left_vectors(i, j) = eig.eigenvectors(i, j);
    }
  } else {
    DenseMatrix G(n, n);
    for (int i = 0; i < m; ++i) {
      const double* row = M.row_ptr(i);
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) G(a, b) += row[a] * row[b];
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < a; ++b) G(a, b) = G(b, a);
    SymmetricEigen eig = jacobi_eigen(G);
    out.left_vectors = DenseMatrix(m, r);
    double sigma_max = std::sqrt(std::max(0.0, eig.eigenvalues[0]));
    for (int j = 0; j < r; ++j) {
      double sigma = std::sqrt(std::max(0.0, eig.eigenvalues[j]));
      out.singular_values[j] = sigma;
      if (sigma > 1e-13 * std::max(sigma_max, 1e-300)) {
        for (int i = 0; i < m; ++i) {
          double acc = 0.0;
          for (int b = 0; b < n; ++b) acc += M(i, b) * eig.eigenvectors(b, j);
          out.left_vectors(i, j) = acc / sigma;
        }
      }
      // Vanishing sigma leaves a zero column; orthonormalization below
      // completes the basis deterministically.
    }
  }

  detail::orthonormalize_columns(out.left_vectors);
  detail::fix_column_signs(out.left_vectors);
  return out;
}

// U U^T M for a column-orthonormal U.
inline DenseMatrix low_rank_project(const DenseMatrix& M, const DenseMatrix& U) {
  detail::require(U.rows() == M.rows(), "low_rank_project: dimension mismatch");
  const int m = M.rows(), n = M.cols(), r = U.cols();
  DenseMatrix B(r, n);
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < m; ++i) {
      double u = U(i, j);
      if (u == 0.0) continue;
      const double* mrow = M.row_ptr(i);
      double* brow = B.row_ptr(j);
      for (int c = 0; c < n; ++c) brow[c] += u * mrow[c];
    }
  DenseMatrix out(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < r; ++j) {
      double u = U(i, j);
      if (u == 0.0) continue;
      const double* brow = B.row_ptr(j);
      double* orow = out.row_ptr(i);
      for (int c = 0; c < n; ++c) orow[c] += u * brow[c];
    }
  return out;
}

// Project one tensor mode onto the span of U's columns.
inline DenseTensor mode_project(const DenseTensor& T, const DenseMatrix& U, int mode) {
  const int r = U.cols();
  DenseMatrix Ut(r, U.rows());
  for (int i = 0; i < U.rows(); ++i)
    for (int j = 0; j < r; ++j) Ut(j, i) = U(i, j);
  return mode_multiply(mode_multiply(T, Ut, mode), U, mode);
}

}  // namespace dtbm
