#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "specsub/errors.hpp"
#include "specsub/tolerances.hpp"

namespace specsub {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using IndexSet = std::vector<std::size_t>;

namespace detail {

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline std::string num_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// (M + M^H)/2 entry by entry; exactly Hermitian in floating point
// (addition commutes, conjugation is exact, diagonal imag parts cancel).
inline Matrix symmetrize(const Matrix& m) {
  Matrix s(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      s(i, j) = (i == j) ? Complex(v.real(), 0.0) : v;
      if (i != j) s(j, i) = std::conj(v);
    }
  return s;
}

}  // namespace detail

/// Dense complex Hermitian matrix, the universal operator carrier.
/// Construction validates and canonically symmetrizes, so held entries are
/// exactly Hermitian.
class HermitianOperator {
 public:
  explicit HermitianOperator(const Matrix& m, double tol = Tolerances{}.hermiticity) {
    if (m.rows() != m.cols() || m.rows() == 0)
      fail(ErrorCode::NotSquare, "expected a nonempty square matrix, got " +
                                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    residual_ = detail::max_abs(m - m.adjoint());
    const double scale = 1.0 + detail::max_abs(m);
    if (residual_ > tol * scale)
      fail(ErrorCode::NotHermitian, "max |M - M^H| entry " + detail::num_str(residual_) +
                                        " exceeds tolerance " + detail::num_str(tol * scale));
    mat_ = detail::symmetrize(m);
  }

  static HermitianOperator diagonal(const RealVector& entries) {
    Matrix m = Matrix::Zero(entries.size(), entries.size());
    for (Eigen::Index i = 0; i < entries.size(); ++i) m(i, i) = entries(i);
    return HermitianOperator(m);
  }

  static HermitianOperator identity(std::size_t n) {
    return HermitianOperator(Matrix::Identity(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n)));
  }

  static HermitianOperator zero(std::size_t n) {
    return HermitianOperator(Matrix::Zero(static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(n)));
  }

  std::size_t n() const { return static_cast<std::size_t>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }
  Complex operator()(std::size_t i, std::size_t j) const {
    return mat_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  /// Max |M - M^H| entry of the original input, recorded at construction.
  double symmetrization_residual() const { return residual_; }

  bool is_real(double tol = Tolerances{}.real_fast_path) const {
    return mat_.imag().cwiseAbs().maxCoeff() <= tol;
  }

  HermitianOperator operator+(const HermitianOperator& o) const {
    require_same_dim(o);
    return HermitianOperator(Matrix(mat_ + o.mat_));
  }
  HermitianOperator operator-(const HermitianOperator& o) const {
    require_same_dim(o);
    return HermitianOperator(Matrix(mat_ - o.mat_));
  }
  friend HermitianOperator operator*(double s, const HermitianOperator& a) {
    return HermitianOperator(Matrix(s * a.mat_));
  }

 private:
  void require_same_dim(const HermitianOperator& o) const {
    if (o.n() != n())
      fail(ErrorCode::DimensionMismatch,
           "operands have dimensions " + std::to_string(n()) + " and " + std::to_string(o.n()));
  }

  Matrix mat_;
  double residual_ = 0.0;
};

/// Validate and symmetrize a raw square matrix.
inline HermitianOperator validate_hermitian(const Matrix& m,
                                            double tol = Tolerances{}.hermiticity) {
  return HermitianOperator(m, tol);
}

/// Full eigendecomposition: ascending values, orthonormal vectors with a
/// fixed phase (largest-magnitude component real and nonnegative).
struct EigenDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // column i pairs with values(i)

  std::size_t n() const { return static_cast<std::size_t>(values.size()); }
  /// Operator norm of the decomposed operator: max(|values_0|, |values_{n-1}|).
  double spectral_norm() const {
    return values.size() == 0 ? 0.0
                              : std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
  }
  std::vector<double> values_vector() const {
    return std::vector<double>(values.data(), values.data() + values.size());
  }
};

namespace detail {

inline void fix_column_phase(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index k = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best) {
        best = a;
        k = r;
      }
    }
    if (best <= 0.0) continue;
    const Complex pivot = vectors(k, c);
    vectors.col(c) *= std::conj(pivot) / std::abs(pivot);
    // the pivot entry is now real up to roundoff; make it exact
    vectors(k, c) = Complex(std::abs(pivot), 0.0);
  }
}

// Operator norm of a matrix already known to be Hermitian.
inline double hermitian_norm(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  if (m.imag().cwiseAbs().maxCoeff() <= Tolerances{}.real_fast_path) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.real(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      fail(ErrorCode::ConvergenceFailure, "eigenvalue iteration did not converge");
    const auto& v = es.eigenvalues();
    return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::ConvergenceFailure, "eigenvalue iteration did not converge");
  const auto& v = es.eigenvalues();
  return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
}

}  // namespace detail

/// Hermitian eigendecomposition. Real-symmetric inputs take a real-arithmetic
/// path; both paths agree to 1e-10 and are deterministic for fixed input.
inline EigenDecomposition eigh(const HermitianOperator& a, const Tolerances& tol = {}) {
  EigenDecomposition out;
  if (a.is_real(tol.real_fast_path)) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(a.matrix().real());
    if (es.info() != Eigen::Success)
      fail(ErrorCode::ConvergenceFailure, "eigenvalue iteration budget exhausted");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
    if (es.info() != Eigen::Success)
      fail(ErrorCode::ConvergenceFailure, "eigenvalue iteration budget exhausted");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  detail::fix_column_phase(out.vectors);
  return out;
}

/// Operator norm of a Hermitian operator: max(|m_V|, |M_V|) over its spectrum.
inline double operator_norm(const HermitianOperator& v) {
  return detail::hermitian_norm(v.matrix());
}

/// Orthogonal projection P = P^2 = P^H with its rank.
struct OrthogonalProjection {
  HermitianOperator matrix;
  std::size_t rank;

  std::size_t n() const { return matrix.n(); }
  OrthogonalProjection complement() const {
    return {HermitianOperator(Matrix(Matrix::Identity(matrix.matrix().rows(),
                                                      matrix.matrix().cols()) -
                                     matrix.matrix())),
            matrix.n() - rank};
  }
};

namespace detail {

inline IndexSet normalize_index_set(const IndexSet& idx, std::size_t n,
                                    const std::string& what) {
  IndexSet s(idx);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (std::size_t i : s)
    if (i >= n)
      fail(ErrorCode::DomainViolation,
           what + " index " + std::to_string(i) + " out of range for dimension " +
               std::to_string(n));
  return s;
}

// Partition [0,n) into clusters of eigenvalues equal within tol_abs.
inline std::vector<std::pair<std::size_t, std::size_t>> degeneracy_groups(
    const RealVector& values, double tol_abs) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  const std::size_t n = static_cast<std::size_t>(values.size());
  std::size_t start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || values(static_cast<Eigen::Index>(i)) -
                          values(static_cast<Eigen::Index>(i - 1)) >
                      tol_abs) {
      groups.emplace_back(start, i);
      start = i;
    }
  }
  return groups;
}

inline void require_no_group_split(const RealVector& values, const IndexSet& sel,
                                   double tol_abs) {
  std::vector<char> in(static_cast<std::size_t>(values.size()), 0);
  for (std::size_t i : sel) in[i] = 1;
  for (const auto& [lo, hi] : degeneracy_groups(values, tol_abs)) {
    std::size_t cnt = 0;
    for (std::size_t i = lo; i < hi; ++i) cnt += in[i];
    if (cnt != 0 && cnt != hi - lo)
      fail(ErrorCode::SplitDegeneracy,
           "index set splits a degenerate eigenvalue group [" + std::to_string(lo) + "," +
               std::to_string(hi) + ")");
  }
}

// Sum of |u_i><u_i| over the selection; empty selection gives the zero matrix.
// No subset or degeneracy validation; callers that accept user index sets go
// through spectral_projection instead.
inline OrthogonalProjection projection_from_indices(const EigenDecomposition& eig,
                                                    const IndexSet& sel) {
  const Eigen::Index n = eig.vectors.rows();
  Matrix p = Matrix::Zero(n, n);
  for (std::size_t i : sel) {
    const auto u = eig.vectors.col(static_cast<Eigen::Index>(i));
    p.noalias() += u * u.adjoint();
  }
  return {HermitianOperator(symmetrize(p)), sel.size()};
}

}  // namespace detail

/// Spectral projection onto the eigenvectors selected by sigma_indices.
/// The index set must be a nonempty proper subset and must not split a
/// degenerate eigenvalue group.
inline OrthogonalProjection spectral_projection(const EigenDecomposition& eig,
                                                const IndexSet& sigma_indices,
                                                const Tolerances& tol = {}) {
  const std::size_t n = eig.n();
  const IndexSet sel = detail::normalize_index_set(sigma_indices, n, "sigma");
  if (sel.empty() || sel.size() == n)
    fail(ErrorCode::EmptySet, "sigma and its complement must both be nonempty");
  detail::require_no_group_split(eig.values, sel,
                                 tol.degeneracy * (1.0 + eig.spectral_norm()));
  return detail::projection_from_indices(eig, sel);
}

/// arcsin(||P - Q||) plus the quantities it is read off from.
struct SubspaceAngle {
  double theta;           // radians, in [0, pi/2]
  double proj_diff_norm;  // ||P - Q||, clamped into [0, 1]
  bool ranks_equal;
  bool unitarily_equivalent;  // ||P - Q|| < 1
};

/// Maximal angle between the ranges of two orthogonal projections.
inline SubspaceAngle subspace_max_angle(const OrthogonalProjection& p,
                                        const OrthogonalProjection& q) {
  if (p.n() != q.n())
    fail(ErrorCode::DimensionMismatch, "projections have dimensions " +
                                           std::to_string(p.n()) + " and " +
                                           std::to_string(q.n()));
  const double raw = detail::hermitian_norm(p.matrix.matrix() - q.matrix.matrix());
  if (raw > 1.0 + 1e-6)
    throw std::logic_error("||P - Q|| = " + std::to_string(raw) +
                           " > 1; inputs are not orthogonal projections");
  // floating-point overshoot by ~1e-15 must not produce asin domain errors
  const double clamped = std::clamp(raw, 0.0, 1.0);
  return {std::asin(clamped), clamped, p.rank == q.rank, clamped < 1.0};
}

}  // namespace specsub
