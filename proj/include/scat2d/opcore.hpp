#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "scat2d/errors.hpp"

namespace scat2d {

using Complex = std::complex<double>;
using Eigen::Index;

// ---------------------------------------------------------------------------
// Spatial quadrature on a disk.
//
// Nodes are laid out ring by ring: node (ring i, angle a) has flat index
// i * n_angular + a. Radial nodes are composite Gauss-Legendre over the panels
// [0, b_1], [b_1, b_2], ..., [b_k, radius]; angles are equispaced.
// ---------------------------------------------------------------------------
class QuadGrid2D {
 public:
  QuadGrid2D() = default;

  Index size() const { return weights_.size(); }
  double radius() const { return radius_; }
  int n_radial() const { return static_cast<int>(ring_radii_.size()); }
  int n_angular() const { return n_angular_; }

  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& ring_radii() const { return ring_radii_; }
  const std::vector<double>& panel_edges() const { return panel_edges_; }

  /// Product-integration weight of ln|x - y| for target ring i, source ring j
  /// and angular offset delta = (a_target - b_source) mod n_angular.
  double log_weight(int ring_i, int ring_j, int delta) const {
    return log_weights_[(static_cast<std::size_t>(ring_i) * n_radial() + ring_j) * n_angular_ + delta];
  }

  friend QuadGrid2D build_disk_grid(double, int, int, std::span<const double>);

 private:
  double radius_ = 0.0;
  int n_angular_ = 0;
  Eigen::VectorXd x_, y_, weights_, ring_radii_;
  std::vector<double> panel_edges_;
  std::vector<double> log_weights_;
};

/// Tensor Gauss-Legendre (radial, with Jacobian r) x trapezoid (angular)
/// quadrature on the disk of the given radius. `breakpoints` split the radial
/// direction into panels so that jumps of the integrand sit on panel edges.
QuadGrid2D build_disk_grid(double radius, int n_radial, int n_angular,
                           std::span<const double> breakpoints = {});

/// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int n, double a, double b, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Equispaced directions on the unit circle; carrier of L^2(S).
class AngularGrid {
 public:
  explicit AngularGrid(int m);

  int size() const { return m_; }
  double angle(int k) const { return angles_[k]; }
  const Eigen::VectorXd& angles() const { return angles_; }
  double weight() const { return weight_; }
  Eigen::VectorXd weights() const { return Eigen::VectorXd::Constant(m_, weight_); }
  /// Index of the antipodal direction -omega_k.
  int antipode(int k) const { return (k + m_ / 2) % m_; }

 private:
  int m_;
  double weight_;
  Eigen::VectorXd angles_;
};

// ---------------------------------------------------------------------------
// Dense operator between two weighted L^2 spaces. Entries act on raw node
// values; inner products carry the weights, so adjoints are
// A* = D_col^{-1} A^H D_row.
// ---------------------------------------------------------------------------
template <typename Scalar>
class WeightedOperator {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  WeightedOperator() = default;
  WeightedOperator(Matrix m, Eigen::VectorXd row_weights, Eigen::VectorXd col_weights)
      : matrix_(std::move(m)), row_w_(std::move(row_weights)), col_w_(std::move(col_weights)) {
    if (matrix_.rows() != row_w_.size() || matrix_.cols() != col_w_.size())
      throw Error(ErrorKind::GridMismatch, "matrix dimensions do not match weight vectors");
  }

  const Matrix& matrix() const { return matrix_; }
  Matrix& matrix() { return matrix_; }
  Index rows() const { return matrix_.rows(); }
  Index cols() const { return matrix_.cols(); }
  const Eigen::VectorXd& row_weights() const { return row_w_; }
  const Eigen::VectorXd& col_weights() const { return col_w_; }

  template <typename Other>
  WeightedOperator<Other> cast() const {
    return {matrix_.template cast<Other>(), row_w_, col_w_};
  }

 private:
  Matrix matrix_;
  Eigen::VectorXd row_w_, col_w_;
};

using RealOperator = WeightedOperator<double>;
using ComplexOperator = WeightedOperator<Complex>;

namespace detail {
inline void check_weights(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || (a - b).cwiseAbs().maxCoeff() > 1e-12 * a.cwiseAbs().maxCoeff())
    throw Error(ErrorKind::GridMismatch, "operator weights do not match");
}
}  // namespace detail

template <typename Scalar>
WeightedOperator<Scalar> identity_operator(const Eigen::VectorXd& weights) {
  const Index n = weights.size();
  return {WeightedOperator<Scalar>::Matrix::Identity(n, n), weights, weights};
}

template <typename Scalar>
WeightedOperator<Scalar> weighted_adjoint(const WeightedOperator<Scalar>& op) {
  typename WeightedOperator<Scalar>::Matrix m =
      op.col_weights().cwiseInverse().asDiagonal() * op.matrix().adjoint() * op.row_weights().asDiagonal();
  return {std::move(m), op.col_weights(), op.row_weights()};
}

template <typename Scalar>
WeightedOperator<Scalar> operator*(const WeightedOperator<Scalar>& a, const WeightedOperator<Scalar>& b) {
  detail::check_weights(a.col_weights(), b.row_weights());
  return {a.matrix() * b.matrix(), a.row_weights(), b.col_weights()};
}

template <typename Scalar>
WeightedOperator<Scalar> operator+(const WeightedOperator<Scalar>& a, const WeightedOperator<Scalar>& b) {
  detail::check_weights(a.row_weights(), b.row_weights());
  detail::check_weights(a.col_weights(), b.col_weights());
  return {a.matrix() + b.matrix(), a.row_weights(), a.col_weights()};
}

template <typename Scalar>
WeightedOperator<Scalar> operator-(const WeightedOperator<Scalar>& a, const WeightedOperator<Scalar>& b) {
  detail::check_weights(a.row_weights(), b.row_weights());
  detail::check_weights(a.col_weights(), b.col_weights());
  return {a.matrix() - b.matrix(), a.row_weights(), a.col_weights()};
}

template <typename Scalar>
WeightedOperator<Scalar> operator*(Scalar s, const WeightedOperator<Scalar>& a) {
  return {s * a.matrix(), a.row_weights(), a.col_weights()};
}

/// Multiplication by a function sampled at the nodes (diagonal operator).
template <typename Scalar, typename Derived>
WeightedOperator<Scalar> multiplication_operator(const Eigen::MatrixBase<Derived>& f, const Eigen::VectorXd& weights) {
  typename WeightedOperator<Scalar>::Matrix m = f.template cast<Scalar>().asDiagonal();
  return {std::move(m), weights, weights};
}

/// Matrix D_row^{1/2} A D_col^{-1/2}: the operator in orthonormal coordinates.
/// Its spectral norm and singular values are those of the weighted operator.
template <typename Scalar>
typename WeightedOperator<Scalar>::Matrix orthonormal_matrix(const WeightedOperator<Scalar>& op) {
  return op.row_weights().cwiseSqrt().asDiagonal() * op.matrix() *
         op.col_weights().cwiseSqrt().cwiseInverse().asDiagonal();
}

/// Spectral norm in the weighted sense.
template <typename Scalar>
double weighted_norm(const WeightedOperator<Scalar>& op) {
  if (op.rows() == 0 || op.cols() == 0) return 0.0;
  const auto a = orthonormal_matrix(op);
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const auto as = (a / scale).eval();
  // Gram matrix on the smaller side; eigenvalues only.
  using M = typename WeightedOperator<Scalar>::Matrix;
  const M gram = as.rows() <= as.cols() ? M(as * as.adjoint()) : M(as.adjoint() * as);
  Eigen::SelfAdjointEigenSolver<M> es(gram, Eigen::EigenvaluesOnly);
  return scale * std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

template <typename Scalar>
typename WeightedOperator<Scalar>::Vector apply(const WeightedOperator<Scalar>& op,
                                                const typename WeightedOperator<Scalar>::Vector& f) {
  return op.matrix() * f;
}

/// <f, g> with weights w (antilinear in f).
template <typename Derived1, typename Derived2>
auto weighted_inner(const Eigen::MatrixBase<Derived1>& f, const Eigen::MatrixBase<Derived2>& g,
                    const Eigen::VectorXd& w) {
  return f.cwiseProduct(w.template cast<typename Derived1::Scalar>()).dot(g);
}

/// ‖op - op*‖ in the weighted norm.
template <typename Scalar>
double self_adjoint_defect(const WeightedOperator<Scalar>& op) {
  return weighted_norm(op - weighted_adjoint(op));
}

// ---------------------------------------------------------------------------
// Null-space projections with spectral-gap certification.
// ---------------------------------------------------------------------------
struct GapReport {
  double sigma_max = 0.0;
  double threshold = 0.0;          // tol * sigma_max
  double smallest_kept = 0.0;      // +inf if nothing kept
  double largest_discarded = 0.0;  // 0 if nothing discarded
  double gap_ratio = 0.0;          // smallest_kept / max(largest_discarded, threshold)
  Index rank = 0;                  // dimension of the kernel
  Eigen::VectorXd singular_values;  // ascending
};

template <typename Scalar>
struct NullspaceResult {
  WeightedOperator<Scalar> projector;
  /// Columns: weighted-orthonormal basis of the kernel.
  typename WeightedOperator<Scalar>::Matrix basis;
  GapReport gap;
};

inline constexpr double kDefaultNullTol = 1e-6;
inline constexpr double kRequiredGap = 10.0;

/// Orthogonal (weighted) projection onto span of singular vectors with
/// singular value < tol * sigma_max. `op` must be square and weighted
/// self-adjoint (within 1e-8); singular values are |eigenvalues| of the
/// symmetrised matrix. Throws IllConditionedSplit when the gap across the
/// threshold is below kRequiredGap.
template <typename Scalar>
NullspaceResult<Scalar> nullspace_projection(const WeightedOperator<Scalar>& op, double tol = kDefaultNullTol);

extern template NullspaceResult<double> nullspace_projection(const WeightedOperator<double>&, double);
extern template NullspaceResult<Complex> nullspace_projection(const WeightedOperator<Complex>&, double);

/// Projector onto the span of weighted-orthonormal columns.
template <typename Scalar>
WeightedOperator<Scalar> projector_from_basis(const typename WeightedOperator<Scalar>::Matrix& basis,
                                              const Eigen::VectorXd& weights) {
  typename WeightedOperator<Scalar>::Matrix p =
      basis * basis.adjoint() * weights.template cast<Scalar>().asDiagonal();
  return {std::move(p), weights, weights};
}

// ---------------------------------------------------------------------------
// Spectral transform and its zero-energy expansion.
//
// Fourier convention: (Ff)(xi) = (2 pi)^{-1} int exp(-i xi.x) f(x) dx, so that
// (F0(lambda) f)(omega) = 2^{-1/2} (Ff)(sqrt(lambda) omega) and the
// lambda -> 0 limit carries the prefactor 1/(2^{3/2} pi) of gamma_0.
// ---------------------------------------------------------------------------

/// F0(lambda): grid functions -> angular functions (rows = omega, cols = x).
ComplexOperator assemble_F0(double lambda, const QuadGrid2D& grid, const AngularGrid& ang);

/// gamma_j, j in {0, 1, 2}: entries (-i)^j (2^{3/2} pi j!)^{-1} (omega.x)^j w_x.
ComplexOperator assemble_gamma(int j, const QuadGrid2D& grid, const AngularGrid& ang);

}  // namespace scat2d
