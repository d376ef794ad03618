#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "evap/errors.hpp"

namespace evap {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class Side { First, Last };

namespace detail {

// Unit-spacing diagonal-norm first-derivative operators (interior order 2p,
// boundary order p). Rows of the left closure are given as D entries; the
// right closure follows from D(n-1-i, n-1-j) = -D(i, j).
template <typename Scalar>
struct SbpTable {
  std::vector<Scalar> norm;                  // closure norm weights
  std::vector<std::vector<Scalar>> closure;  // closure rows of D
  std::vector<Scalar> interior;              // c_1..c_r, D row = sum c_m (u_{i+m} - u_{i-m})
};

template <typename Scalar>
SbpTable<Scalar> sbp_table(int order) {
  auto r = [](long num, long den) { return Scalar(num) / Scalar(den); };
  switch (order) {
    case 2:
      return {{r(1, 2)}, {{r(-1, 1), r(1, 1)}}, {r(1, 2)}};
    case 4:
      return {{r(17, 48), r(59, 48), r(43, 48), r(49, 48)},
              {{r(-24, 17), r(59, 34), r(-4, 17), r(-3, 34), 0, 0},
               {r(-1, 2), 0, r(1, 2), 0, 0, 0},
               {r(4, 43), r(-59, 86), 0, r(59, 86), r(-4, 43), 0},
               {r(3, 98), 0, r(-59, 98), 0, r(32, 49), r(-4, 49)}},
              {r(2, 3), r(-1, 12)}};
    case 6:
      return {{r(13649, 43200), r(12013, 8640), r(2711, 4320), r(5359, 4320), r(7877, 8640),
               r(43801, 43200)},
              {{r(-21600, 13649), r(104009, 54596), r(30443, 81894), r(-33311, 27298),
                r(16863, 27298), r(-15025, 163788), 0, 0, 0},
               {r(-104009, 240260), 0, r(-311, 72078), r(20229, 24026), r(-24337, 48052),
                r(36661, 360390), 0, 0, 0},
               {r(-30443, 162660), r(311, 32532), 0, r(-11155, 16266), r(41287, 32532),
                r(-21999, 54220), 0, 0, 0},
               {r(33311, 107180), r(-20229, 21436), r(485, 1398), 0, r(4147, 21436),
                r(25427, 321540), r(72, 5359), 0, 0},
               {r(-16863, 78770), r(24337, 31508), r(-41287, 47262), r(-4147, 15754), 0,
                r(342523, 472620), r(-1296, 7877), r(144, 7877), 0},
               {r(15025, 525612), r(-36661, 262806), r(21999, 87602), r(-25427, 262806),
                r(-342523, 525612), 0, r(32400, 43801), r(-6480, 43801), r(720, 43801)}},
              {r(3, 4), r(-3, 20), r(1, 60)}};
    default:
      throw ConfigError("unsupported SBP interior order " + std::to_string(order) +
                        " (expected 2, 4 or 6)");
  }
}

}  // namespace detail

/// Smallest grid accepted for an interior order: two full boundary closures.
inline int minimum_points(int interior_order) {
  switch (interior_order) {
    case 2: return 4;
    case 4: return 8;
    case 6: return 12;
    default:
      throw ConfigError("unsupported SBP interior order " + std::to_string(interior_order) +
                        " (expected 2, 4 or 6)");
  }
}

/// Diagonal-norm summation-by-parts first-derivative operator on a uniform grid.
///
/// Holds the norm P (quadrature weights, spacing included), the nearly
/// skew-symmetric Q with Q + Q^T = diag(-1, 0, ..., 0, 1), and D = P^{-1} Q.
/// D and Q are stored densely; `apply` uses the banded structure and agrees
/// with `D() * v` to rounding.
template <typename Scalar = double>
class SbpOperator {
public:
  SbpOperator(int interior_order, Eigen::Index n_points, Scalar spacing)
      : order_(interior_order), n_(n_points), h_(spacing) {
    if (n_points < minimum_points(interior_order)) {
      throw ConfigError("SBP order " + std::to_string(interior_order) + " needs at least " +
                        std::to_string(minimum_points(interior_order)) + " points, got " +
                        std::to_string(n_points));
    }
    if (!(spacing > Scalar(0)) || !std::isfinite(static_cast<double>(spacing))) {
      throw ConfigError("SBP spacing must be positive and finite");
    }

    const auto table = detail::sbp_table<Scalar>(order_);
    const Eigen::Index r = static_cast<Eigen::Index>(table.norm.size());
    const Eigen::Index w = static_cast<Eigen::Index>(table.closure.front().size());

    closure_ = Matrix<Scalar>::Zero(r, w);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < w; ++j) closure_(i, j) = table.closure[i][j];
    stencil_ = table.interior;

    p_unit_ = Vector<Scalar>::Ones(n_);
    for (Eigen::Index i = 0; i < r; ++i) {
      p_unit_(i) = table.norm[i];
      p_unit_(n_ - 1 - i) = table.norm[i];
    }

    // Q is spacing independent: Q = diag(p) * D_unit.
    q_ = Matrix<Scalar>::Zero(n_, n_);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < w; ++j) {
        q_(i, j) = p_unit_(i) * closure_(i, j);
        q_(n_ - 1 - i, n_ - 1 - j) = -q_(i, j);
      }
    }
    const Eigen::Index half = static_cast<Eigen::Index>(stencil_.size());
    for (Eigen::Index i = r; i < n_ - r; ++i) {
      for (Eigen::Index m = 1; m <= half; ++m) {
        q_(i, i + m) = stencil_[m - 1];
        q_(i, i - m) = -stencil_[m - 1];
      }
    }

    p_ = h_ * p_unit_;
    d_ = p_.cwiseInverse().asDiagonal() * q_;
  }

  int interior_order() const { return order_; }
  Eigen::Index size() const { return n_; }
  Scalar spacing() const { return h_; }

  const Vector<Scalar>& P() const { return p_; }
  const Matrix<Scalar>& Q() const { return q_; }
  const Matrix<Scalar>& D() const { return d_; }

  /// Boundary selector index: E_0 picks node 0, E_N picks node n-1.
  Eigen::Index boundary_index(Side side) const { return side == Side::First ? 0 : n_ - 1; }

  /// Reference grid xi_i = i * spacing.
  Vector<Scalar> grid() const {
    return Vector<Scalar>::LinSpaced(n_, Scalar(0), h_ * Scalar(n_ - 1));
  }

  /// D * v in O(n) using the closure block and interior stencil.
  template <typename Derived>
  Vector<Scalar> apply(const Eigen::MatrixBase<Derived>& v) const {
    const Eigen::Index r = closure_.rows();
    const Eigen::Index w = closure_.cols();
    const Eigen::Index half = static_cast<Eigen::Index>(stencil_.size());
    const Scalar inv_h = Scalar(1) / h_;
    Vector<Scalar> out(n_);
    for (Eigen::Index i = 0; i < r; ++i) {
      Scalar left = 0, right = 0;
      // Rows sum to zero, so differencing against v(i) keeps constants exact.
      for (Eigen::Index j = 0; j < w; ++j) {
        left += closure_(i, j) * (v(j) - v(i));
        right -= closure_(i, j) * (v(n_ - 1 - j) - v(n_ - 1 - i));
      }
      out(i) = left * inv_h;
      out(n_ - 1 - i) = right * inv_h;
    }
    for (Eigen::Index i = r; i < n_ - r; ++i) {
      Scalar acc = 0;
      for (Eigen::Index m = 1; m <= half; ++m) acc += stencil_[m - 1] * (v(i + m) - v(i - m));
      out(i) = acc * inv_h;
    }
    return out;
  }

  /// Row i of D * v alone; used for interface and boundary fluxes.
  template <typename Derived>
  Scalar apply_row(Eigen::Index i, const Eigen::MatrixBase<Derived>& v) const {
    if (dense_apply_) return d_.row(i).dot(v);
    Scalar acc = 0;
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (d_(i, j) != Scalar(0)) acc += d_(i, j) * (v(j) - v(i));
    }
    return acc;
  }

  /// Copy with Q(i, j) shifted by delta (D rebuilt). Mutation hook for the verifiers.
  SbpOperator with_perturbed_q(Eigen::Index i, Eigen::Index j, Scalar delta) const {
    SbpOperator copy = *this;
    copy.q_(i, j) += delta;
    copy.d_ = copy.p_.cwiseInverse().asDiagonal() * copy.q_;
    copy.dense_apply_ = true;
    return copy;
  }

  bool uses_dense_apply() const { return dense_apply_; }

private:
  int order_;
  Eigen::Index n_;
  Scalar h_;
  Vector<Scalar> p_unit_;
  Vector<Scalar> p_;
  Matrix<Scalar> q_;
  Matrix<Scalar> d_;
  Matrix<Scalar> closure_;
  std::vector<Scalar> stencil_;
  bool dense_apply_ = false;
};

/// Operator on the reference interval [0, 1].
template <typename Scalar = double>
SbpOperator<Scalar> build_sbp(int interior_order, Eigen::Index n_points, Scalar spacing) {
  return SbpOperator<Scalar>(interior_order, n_points, spacing);
}

template <typename Scalar = double>
SbpOperator<Scalar> build_unit_sbp(int interior_order, Eigen::Index n_points) {
  if (n_points < 2) throw ConfigError("SBP grid needs at least 2 points");
  return SbpOperator<Scalar>(interior_order, n_points, Scalar(1) / Scalar(n_points - 1));
}

namespace detail {
template <typename Scalar, typename Derived>
void require_length(const SbpOperator<Scalar>& op, const Eigen::MatrixBase<Derived>& v,
                    const char* what) {
  if (v.size() != op.size()) {
    throw ShapeError(std::string(what) + ": length " + std::to_string(v.size()) +
                     " does not match operator size " + std::to_string(op.size()));
  }
}
}  // namespace detail

template <typename Scalar, typename Derived>
Vector<Scalar> apply_derivative(const SbpOperator<Scalar>& op,
                                const Eigen::MatrixBase<Derived>& field) {
  detail::require_length(op, field, "apply_derivative");
  if (op.uses_dense_apply()) return op.D() * field;
  return op.apply(field);
}

/// Discrete weighted inner product u^T P W v.
template <typename Scalar, typename DU, typename DV, typename DW>
Scalar quadrature(const SbpOperator<Scalar>& op, const Eigen::MatrixBase<DU>& u,
                  const Eigen::MatrixBase<DV>& v, const Eigen::MatrixBase<DW>& weight) {
  detail::require_length(op, u, "quadrature(u)");
  detail::require_length(op, v, "quadrature(v)");
  detail::require_length(op, weight, "quadrature(weight)");
  if (!(weight.minCoeff() > Scalar(0))) {
    throw GeometryError("quadrature: non-positive weight (invalid Jacobian)");
  }
  return (u.array() * op.P().array() * weight.array() * v.array()).sum();
}

template <typename Scalar, typename DU, typename DV>
Scalar quadrature(const SbpOperator<Scalar>& op, const Eigen::MatrixBase<DU>& u,
                  const Eigen::MatrixBase<DV>& v) {
  return quadrature(op, u, v, Vector<Scalar>::Ones(op.size()));
}

/// max |Q + Q^T - B| with B = diag(-1, 0, ..., 0, 1).
template <typename Scalar>
Scalar sbp_property_residual(const SbpOperator<Scalar>& op) {
  Matrix<Scalar> m = op.Q() + op.Q().transpose();
  m(0, 0) += Scalar(1);
  m(op.size() - 1, op.size() - 1) -= Scalar(1);
  return m.cwiseAbs().maxCoeff();
}

}  // namespace evap
