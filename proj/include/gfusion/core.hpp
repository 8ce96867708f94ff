#pragma once

// Dense complex linear algebra substrate: adjoints, positivity, square
// roots, projections, subspace transport and spectral bounds.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "gfusion/errors.hpp"
#include "gfusion/tolerances.hpp"

namespace gfusion {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using Operator = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using Vector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

using OperatorD = Operator<double>;
using VectorD = Vector<double>;

/// Real type underlying an Eigen expression (double for both MatrixXd and MatrixXcd).
template <typename Derived>
using RealOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

template <typename Derived>
Operator<RealOf<Derived>> to_operator(const Eigen::MatrixBase<Derived>& a) {
  return a.template cast<Complex<RealOf<Derived>>>();
}

template <typename Real>
Operator<Real> identity(Eigen::Index n) {
  return Operator<Real>::Identity(n, n);
}

/// <x, y>, linear in the first slot.
template <typename DerivedX, typename DerivedY>
auto inner(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  return y.dot(x);
}

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw DimensionError(msg);
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, const char* what) {
  require(a.rows() >= 1 && a.rows() == a.cols(),
          std::string(what) + ": expected a square operator, got " + std::to_string(a.rows()) +
              "x" + std::to_string(a.cols()));
  require(a.rows() <= kMaxDimension,
          std::string(what) + ": dimension " + std::to_string(a.rows()) + " exceeds cap " +
              std::to_string(kMaxDimension));
}

}  // namespace detail

template <typename Derived>
Operator<RealOf<Derived>> adjoint(const Eigen::MatrixBase<Derived>& a) {
  return to_operator(a).adjoint();
}

/// Largest singular value.
template <typename Derived>
RealOf<Derived> operator_norm(const Eigen::MatrixBase<Derived>& a) {
  using Real = RealOf<Derived>;
  if (a.size() == 0) return Real(0);
  Eigen::JacobiSVD<Operator<Real>> svd(to_operator(a));
  return svd.singularValues()(0);
}

template <typename Derived>
RealOf<Derived> smallest_singular_value(const Eigen::MatrixBase<Derived>& a) {
  using Real = RealOf<Derived>;
  Eigen::JacobiSVD<Operator<Real>> svd(to_operator(a));
  return svd.singularValues()(svd.singularValues().size() - 1);
}

template <typename Derived>
Operator<RealOf<Derived>> hermitian_part(const Eigen::MatrixBase<Derived>& a) {
  detail::require_square(a, "hermitian_part");
  const Operator<RealOf<Derived>> m = to_operator(a);
  return (m + m.adjoint()) / RealOf<Derived>(2);
}

/// ||A - A*|| / max(1, ||A||), operator 2-norm.
template <typename Derived>
RealOf<Derived> herm_defect(const Eigen::MatrixBase<Derived>& a) {
  using Real = RealOf<Derived>;
  detail::require_square(a, "herm_defect");
  const Operator<Real> m = to_operator(a);
  return operator_norm(m - m.adjoint()) / std::max(Real(1), operator_norm(m));
}

/// ||AB - BA|| / max(1, ||A|| ||B||).
template <typename DerivedA, typename DerivedB>
RealOf<DerivedA> commutation_defect(const Eigen::MatrixBase<DerivedA>& a,
                                    const Eigen::MatrixBase<DerivedB>& b) {
  using Real = RealOf<DerivedA>;
  const Operator<Real> x = to_operator(a);
  const Operator<Real> y = to_operator(b);
  detail::require(x.rows() == y.rows() && x.cols() == y.cols() && x.rows() == x.cols(),
                  "commutation_defect: shape mismatch");
  return operator_norm(x * y - y * x) / std::max(Real(1), operator_norm(x) * operator_norm(y));
}

/// Ascending eigenvalues of the Hermitian part.
template <typename Derived>
Eigen::Matrix<RealOf<Derived>, Eigen::Dynamic, 1> hermitian_eigenvalues(
    const Eigen::MatrixBase<Derived>& a) {
  Eigen::SelfAdjointEigenSolver<Operator<RealOf<Derived>>> es(hermitian_part(a),
                                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

template <typename Real>
struct SpectralSummary {
  Real lambda_min;
  Real lambda_max;
  Real herm_defect;
};

template <typename Derived>
SpectralSummary<RealOf<Derived>> spectral_summary(const Eigen::MatrixBase<Derived>& a) {
  detail::require_square(a, "spectral_summary");
  const auto ev = hermitian_eigenvalues(a);
  return {ev(0), ev(ev.size() - 1), herm_defect(a)};
}

template <typename Derived>
bool is_positive(const Eigen::MatrixBase<Derived>& a, double tol) {
  detail::require_square(a, "is_positive");
  if (herm_defect(a) > tol) return false;
  return hermitian_eigenvalues(a)(0) >= -tol;
}

/// Unique positive square root. Eigenvalues in [-tol, 0) are clamped to zero.
template <typename Derived>
Operator<RealOf<Derived>> operator_sqrt(const Eigen::MatrixBase<Derived>& a, double tol) {
  using Real = RealOf<Derived>;
  detail::require_square(a, "operator_sqrt");
  if (herm_defect(a) > tol)
    throw NotPositiveError("operator_sqrt: operator is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Operator<Real>> es(hermitian_part(a));
  auto ev = es.eigenvalues().eval();
  if (ev(0) < -Real(tol))
    throw NotPositiveError("operator_sqrt: smallest eigenvalue " + std::to_string(double(ev(0))) +
                           " is below -tol");
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), Real(0)));
  const Operator<Real>& q = es.eigenvectors();
  Operator<Real> root = q * ev.template cast<Complex<Real>>().asDiagonal() * q.adjoint();
  return (root + root.adjoint()) / Real(2);
}

/// Inverse of an operator whose smallest singular value exceeds tol_sing * ||A||.
template <typename Derived>
Operator<RealOf<Derived>> inverse(const Eigen::MatrixBase<Derived>& a, double tol_sing = 1e-12) {
  using Real = RealOf<Derived>;
  detail::require_square(a, "inverse");
  const Operator<Real> m = to_operator(a);
  Eigen::JacobiSVD<Operator<Real>> svd(m);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > Real(tol_sing) * s(0)) || s(0) == Real(0))
    throw SingularOperatorError("inverse: operator is singular (sigma_min = " +
                                std::to_string(double(s(s.size() - 1))) + ")");
  return m.partialPivLu().inverse();
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose
/// residual falls below drop_tol (relative to their original norm) are dropped.
template <typename Derived>
Operator<RealOf<Derived>> orthonormalize(const Eigen::MatrixBase<Derived>& columns,
                                         double drop_tol = 1e-12) {
  using Real = RealOf<Derived>;
  const Operator<Real> in = to_operator(columns);
  Operator<Real> out(in.rows(), in.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < in.cols(); ++j) {
    Vector<Real> w = in.col(j);
    const Real original = w.norm();
    if (original == Real(0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < kept; ++k) w -= out.col(k).dot(w) * out.col(k);
    }
    const Real residual = w.norm();
    if (residual < Real(drop_tol) * original) continue;
    out.col(kept++) = w / residual;
  }
  return out.leftCols(kept);
}

/// Closed subspace of C^n held as an orthonormal basis (n x r).
template <typename Real>
class Subspace {
 public:
  /// Takes ownership of a basis that must already be orthonormal within tol_orth.
  explicit Subspace(Operator<Real> basis, double tol_orth = 1e-10) : basis_(std::move(basis)) {
    detail::require(basis_.cols() >= 1 && basis_.rows() >= basis_.cols(),
                    "Subspace: basis must be n x r with 1 <= r <= n");
    const Real defect =
        (basis_.adjoint() * basis_ - Operator<Real>::Identity(basis_.cols(), basis_.cols()))
            .cwiseAbs()
            .maxCoeff();
    if (!(defect <= Real(tol_orth)))
      throw PreconditionError("Subspace: basis columns are not orthonormal (defect " +
                              std::to_string(double(defect)) + ")");
  }

  /// Span of arbitrary columns, orthonormalized.
  template <typename Derived>
  static Subspace span(const Eigen::MatrixBase<Derived>& columns) {
    Operator<Real> b = orthonormalize(columns);
    if (b.cols() == 0) throw PreconditionError("Subspace::span: columns span the zero subspace");
    return Subspace(std::move(b));
  }

  /// span{e_k : k in indices} in C^n.
  static Subspace coordinate(Eigen::Index n, std::initializer_list<Eigen::Index> indices) {
    return coordinate(n, std::vector<Eigen::Index>(indices));
  }

  static Subspace coordinate(Eigen::Index n, const std::vector<Eigen::Index>& indices) {
    Operator<Real> b = Operator<Real>::Zero(n, static_cast<Eigen::Index>(indices.size()));
    Eigen::Index c = 0;
    for (auto k : indices) {
      detail::require(k >= 0 && k < n, "Subspace::coordinate: index out of range");
      b(k, c++) = Real(1);
    }
    return Subspace(std::move(b));
  }

  static Subspace full(Eigen::Index n) { return Subspace(Operator<Real>::Identity(n, n)); }

  const Operator<Real>& basis() const noexcept { return basis_; }
  Eigen::Index ambient_dim() const noexcept { return basis_.rows(); }
  Eigen::Index dim() const noexcept { return basis_.cols(); }

 private:
  Operator<Real> basis_;
};

using SubspaceD = Subspace<double>;

/// Orthogonal projection basis * basis*, made exactly Hermitian.
template <typename Real>
Operator<Real> projection(const Subspace<Real>& s) {
  Operator<Real> p = s.basis() * s.basis().adjoint();
  const Eigen::Index n = p.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i, i) = Complex<Real>(p(i, i).real(), Real(0));
    for (Eigen::Index j = i + 1; j < n; ++j) p(j, i) = std::conj(p(i, j));
  }
  return p;
}

/// The image V(S), orthonormalized. V must be invertible.
template <typename Derived, typename Real>
Subspace<Real> transport_subspace(const Eigen::MatrixBase<Derived>& v, const Subspace<Real>& s,
                                  double tol_sing = 1e-12) {
  detail::require_square(v, "transport_subspace");
  detail::require(v.rows() == s.ambient_dim(), "transport_subspace: dimension mismatch");
  const Operator<Real> m = v.template cast<Complex<Real>>();
  Eigen::JacobiSVD<Operator<Real>> svd(m);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > Real(tol_sing) * sv(0)))
    throw SingularOperatorError("transport_subspace: operator is singular");
  return Subspace<Real>::span(m * s.basis());
}

}  // namespace gfusion
