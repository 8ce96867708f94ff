#pragma once

// Discretized measure spaces and controlled g-fusion families.
//
// A measure space (X, mu) is a finite list of weighted atoms, so every
// integral over X is an exact weighted sum in ascending atom order.

#include <cmath>
#include <string>
#include <vector>

#include "gfusion/core.hpp"
#include "gfusion/parallel.hpp"

namespace gfusion {

template <typename Real>
struct MeasureAtom {
  std::string id;
  Real weight;          // measure mass of the atom, > 0
  Real frame_weight;    // v(x) >= 0; only its square enters the frame form
  Subspace<Real> subspace;
  Operator<Real> local_operator;  // d x n, always composed with the subspace projection
};

/// Family {(F(x), L_x, v(x))} without controls.
template <typename Real>
struct PlainFamily {
  Eigen::Index dim = 0;
  std::vector<MeasureAtom<Real>> atoms;
};

/// Family {(F(x), L_x, v(x))} with controls: the frame form is
/// sum_i weight_i v_i^2 <L_i P_i right f, L_i P_i left f>.
template <typename Real>
struct ControlledFamily {
  Eigen::Index dim = 0;
  std::vector<MeasureAtom<Real>> atoms;
  Operator<Real> left_control;   // acts on the second slot
  Operator<Real> right_control;  // acts on the first slot
};

using MeasureAtomD = MeasureAtom<double>;
using ControlledFamilyD = ControlledFamily<double>;
using PlainFamilyD = PlainFamily<double>;

template <typename Real>
PlainFamily<Real> strip_controls(const ControlledFamily<Real>& fam) {
  return {fam.dim, fam.atoms};
}

template <typename Real>
ControlledFamily<Real> with_controls(const PlainFamily<Real>& fam, Operator<Real> left,
                                     Operator<Real> right) {
  return {fam.dim, fam.atoms, std::move(left), std::move(right)};
}

template <typename Real>
ControlledFamily<Real> with_controls(const ControlledFamily<Real>& fam, Operator<Real> left,
                                     Operator<Real> right) {
  return {fam.dim, fam.atoms, std::move(left), std::move(right)};
}

/// P L* L P for one atom.
template <typename Real>
Operator<Real> local_gram(const MeasureAtom<Real>& atom) {
  const Operator<Real> p = projection(atom.subspace);
  const Operator<Real> lp = atom.local_operator * p;
  return lp.adjoint() * lp;
}

/// left* P L* L P right for one atom (no weights).
template <typename Real>
Operator<Real> controlled_term(const ControlledFamily<Real>& fam, std::size_t i) {
  return fam.left_control.adjoint() * local_gram(fam.atoms[i]) * fam.right_control;
}

/// sum_i weight_i * per_atom[i] in ascending atom order.
template <typename Real, typename Atoms>
Operator<Real> integrate_atoms(const Atoms& atoms, const std::vector<Operator<Real>>& per_atom) {
  if (per_atom.size() != atoms.size())
    throw DimensionError("integrate: expected " + std::to_string(atoms.size()) +
                         " per-atom values, got " + std::to_string(per_atom.size()));
  if (per_atom.empty()) throw DimensionError("integrate: empty atom list");
  const Eigen::Index r = per_atom.front().rows();
  const Eigen::Index c = per_atom.front().cols();
  Operator<Real> acc = Operator<Real>::Zero(r, c);
  for (std::size_t i = 0; i < per_atom.size(); ++i) {
    if (per_atom[i].rows() != r || per_atom[i].cols() != c)
      throw DimensionError("integrate: per-atom value " + std::to_string(i) + " has shape " +
                           std::to_string(per_atom[i].rows()) + "x" +
                           std::to_string(per_atom[i].cols()));
    acc += atoms[i].weight * per_atom[i];
  }
  return acc;
}

template <typename Real>
Operator<Real> integrate(const ControlledFamily<Real>& fam,
                         const std::vector<Operator<Real>>& per_atom) {
  return integrate_atoms<Real>(fam.atoms, per_atom);
}

/// sum_i weight_i v_i^2, the total frame mass.
template <typename Real>
Real total_v2(const std::vector<MeasureAtom<Real>>& atoms) {
  Real acc(0);
  for (const auto& a : atoms) acc += a.weight * a.frame_weight * a.frame_weight;
  return acc;
}

template <typename Real>
struct FamilyDiagnostics {
  bool valid = true;
  std::vector<std::string> failures;
  Real commutation_defect = Real(0);  // ||TU - UT||, informative
};

namespace detail {

template <typename Real>
void check_control(const Operator<Real>& c, Eigen::Index n, const char* name,
                   const Tolerances& tol, std::vector<std::string>& failures) {
  if (c.rows() != n || c.cols() != n) {
    failures.push_back(std::string(name) + " control has shape " + std::to_string(c.rows()) +
                       "x" + std::to_string(c.cols()) + ", expected " + std::to_string(n) + "x" +
                       std::to_string(n));
    return;
  }
  if (!c.allFinite()) {
    failures.push_back(std::string(name) + " control has non-finite entries");
    return;
  }
  if (!is_positive(c, tol.pd)) failures.push_back(std::string(name) + " control is not positive");
  const Real norm = operator_norm(c);
  if (!(norm > Real(0)) || !(smallest_singular_value(c) > Real(tol.sing) * norm))
    failures.push_back(std::string(name) + " control is not invertible");
}

}  // namespace detail

/// Structural checks on a family. Never throws on a bad family.
template <typename Real>
FamilyDiagnostics<Real> diagnose(const ControlledFamily<Real>& fam, const Tolerances& tol = {}) {
  FamilyDiagnostics<Real> d;
  auto& f = d.failures;
  if (fam.dim < 1 || fam.dim > kMaxDimension) f.push_back("dimension out of range");
  if (fam.atoms.empty()) f.push_back("atom list is empty");
  detail::check_control(fam.left_control, fam.dim, "left (T)", tol, f);
  detail::check_control(fam.right_control, fam.dim, "right (U)", tol, f);
  for (std::size_t i = 0; i < fam.atoms.size(); ++i) {
    const auto& a = fam.atoms[i];
    const std::string tag = "atom " + std::to_string(i) + " ('" + a.id + "')";
    if (!(a.weight > Real(0)) || !std::isfinite(double(a.weight)))
      f.push_back(tag + ": weight must be positive and finite");
    if (!(a.frame_weight >= Real(0)) || !std::isfinite(double(a.frame_weight)))
      f.push_back(tag + ": frame weight must be nonnegative and finite");
    if (a.subspace.ambient_dim() != fam.dim) f.push_back(tag + ": subspace ambient dimension");
    else {
      const auto& b = a.subspace.basis();
      const Real defect =
          (b.adjoint() * b - Operator<Real>::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff();
      if (!(defect <= Real(tol.orth))) f.push_back(tag + ": subspace basis not orthonormal");
    }
    if (a.local_operator.cols() != fam.dim || a.local_operator.rows() < 1)
      f.push_back(tag + ": local operator must be d x " + std::to_string(fam.dim) + " with d >= 1");
    else if (!a.local_operator.allFinite())
      f.push_back(tag + ": local operator has non-finite entries");
  }
  if (fam.left_control.rows() == fam.dim && fam.left_control.cols() == fam.dim &&
      fam.right_control.rows() == fam.dim && fam.right_control.cols() == fam.dim)
    d.commutation_defect = operator_norm(fam.left_control * fam.right_control -
                                         fam.right_control * fam.left_control);
  d.valid = f.empty();
  return d;
}

/// diagnose, throwing ValidationError listing every failure.
template <typename Real>
FamilyDiagnostics<Real> validate(const ControlledFamily<Real>& fam, const Tolerances& tol = {}) {
  auto d = diagnose(fam, tol);
  if (!d.valid) throw ValidationError(d.failures);
  return d;
}

enum class ExampleReading { literal, consistent };

/// The three-atom family on R^3 with controls diag(2,3,5) and diag(1/2,1/3,1/4).
/// The literal reading uses the printed subspaces W_1 = span{e2,e3}, W_2 =
/// span{e1,e3}, W_3 = span{e1,e2}; the consistent reading uses span{e_k}.
template <typename Real = double>
ControlledFamily<Real> paper_example(Real mu1, Real mu2, Real mu3,
                                     ExampleReading reading = ExampleReading::consistent) {
  if (!(mu1 >= mu2 && mu2 >= mu3 && mu3 > Real(1)))
    throw PreconditionError("paper_example: weights must satisfy mu1 >= mu2 >= mu3 > 1");
  const Real mus[3] = {mu1, mu2, mu3};
  const Real vs[3] = {Real(1), Real(2), Real(1)};  // |(1, 2, -1)|
  ControlledFamily<Real> fam;
  fam.dim = 3;
  for (Eigen::Index k = 0; k < 3; ++k) {
    Operator<Real> local = Operator<Real>::Zero(3, 3);
    local(k, k) = Real(1) / std::sqrt(mus[k]);
    Subspace<Real> sub = Subspace<Real>::coordinate(3, {k});
    if (reading == ExampleReading::literal) {
      const Eigen::Index a = (k + 1) % 3, b = (k + 2) % 3;
      sub = Subspace<Real>::coordinate(3, {std::min(a, b), std::max(a, b)});
    }
    fam.atoms.push_back({"B" + std::to_string(k + 1), mus[k], vs[k], std::move(sub), local});
  }
  Operator<Real> t = Operator<Real>::Zero(3, 3);
  Operator<Real> u = Operator<Real>::Zero(3, 3);
  t.diagonal() << Real(2), Real(3), Real(5);
  u.diagonal() << Real(1) / Real(2), Real(1) / Real(3), Real(1) / Real(4);
  fam.left_control = t;
  fam.right_control = u;
  return fam;
}

/// Symbol m on the atoms, m(x_i) = values[i].
template <typename Real>
struct WeightSymbol {
  std::vector<Complex<Real>> values;

  Real sup_norm() const {
    Real s(0);
    for (const auto& x : values) s = std::max(s, std::abs(x));
    return s;
  }
  bool is_real() const {
    for (const auto& x : values)
      if (x.imag() != Real(0)) return false;
    return true;
  }
  static WeightSymbol constant(std::size_t count, Complex<Real> value) {
    return {std::vector<Complex<Real>>(count, value)};
  }
};

enum class FrameVerdict { frame, bessel_only, not_bessel_diagnostic };

inline const char* to_string(FrameVerdict v) {
  switch (v) {
    case FrameVerdict::frame: return "frame";
    case FrameVerdict::bessel_only: return "bessel-only";
    case FrameVerdict::not_bessel_diagnostic: return "not-bessel-diagnostic";
  }
  return "?";
}

template <typename Real>
struct FrameReport {
  FrameVerdict verdict = FrameVerdict::not_bessel_diagnostic;
  Real lower = Real(0);  // A_opt
  Real upper = Real(0);  // B_opt
  Real herm_defect = Real(0);
  std::vector<std::string> notes;

  bool is_frame() const { return verdict == FrameVerdict::frame; }
};

}  // namespace gfusion
