#pragma once

// Resolutions of the identity: families {T_i} with sum_i weight_i T_i = I.

#include <algorithm>
#include <limits>
#include <vector>

#include "gfusion/frame.hpp"
#include "gfusion/sampling.hpp"

namespace gfusion {

template <typename Real>
struct OperatorFamily {
  std::vector<Real> weights;
  std::vector<Operator<Real>> ops;
};

template <typename Real>
struct ResolutionReport {
  bool holds;
  Real residual;  // ||sum_i weight_i T_i - I||
};

/// The weak identity <f, g> = sum_i weight_i <T_i f, g> is tested in its
/// equivalent operator form.
template <typename Real>
ResolutionReport<Real> is_resolution(const OperatorFamily<Real>& fam, double tol_res = 1e-8) {
  if (fam.ops.empty() || fam.ops.size() != fam.weights.size())
    throw DimensionError("is_resolution: weights and operators must be nonempty and aligned");
  const Eigen::Index n = fam.ops.front().rows();
  Operator<Real> acc = Operator<Real>::Zero(n, n);
  for (std::size_t i = 0; i < fam.ops.size(); ++i) {
    if (fam.ops[i].rows() != n || fam.ops[i].cols() != n)
      throw DimensionError("is_resolution: operator " + std::to_string(i) + " has wrong shape");
    if (!(fam.weights[i] > Real(0)))
      throw DimensionError("is_resolution: weights must be positive");
    acc += fam.weights[i] * fam.ops[i];
  }
  const Real residual = operator_norm(acc - identity<Real>(n));
  return {residual <= Real(tol_res), residual};
}

template <typename Real>
struct CanonicalResolutions {
  OperatorFamily<Real> right;  // v_i^2 T* P L* L P U S_C^{-1}
  OperatorFamily<Real> left;   // v_i^2 S_C^{-1} T* P L* L P U
  Real condition;              // cond(S_C)
};

template <typename Real>
CanonicalResolutions<Real> canonical_resolutions(const ControlledFamily<Real>& fam,
                                                 const Tolerances& tol = {}) {
  const Operator<Real> s = frame_operator(fam, tol);
  const auto rep = bounds_of(s, tol);
  if (!rep.is_frame()) throw NotAFrameError("canonical_resolutions: family is not a frame");
  const Operator<Real> s_inv = inverse(s, tol.sing);
  CanonicalResolutions<Real> out;
  out.condition = operator_norm(s) * operator_norm(s_inv);
  for (std::size_t i = 0; i < fam.atoms.size(); ++i) {
    const Real v = fam.atoms[i].frame_weight;
    const Operator<Real> term = (v * v) * controlled_term(fam, i);
    out.right.weights.push_back(fam.atoms[i].weight);
    out.left.weights.push_back(fam.atoms[i].weight);
    out.right.ops.push_back(term * s_inv);
    out.left.ops.push_back(s_inv * term);
  }
  return out;
}

template <typename Real>
struct DualResolutionReport {
  Real resolution_residual;
  bool resolution_holds;
  Real lower;  // A / B^2
  Real upper;  // B / A^2
  Real sample_min, sample_max;
  Real max_imag;  // largest |Im r(f)| over the samples
  std::size_t samples;
  std::size_t violations;

  bool holds() const { return resolution_holds && violations == 0; }
};

/// With T_i = L_i P_i S_C^{-1}: {v_i^2 T* P_i L_i* T_i U} resolves the identity
/// and A/B^2 <= r(f) <= B/A^2 on unit f, r(f) = sum_i weight_i v_i^2 <T_i U f, T_i T f>.
template <typename Real>
DualResolutionReport<Real> dual_resolution_bounds(const ControlledFamily<Real>& fam,
                                                  const Tolerances& tol = {},
                                                  const Sampling& sampling = {}) {
  const Operator<Real> s = frame_operator(fam, tol);
  const auto rep = bounds_of(s, tol);
  if (!rep.is_frame()) throw NotAFrameError("dual_resolution_bounds: family is not a frame");
  const Operator<Real> s_inv = inverse(s, tol.sing);
  if (commutation_defect(s_inv, fam.left_control) > Real(tol.comm) ||
      commutation_defect(s_inv, fam.right_control) > Real(tol.comm))
    throw HypothesisError("dual_resolution_bounds: S_C^{-1} does not commute with T and U");

  std::vector<Operator<Real>> dual_ops, terms;
  for (const auto& a : fam.atoms) {
    const Operator<Real> lp = a.local_operator * projection(a.subspace);
    dual_ops.push_back(lp * s_inv);
    terms.push_back((a.frame_weight * a.frame_weight) *
                    (fam.left_control.adjoint() * lp.adjoint() * dual_ops.back() * fam.right_control));
  }
  DualResolutionReport<Real> r{};
  r.resolution_residual = operator_norm(integrate(fam, terms) - identity<Real>(fam.dim));
  r.resolution_holds = r.resolution_residual <= Real(tol.res);
  r.lower = rep.lower / (rep.upper * rep.upper);
  r.upper = rep.upper / (rep.lower * rep.lower);
  r.sample_min = std::numeric_limits<Real>::infinity();
  r.sample_max = -std::numeric_limits<Real>::infinity();
  const Real slack = Real(1e-9) * std::max(Real(1), r.upper);
  for (const auto& f : random_unit_vectors<Real>(fam.dim, sampling)) {
    const Vector<Real> uf = fam.right_control * f;
    const Vector<Real> tf = fam.left_control * f;
    Complex<Real> acc(0);
    for (std::size_t i = 0; i < fam.atoms.size(); ++i) {
      const auto& a = fam.atoms[i];
      acc += a.weight * a.frame_weight * a.frame_weight *
             inner(Vector<Real>(dual_ops[i] * uf), Vector<Real>(dual_ops[i] * tf));
    }
    r.sample_min = std::min(r.sample_min, acc.real());
    r.sample_max = std::max(r.sample_max, acc.real());
    r.max_imag = std::max(r.max_imag, std::abs(acc.imag()));
    if (acc.real() < r.lower - slack || acc.real() > r.upper + slack) ++r.violations;
    ++r.samples;
  }
  return r;
}

template <typename Real>
struct ResolutionFrameReport {
  Real resolution_residual;
  bool hypothesis_met;
  Real bessel;           // B of the (T,T) family
  Real certified_lower;  // 1 / B
  Real certified_upper;  // B ||T^{-1}||^2 ||U||^2
  Real computed_lower, computed_upper;  // optimal bounds of the (U,U) family
  bool contained;
};

/// A (T,T) Bessel family whose operators {v^2 T* P L* L P U} resolve the
/// identity is a (U,U)-controlled frame with bounds 1/B and B ||T^{-1}||^2 ||U||^2.
template <typename Real, typename Derived>
ResolutionFrameReport<Real> resolution_implies_frame(const ControlledFamily<Real>& fam,
                                                     const Eigen::MatrixBase<Derived>& u_control,
                                                     const Tolerances& tol = {}) {
  validate(fam, tol);
  const Operator<Real>& t = fam.left_control;
  if (operator_norm(t - fam.right_control) > Real(tol.comm) * std::max(Real(1), operator_norm(t)))
    throw PreconditionError("resolution_implies_frame: family must have equal controls (T, T)");
  const Operator<Real> u = u_control.template cast<Complex<Real>>();
  const ControlledFamily<Real> mixed = with_controls(fam, t, u);
  const ControlledFamily<Real> target = with_controls(fam, u, u);
  validate(target, tol);

  OperatorFamily<Real> ops;
  for (std::size_t i = 0; i < fam.atoms.size(); ++i) {
    const Real v = fam.atoms[i].frame_weight;
    ops.weights.push_back(fam.atoms[i].weight);
    ops.ops.push_back((v * v) * controlled_term(mixed, i));
  }
  const auto res = is_resolution(ops, tol.res);
  ResolutionFrameReport<Real> r{};
  r.resolution_residual = res.residual;
  r.hypothesis_met = res.holds;
  r.bessel = spectral_summary(frame_operator(fam, tol)).lambda_max;
  const Real ti = operator_norm(inverse(t, tol.sing));
  const Real un = operator_norm(u);
  r.certified_lower = Real(1) / r.bessel;
  r.certified_upper = r.bessel * ti * ti * un * un;
  const auto computed = spectral_summary(frame_operator(target, tol));
  r.computed_lower = computed.lambda_min;
  r.computed_upper = computed.lambda_max;
  r.contained = detail::within(double(r.certified_lower), double(r.computed_lower)) &&
                detail::within(double(r.computed_upper), double(r.certified_upper));
  return r;
}

}  // namespace gfusion
