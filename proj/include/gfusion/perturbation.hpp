#pragma once

// Stability of the frame property under perturbation of the local data.

#include <optional>
#include <string>
#include <vector>

#include "gfusion/frame.hpp"
#include "gfusion/sampling.hpp"

namespace gfusion {

/// eps is the additive perturbation constant (distinct from the measure).
struct PerturbationParams {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double eps = 0.0;
};

template <typename Real>
struct AtomPerturbation {
  std::string id;
  Real h_min;           // lambda_min of the Hermitian part of T*(dG - dF)U
  Real h_max;           // lambda_max, the per-atom sup of h_i(f) over unit f
  Real domination_min;  // lambda_min of lambda1 F + lambda2 G + eps I - H (theorem) or D I - H (corollary)
  bool ok;
};

template <typename Real>
struct PerturbationReport {
  std::vector<AtomPerturbation<Real>> atoms;
  bool hypothesis_met = false;
  std::size_t samples = 0;
  std::size_t sample_violations = 0;
  std::optional<std::string> first_violation;
  Real total_v2 = Real(0);
  Real lam_lower = Real(0), lam_upper = Real(0);
  Real minimal_d = Real(0);  // max_i h_max
  bool applicable = false;
  Real certified_lower = Real(0), certified_upper = Real(0);
  FrameReport<Real> gam;
  bool contained = false;

  bool certified() const { return applicable && contained; }
};

namespace detail {

template <typename Real>
struct PerturbationSetup {
  FrameReport<Real> lam;
  FrameReport<Real> gam;
  Real total_v2;
  std::vector<Operator<Real>> f_terms;  // Hermitian parts of T* P L* L P U
  std::vector<Operator<Real>> g_terms;
};

template <typename Real>
PerturbationSetup<Real> perturbation_setup(const ControlledFamily<Real>& lam,
                                           const ControlledFamily<Real>& gam,
                                           const Tolerances& tol, const char* what) {
  validate(lam, tol);
  validate(gam, tol);
  require_aligned(lam, gam, what);
  const Real scale = std::max(Real(1), operator_norm(lam.left_control) + operator_norm(lam.right_control));
  if (operator_norm(lam.left_control - gam.left_control) > Real(tol.comm) * scale ||
      operator_norm(lam.right_control - gam.right_control) > Real(tol.comm) * scale)
    throw PairingError(std::string(what) + ": perturbed family must share the controls (T, U)");
  for (std::size_t i = 0; i < lam.atoms.size(); ++i)
    if (lam.atoms[i].frame_weight != gam.atoms[i].frame_weight)
      throw PairingError(std::string(what) + ": atom " + std::to_string(i) +
                         " has a different frame weight in the perturbed family");
  PerturbationSetup<Real> s;
  s.lam = bounds_of(frame_operator(lam, tol), tol);
  if (!s.lam.is_frame()) throw NotAFrameError(std::string(what) + ": unperturbed family is not a frame");
  s.gam = bounds_of(frame_operator(gam, tol), tol);
  s.total_v2 = total_v2(lam.atoms);
  for (std::size_t i = 0; i < lam.atoms.size(); ++i) {
    s.f_terms.push_back(hermitian_part(controlled_term(lam, i)));
    s.g_terms.push_back(hermitian_part(controlled_term(gam, i)));
  }
  return s;
}

template <typename Real>
void finish(PerturbationReport<Real>& r, const PerturbationSetup<Real>& s) {
  r.lam_lower = s.lam.lower;
  r.lam_upper = s.lam.upper;
  r.total_v2 = s.total_v2;
  r.gam = s.gam;
  r.hypothesis_met = true;
  for (const auto& a : r.atoms) {
    r.hypothesis_met = r.hypothesis_met && a.ok;
    r.minimal_d = std::max(r.minimal_d, a.h_max);
  }
}

}  // namespace detail

/// Per-atom hypothesis 0 <= h_i <= lambda1 a_i + lambda2 g_i + eps ||f||^2,
/// checked as PSD orderings (exact) and on random unit vectors (diagnostic).
/// When it holds and A(1 - lambda1) - eps tv2 > 0 the perturbed family is a
/// frame with bounds [((1 - lambda1) A - eps tv2) / (1 + lambda2),
/// ((1 + lambda1) B + eps tv2) / (1 - lambda2)].
template <typename Real>
PerturbationReport<Real> perturb_check(const ControlledFamily<Real>& lam,
                                       const ControlledFamily<Real>& gam,
                                       const PerturbationParams& p, const Tolerances& tol = {},
                                       const Sampling& sampling = {}) {
  if (!(p.lambda1 >= 0 && p.lambda1 < 1 && p.lambda2 >= 0 && p.lambda2 < 1 && p.eps >= 0))
    throw PreconditionError("perturb_check: need 0 <= lambda1, lambda2 < 1 and eps >= 0");
  const auto s = detail::perturbation_setup(lam, gam, tol, "perturb_check");
  const Real l1(p.lambda1), l2(p.lambda2), eps(p.eps);
  const Eigen::Index n = lam.dim;

  PerturbationReport<Real> r;
  for (std::size_t i = 0; i < lam.atoms.size(); ++i) {
    const Operator<Real>& f = s.f_terms[i];
    const Operator<Real>& g = s.g_terms[i];
    const Operator<Real> h = g - f;
    const Operator<Real> dom = l1 * f + l2 * g + eps * identity<Real>(n) - h;
    const Real slack = Real(tol.pd) * std::max(Real(1), operator_norm(f) + operator_norm(g));
    const auto he = hermitian_eigenvalues(h);
    const Real dmin = hermitian_eigenvalues(dom)(0);
    r.atoms.push_back({lam.atoms[i].id, he(0), he(he.size() - 1), dmin,
                       he(0) >= -slack && dmin >= -slack});
  }
  detail::finish(r, s);

  const Real sample_slack = Real(1e-9);
  for (const auto& v : random_unit_vectors<Real>(n, sampling)) {
    for (std::size_t i = 0; i < lam.atoms.size(); ++i) {
      const Real a = inner(Vector<Real>(s.f_terms[i] * v), v).real();
      const Real g = inner(Vector<Real>(s.g_terms[i] * v), v).real();
      const Real h = g - a;
      if (h < -sample_slack || h > l1 * a + l2 * g + eps + sample_slack) {
        if (!r.first_violation)
          r.first_violation = "atom '" + lam.atoms[i].id + "' at sample " + std::to_string(r.samples);
        ++r.sample_violations;
      }
    }
    ++r.samples;
  }

  const Real margin = s.lam.lower * (Real(1) - l1) - eps * s.total_v2;
  r.applicable = r.hypothesis_met && margin > Real(0);
  r.certified_lower = margin / (Real(1) + l2);
  r.certified_upper = ((Real(1) + l1) * s.lam.upper + eps * s.total_v2) / (Real(1) - l2);
  r.contained = r.applicable && s.gam.is_frame() &&
                detail::within(double(r.certified_lower), double(s.gam.lower)) &&
                detail::within(double(s.gam.upper), double(r.certified_upper));
  return r;
}

/// Corollary form: 0 <= h_i(f) <= D ||f||^2 and D tv2 < A give bounds
/// [A - D tv2, B + D tv2].
template <typename Real>
PerturbationReport<Real> perturb_check_simple(const ControlledFamily<Real>& lam,
                                              const ControlledFamily<Real>& gam, double d_bound,
                                              const Tolerances& tol = {},
                                              const Sampling& sampling = {}) {
  if (!(d_bound > 0)) throw PreconditionError("perturb_check_simple: D must be positive");
  const auto s = detail::perturbation_setup(lam, gam, tol, "perturb_check_simple");
  const Real d(d_bound);
  const Eigen::Index n = lam.dim;

  PerturbationReport<Real> r;
  for (std::size_t i = 0; i < lam.atoms.size(); ++i) {
    const Operator<Real> h = s.g_terms[i] - s.f_terms[i];
    const Real slack =
        Real(tol.pd) * std::max(Real(1), operator_norm(s.f_terms[i]) + operator_norm(s.g_terms[i]));
    const auto he = hermitian_eigenvalues(h);
    const Real dmin = d - he(he.size() - 1);
    r.atoms.push_back({lam.atoms[i].id, he(0), he(he.size() - 1), dmin,
                       he(0) >= -slack && dmin >= -slack});
  }
  detail::finish(r, s);

  for (const auto& v : random_unit_vectors<Real>(n, sampling)) {
    for (std::size_t i = 0; i < lam.atoms.size(); ++i) {
      const Real h = inner(Vector<Real>((s.g_terms[i] - s.f_terms[i]) * v), v).real();
      if (h < Real(-1e-9) || h > d + Real(1e-9)) {
        if (!r.first_violation)
          r.first_violation = "atom '" + lam.atoms[i].id + "' at sample " + std::to_string(r.samples);
        ++r.sample_violations;
      }
    }
    ++r.samples;
  }

  r.applicable = r.hypothesis_met && d * s.total_v2 < s.lam.lower;
  r.certified_lower = s.lam.lower - d * s.total_v2;
  r.certified_upper = s.lam.upper + d * s.total_v2;
  r.contained = r.applicable && s.gam.is_frame() &&
                detail::within(double(r.certified_lower), double(s.gam.lower)) &&
                detail::within(double(s.gam.upper), double(r.certified_upper));
  return r;
}

}  // namespace gfusion
