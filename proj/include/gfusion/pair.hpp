#pragma once

// Frame operator of a pair of Bessel families and the Bessel multiplier.

#include <limits>
#include <optional>

#include "gfusion/frame.hpp"

namespace gfusion {

/// lam is (T,T)-controlled, gam is (U,U)-controlled, over the same atoms.
template <typename Real>
struct BesselPair {
  ControlledFamily<Real> lam;
  ControlledFamily<Real> gam;

  const Operator<Real>& t() const { return lam.left_control; }
  const Operator<Real>& u() const { return gam.left_control; }
};

using BesselPairD = BesselPair<double>;

template <typename Real>
BesselPair<Real> make_bessel_pair(ControlledFamily<Real> lam, ControlledFamily<Real> gam,
                                  const Tolerances& tol = {}) {
  validate(lam, tol);
  validate(gam, tol);
  detail::require_aligned(lam, gam, "bessel pair");
  auto symmetric = [&](const ControlledFamily<Real>& f) {
    const Real d = operator_norm(f.left_control - f.right_control);
    return d <= Real(tol.comm) * std::max(Real(1), operator_norm(f.left_control));
  };
  if (!symmetric(lam)) throw PairingError("bessel pair: first family must have equal controls (T, T)");
  if (!symmetric(gam)) throw PairingError("bessel pair: second family must have equal controls (U, U)");
  return {std::move(lam), std::move(gam)};
}

template <typename Real>
BesselPair<Real> swapped(const BesselPair<Real>& p) {
  return {p.gam, p.lam};
}

namespace detail {

/// v_i w_i U P_G G_i* L_i P_F T for atom i, before the measure weight.
template <typename Real>
Operator<Real> pair_term(const BesselPair<Real>& p, std::size_t i) {
  const auto& a = p.lam.atoms[i];
  const auto& b = p.gam.atoms[i];
  const Operator<Real> lp = a.local_operator * projection(a.subspace);
  const Operator<Real> gp = b.local_operator * projection(b.subspace);
  if (lp.rows() != gp.rows())
    throw PairingError("pair: atom " + std::to_string(i) +
                       " local operators have different codomain dimensions");
  return (a.frame_weight * b.frame_weight) * (p.u() * gp.adjoint() * lp * p.t());
}

template <typename Real>
Real bessel_bound(const ControlledFamily<Real>& f, const Tolerances& tol) {
  return spectral_summary(frame_operator(f, tol)).lambda_max;
}

}  // namespace detail

/// S = sum_i weight_i v_i w_i U P_{G_i} G_i* L_i P_{F_i} T.
template <typename Real>
Operator<Real> pair_frame_operator(const BesselPair<Real>& p, const Execution& exec = {}) {
  detail::require_aligned(p.lam, p.gam, "pair_frame_operator");
  auto terms = map_atoms(p.lam.atoms.size(), exec,
                         [&](std::size_t i) { return detail::pair_term(p, i); });
  return integrate(p.lam, terms);
}

template <typename Real>
struct PairOperatorReport {
  Operator<Real> op;
  Real norm;
  Real bessel_lam;  // B
  Real bessel_gam;  // D
  Real bound;       // sqrt(B D)
  bool within_bound;
};

template <typename Real>
PairOperatorReport<Real> pair_operator_report(const BesselPair<Real>& p, const Tolerances& tol = {}) {
  PairOperatorReport<Real> r;
  r.op = pair_frame_operator(p);
  r.norm = operator_norm(r.op);
  r.bessel_lam = detail::bessel_bound(p.lam, tol);
  r.bessel_gam = detail::bessel_bound(p.gam, tol);
  r.bound = std::sqrt(r.bessel_lam * r.bessel_gam);
  r.within_bound = r.norm <= r.bound + Real(1e-9);
  return r;
}

template <typename Real>
struct BoundedBelowReport {
  Real sigma_min;
  bool bounded_below;
  Real resolution_residual;  // ||sum_i weight_i T_i - I||, T_i built from K = S^{-1}
  bool resolution_holds;
  Real certified_lower_lam;  // sigma_min^2 / D
  Real computed_lower_lam;
  Real certified_lower_gam;  // sigma_min^2 / B, by symmetry
  Real computed_lower_gam;
  bool certificates_hold;
};

/// Bounded-below test of S and the resolution of the identity built from K = S^{-1}.
template <typename Real>
BoundedBelowReport<Real> pair_bounded_below(const BesselPair<Real>& p, const Tolerances& tol = {}) {
  const Operator<Real> s = pair_frame_operator(p);
  BoundedBelowReport<Real> r{};
  r.sigma_min = smallest_singular_value(s);
  const Real scale = std::max(Real(1), operator_norm(s));
  r.bounded_below = r.sigma_min > Real(tol.sing) * scale;
  const auto rl = bounds_of(frame_operator(p.lam, tol), tol);
  const auto rg = bounds_of(frame_operator(p.gam, tol), tol);
  r.computed_lower_lam = rl.lower;
  r.computed_lower_gam = rg.lower;
  if (!r.bounded_below) {
    r.resolution_residual = std::numeric_limits<Real>::infinity();
    return r;
  }
  const Operator<Real> k = inverse(s, tol.sing);
  std::vector<Operator<Real>> family;
  for (std::size_t i = 0; i < p.lam.atoms.size(); ++i) family.push_back(k * detail::pair_term(p, i));
  r.resolution_residual = operator_norm(integrate(p.lam, family) - identity<Real>(p.lam.dim));
  r.resolution_holds = r.resolution_residual <= Real(tol.res);
  const Real m2 = r.sigma_min * r.sigma_min;
  r.certified_lower_lam = m2 / rg.upper;
  r.certified_lower_gam = m2 / rl.upper;
  r.certificates_hold = detail::within(double(r.certified_lower_lam), double(rl.lower)) &&
                        detail::within(double(r.certified_lower_gam), double(rg.lower));
  return r;
}

template <typename Real>
struct PairSumReport {
  bool hypothesis_met = false;
  std::vector<std::string> unmet;
  Real factorization_residual = Real(0);  // ||(S_LTGU + S_GULT) - U (S_LG + S_GL) T|| / max(1, ||sum||)
  bool factorization_holds = false;
  Real sum_lambda_min = Real(0);
  bool positive = false;
};

/// Positivity of S_{LT,GU} + S_{GU,LT} under the commutation hypotheses.
template <typename Real>
PairSumReport<Real> pair_sum_positivity(const BesselPair<Real>& p, const Tolerances& tol = {}) {
  PairSumReport<Real> r;
  const Eigen::Index n = p.lam.dim;
  const BesselPair<Real> plain{with_controls(p.lam, identity<Real>(n), identity<Real>(n)),
                               with_controls(p.gam, identity<Real>(n), identity<Real>(n))};
  const Operator<Real> s_lg = pair_frame_operator(plain);
  const Operator<Real> plain_sum = s_lg + s_lg.adjoint();
  const Operator<Real>& t = p.t();
  const Operator<Real>& u = p.u();
  if (commutation_defect(t, u) > Real(tol.comm)) r.unmet.push_back("T and U do not commute");
  if (commutation_defect(t, plain_sum) > Real(tol.comm))
    r.unmet.push_back("T does not commute with S_LG + S_GL");
  if (commutation_defect(u, plain_sum) > Real(tol.comm))
    r.unmet.push_back("U does not commute with S_LG + S_GL");
  if (!is_positive(plain_sum, tol.pd * std::max(1.0, double(operator_norm(plain_sum)))))
    r.unmet.push_back("S_LG + S_GL is not positive");
  r.hypothesis_met = r.unmet.empty();

  const Operator<Real> s = pair_frame_operator(p);
  const Operator<Real> sum = s + pair_frame_operator(swapped(p));
  const Real scale = std::max(Real(1), operator_norm(sum));
  r.factorization_residual = operator_norm(sum - u * plain_sum * t) / scale;
  r.factorization_holds = r.factorization_residual <= Real(1e-9);
  r.sum_lambda_min = spectral_summary(sum).lambda_min;
  r.positive = is_positive(sum, tol.pd * double(scale));
  return r;
}

/// M = sum_i weight_i m_i v_i w_i T P_{F_i} L_i* G_i P_{G_i} U.
template <typename Real>
Operator<Real> multiplier(const WeightSymbol<Real>& m, const BesselPair<Real>& p,
                          const Execution& exec = {}) {
  detail::require_aligned(p.lam, p.gam, "multiplier");
  if (m.values.size() != p.lam.atoms.size())
    throw PairingError("multiplier: symbol has " + std::to_string(m.values.size()) +
                       " values, pair has " + std::to_string(p.lam.atoms.size()) + " atoms");
  const BesselPair<Real> q = swapped(p);
  auto terms = map_atoms(p.lam.atoms.size(), exec, [&](std::size_t i) -> Operator<Real> {
    return m.values[i] * detail::pair_term(q, i);
  });
  return integrate(p.lam, terms);
}

template <typename Real>
struct MultiplierCriterionReport {
  Real norm;
  Real norm_bound;  // ||m||_inf sqrt(B D)
  bool within_norm_bound;
  Real lambda_star;  // ||I - M||
  bool applicable;   // lambda_star < 1
  std::optional<Real> claimed_lambda;
  bool claimed_valid = false;  // lambda_star <= claimed < 1
  Real certified_lower_gam = Real(0);  // (1 - lambda)^2 / (B ||m||^2)
  Real certified_lower_lam = Real(0);  // (1 - lambda)^2 / (D ||m||^2), by symmetry
  Real computed_lower_gam, computed_lower_lam;
  bool both_frames = false;
  bool certificates_hold = false;
};

template <typename Real>
MultiplierCriterionReport<Real> multiplier_frame_criterion(const WeightSymbol<Real>& m,
                                                           const BesselPair<Real>& p,
                                                           std::optional<Real> claimed = {},
                                                           const Tolerances& tol = {}) {
  const Operator<Real> mm = multiplier(m, p);
  const auto rl = bounds_of(frame_operator(p.lam, tol), tol);
  const auto rg = bounds_of(frame_operator(p.gam, tol), tol);
  MultiplierCriterionReport<Real> r{};
  const Real sup = m.sup_norm();
  r.norm = operator_norm(mm);
  r.norm_bound = sup * std::sqrt(rl.upper * rg.upper);
  r.within_norm_bound = r.norm <= r.norm_bound + Real(1e-9);
  r.lambda_star = operator_norm(identity<Real>(p.lam.dim) - mm);
  r.applicable = r.lambda_star < Real(1) && sup > Real(0);
  r.claimed_lambda = claimed;
  if (claimed) r.claimed_valid = r.lambda_star <= *claimed && *claimed < Real(1);
  r.computed_lower_gam = rg.lower;
  r.computed_lower_lam = rl.lower;
  if (!r.applicable) return r;
  const Real gap = (Real(1) - r.lambda_star) * (Real(1) - r.lambda_star);
  r.certified_lower_gam = gap / (rl.upper * sup * sup);
  r.certified_lower_lam = gap / (rg.upper * sup * sup);
  r.both_frames = rl.is_frame() && rg.is_frame();
  r.certificates_hold = r.both_frames &&
                        detail::within(double(r.certified_lower_gam), double(rg.lower)) &&
                        detail::within(double(r.certified_lower_lam), double(rl.lower));
  return r;
}

}  // namespace gfusion
