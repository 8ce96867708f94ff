#pragma once

// Random instance generators shared by the unit tests and the acceptance run.
//
// block-ratio:  coordinates split into groups; T, U diagonal with U = c_g T on
//               group g; every atom lives inside one group. S_C is Hermitian
//               and each T* Q U is positive.
// block-scalar: as above with T, U constant on each group, so T and U commute
//               with every block-diagonal operator (S_gF, S_C, S_C^{-1}).
// diagonal:     coordinate subspaces, local operators with rows c e_k^T,
//               diagonal controls. Everything commutes.
// pair:         (T,T) and (U,U) families with random SPD controls and
//               unstructured atoms.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "gfusion/gfusion.hpp"

namespace gfusion::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline int uniform_int(Rng& rng, int a, int b) {
  return std::uniform_int_distribution<int>(a, b)(rng);
}

inline OperatorD random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  OperatorD a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = {normal(rng), normal(rng)};
  return a;
}

inline VectorD random_vector(Rng& rng, Eigen::Index n) { return random_complex(rng, n, 1).col(0); }

inline OperatorD random_unitary(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<OperatorD> qr(random_complex(rng, n, n));
  return qr.householderQ() * OperatorD::Identity(n, n);
}

/// Q diag(eigs) Q* with eigenvalues uniform in [lo, hi].
inline OperatorD random_spd(Rng& rng, Eigen::Index n, double lo, double hi) {
  const OperatorD q = random_unitary(rng, n);
  Eigen::VectorXd ev(n);
  for (Eigen::Index i = 0; i < n; ++i) ev(i) = uniform(rng, lo, hi);
  OperatorD a = q * ev.cast<std::complex<double>>().asDiagonal() * q.adjoint();
  return (a + a.adjoint()) / 2.0;
}

inline OperatorD random_hermitian(Rng& rng, Eigen::Index n) {
  const OperatorD a = random_complex(rng, n, n);
  return (a + a.adjoint()) / 2.0;
}

inline SubspaceD random_subspace(Rng& rng, Eigen::Index n, Eigen::Index r) {
  return SubspaceD::span(random_complex(rng, n, r));
}

inline OperatorD diag(std::initializer_list<double> d) {
  OperatorD a = OperatorD::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) a(i, i) = x, ++i;
  return a;
}

inline OperatorD diag(const Eigen::VectorXd& d) { return d.cast<std::complex<double>>().asDiagonal(); }

/// Single full-space atom with L = I: S_C = T U.
inline ControlledFamilyD identity_family(Eigen::Index n) {
  ControlledFamilyD f;
  f.dim = n;
  f.atoms.push_back({"a0", 1.0, 1.0, SubspaceD::full(n), OperatorD::Identity(n, n)});
  f.left_control = OperatorD::Identity(n, n);
  f.right_control = OperatorD::Identity(n, n);
  return f;
}

/// Parseval family on C^n: n coordinate atoms with unit weights.
inline ControlledFamilyD coordinate_parseval(Eigen::Index n) {
  ControlledFamilyD f;
  f.dim = n;
  for (Eigen::Index k = 0; k < n; ++k) {
    OperatorD l = OperatorD::Zero(1, n);
    l(0, k) = 1.0;
    f.atoms.push_back({"e" + std::to_string(k), 1.0, 1.0, SubspaceD::coordinate(n, {k}), l});
  }
  f.left_control = OperatorD::Identity(n, n);
  f.right_control = OperatorD::Identity(n, n);
  return f;
}

struct InstanceShape {
  int max_dim = 16;
  int max_atoms = 20;
};

namespace detail {

inline std::vector<std::vector<Eigen::Index>> random_groups(Rng& rng, Eigen::Index n, int count) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index(0));
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<Eigen::Index> cuts;
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n - 1));
  std::iota(pool.begin(), pool.end(), Eigen::Index(1));
  std::shuffle(pool.begin(), pool.end(), rng);
  cuts.assign(pool.begin(), pool.begin() + (count - 1));
  cuts.push_back(0);
  cuts.push_back(n);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::vector<Eigen::Index>> groups;
  for (std::size_t g = 0; g + 1 < cuts.size(); ++g) {
    std::vector<Eigen::Index> members(idx.begin() + cuts[g], idx.begin() + cuts[g + 1]);
    std::sort(members.begin(), members.end());
    groups.push_back(std::move(members));
  }
  return groups;
}

/// Atom supported on the coordinates of one group. full = whole group subspace
/// and a square local operator on it.
inline MeasureAtomD group_atom(Rng& rng, Eigen::Index n, const std::vector<Eigen::Index>& group,
                               bool full, const std::string& id) {
  const auto s = static_cast<Eigen::Index>(group.size());
  const Eigen::Index r = full ? s : uniform_int(rng, 1, static_cast<int>(s));
  const Eigen::Index d = full ? s : uniform_int(rng, 1, 3);
  OperatorD local_basis = full ? OperatorD::Identity(s, s) : random_complex(rng, s, r);
  OperatorD basis = OperatorD::Zero(n, local_basis.cols());
  for (Eigen::Index k = 0; k < s; ++k) basis.row(group[k]) = local_basis.row(k);
  OperatorD lambda = OperatorD::Zero(d, n);
  const OperatorD block = random_complex(rng, d, s);
  for (Eigen::Index k = 0; k < s; ++k) lambda.col(group[k]) = block.col(k);
  return {id, uniform(rng, 0.2, 2.0), uniform(rng, 0.3, 1.5), SubspaceD::span(basis), lambda};
}

inline ControlledFamilyD grouped_family(Rng& rng, const InstanceShape& shape, bool scalar_controls) {
  const Eigen::Index n = uniform_int(rng, 1, shape.max_dim);
  const int groups = uniform_int(rng, 1, static_cast<int>(std::min<Eigen::Index>(n, 4)));
  const int atoms = uniform_int(rng, groups, shape.max_atoms);
  const auto layout = random_groups(rng, n, groups);
  ControlledFamilyD f;
  f.dim = n;
  for (int i = 0; i < atoms; ++i) {
    const bool full = i < groups;
    const auto& g = layout[static_cast<std::size_t>(full ? i : uniform_int(rng, 0, groups - 1))];
    f.atoms.push_back(group_atom(rng, n, g, full, "x" + std::to_string(i)));
  }
  std::shuffle(f.atoms.begin(), f.atoms.end(), rng);
  Eigen::VectorXd t(n), u(n);
  for (const auto& g : layout) {
    const double ratio = uniform(rng, 0.5, 2.0);
    const double tg = uniform(rng, 0.5, 2.0);
    for (auto k : g) {
      t(k) = scalar_controls ? tg : uniform(rng, 0.5, 2.0);
      u(k) = ratio * t(k);
    }
  }
  f.left_control = diag(t);
  f.right_control = diag(u);
  return f;
}

template <typename Make>
ControlledFamilyD regenerate_until_frame(Rng& rng, Make make, double min_lower = 1e-3) {
  for (;;) {
    ControlledFamilyD f = make(rng);
    const auto r = optimal_bounds(f);
    if (r.is_frame() && r.lower > min_lower) return f;
  }
}

}  // namespace detail

inline ControlledFamilyD block_ratio_frame(Rng& rng, InstanceShape shape = {}) {
  return detail::regenerate_until_frame(rng, [&](Rng& r) { return detail::grouped_family(r, shape, false); });
}

inline ControlledFamilyD block_scalar_frame(Rng& rng, InstanceShape shape = {}) {
  return detail::regenerate_until_frame(rng, [&](Rng& r) { return detail::grouped_family(r, shape, true); });
}

inline ControlledFamilyD diagonal_frame(Rng& rng, InstanceShape shape = {}) {
  return detail::regenerate_until_frame(rng, [&](Rng& r) {
    const Eigen::Index n = uniform_int(r, 1, shape.max_dim);
    const int atoms = uniform_int(r, 1, shape.max_atoms);
    ControlledFamilyD f;
    f.dim = n;
    for (int i = 0; i < atoms; ++i) {
      std::vector<Eigen::Index> coords;
      for (Eigen::Index k = 0; k < n; ++k)
        if (i == 0 || uniform(r, 0, 1) < 0.5) coords.push_back(k);
      if (coords.empty()) coords.push_back(uniform_int(r, 0, static_cast<int>(n - 1)));
      const Eigen::Index d = i == 0 ? n : uniform_int(r, 1, 3);
      OperatorD lambda = OperatorD::Zero(d, n);
      for (Eigen::Index row = 0; row < d; ++row) {
        const Eigen::Index k = i == 0 ? row : uniform_int(r, 0, static_cast<int>(n - 1));
        lambda(row, k) = uniform(r, 0.5, 1.5);
      }
      f.atoms.push_back({"d" + std::to_string(i), uniform(r, 0.2, 2.0), uniform(r, 0.3, 1.5),
                         SubspaceD::coordinate(n, coords), lambda});
    }
    Eigen::VectorXd t(n), u(n);
    for (Eigen::Index k = 0; k < n; ++k) t(k) = uniform(r, 0.5, 2.0), u(k) = uniform(r, 0.5, 2.0);
    f.left_control = diag(t);
    f.right_control = diag(u);
    return f;
  });
}

/// (T,T) and (U,U) families over the same measure atoms and codomain dimensions.
inline BesselPairD random_pair(Rng& rng, InstanceShape shape = {}) {
  const Eigen::Index n = uniform_int(rng, 1, shape.max_dim);
  const int atoms = uniform_int(rng, 1, shape.max_atoms);
  ControlledFamilyD lam, gam;
  lam.dim = gam.dim = n;
  for (int i = 0; i < atoms; ++i) {
    const double weight = uniform(rng, 0.2, 2.0);
    const Eigen::Index d = uniform_int(rng, 1, 3);
    const std::string id = "p" + std::to_string(i);
    lam.atoms.push_back({id, weight, uniform(rng, 0.3, 1.5),
                         random_subspace(rng, n, uniform_int(rng, 1, static_cast<int>(n))),
                         random_complex(rng, d, n)});
    gam.atoms.push_back({id, weight, uniform(rng, 0.3, 1.5),
                         random_subspace(rng, n, uniform_int(rng, 1, static_cast<int>(n))),
                         random_complex(rng, d, n)});
  }
  const OperatorD t = random_spd(rng, n, 0.5, 2.0);
  const OperatorD u = random_spd(rng, n, 0.5, 2.0);
  lam.left_control = lam.right_control = t;
  gam.left_control = gam.right_control = u;
  return make_bessel_pair(std::move(lam), std::move(gam));
}

/// Copy of fam with every local operator scaled by sqrt(1 + delta).
inline ControlledFamilyD scaled(const ControlledFamilyD& fam, double delta) {
  ControlledFamilyD g = fam;
  for (auto& a : g.atoms) a.local_operator *= std::sqrt(1.0 + delta);
  return g;
}

}  // namespace gfusion::testing
