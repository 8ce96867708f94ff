#pragma once

#include <random>
#include <vector>

#include "gfusion/core.hpp"

namespace gfusion {

/// Unit vectors drawn uniformly from the complex sphere in C^n. Deterministic
/// for a given seed.
template <typename Real = double>
std::vector<Vector<Real>> random_unit_vectors(Eigen::Index n, const Sampling& s) {
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector<Real>> out;
  out.reserve(s.count);
  while (out.size() < s.count) {
    Vector<Real> f(n);
    for (Eigen::Index i = 0; i < n; ++i) f(i) = Complex<Real>(Real(normal(rng)), Real(normal(rng)));
    const Real norm = f.norm();
    if (norm > Real(0)) out.push_back(f / norm);
  }
  return out;
}

}  // namespace gfusion
