#pragma once

#include <cstdint>
#include <cstddef>

namespace gfusion {

/// Numerical thresholds shared by all checks. Defaults are tuned for
/// double precision at dimensions up to kMaxDimension.
struct Tolerances {
  double herm = 1e-8;    // relative Hermiticity defect
  double pd = 1e-10;     // absolute positivity slack
  double sing = 1e-12;   // singularity threshold, relative to the operator norm
  double orth = 1e-10;   // orthonormality of subspace bases
  double frame = 1e-10;  // lower bound must exceed this for a frame verdict
  double comm = 1e-8;    // relative commutation defect
  double res = 1e-8;     // resolution-of-the-identity residual
  double dual = 1e-8;    // cross-duality residual
};

/// Unit-sphere sampling used by the inequality sandwiches.
struct Sampling {
  std::size_t count = 1000;
  std::uint64_t seed = 20240611;
};

/// Per-atom work may run on several threads; the reduction is always
/// performed in ascending atom order, so results do not depend on this flag.
struct Execution {
  bool parallel = false;
};

inline constexpr long kMaxDimension = 512;

}  // namespace gfusion
