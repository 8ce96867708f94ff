#pragma once

#include <iosfwd>

namespace gfusion::cli {

inline constexpr const char* kName = "gfusion";
inline constexpr const char* kVersion = "0.1.0";

/// Exit statuses. Affirmative and negative verdicts are never conflated with errors.
enum Status : int { kAffirmative = 0, kError = 1, kNegative = 2 };

/// Runs one command line. Reports go to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gfusion::cli
