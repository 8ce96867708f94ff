#pragma once

// Family specification documents (JSON) for double-precision families.
//
//   { "dim": n,
//     "controls": {"T": matrix, "U": matrix},
//     "atoms": [ {"id": str, "weight": num, "v": num,
//                 "subspace": [vector, ...], "lambda": matrix}, ... ],
//     "m": [num, ...] }                        (optional)
//
// Matrices are lists of rows. A complex entry is [re, im]; a real entry is
// a plain number. Subspace vectors are the basis columns and must already be
// orthonormal. Unknown keys are rejected.

#include <optional>
#include <string>

#include "json.hpp"

#include "gfusion/family.hpp"

namespace gfusion::io {

using Json = nlohmann::ordered_json;

/// Malformed document; the message names the offending key or atom.
class ParseError : public Error {
 public:
  using Error::Error;
};

struct FamilyDocument {
  ControlledFamilyD family;
  std::optional<WeightSymbol<double>> m;
};

Json encode_scalar(std::complex<double> z);
Json encode_matrix(const OperatorD& a);
Json encode_vector(const VectorD& v);

FamilyDocument parse_family(const Json& doc, const Tolerances& tol = {});
FamilyDocument parse_family_text(const std::string& text, const Tolerances& tol = {});
FamilyDocument load_family(const std::string& path, const Tolerances& tol = {});

Json emit_family(const ControlledFamilyD& fam, const std::optional<WeightSymbol<double>>& m = {});
std::string emit_family_text(const ControlledFamilyD& fam,
                             const std::optional<WeightSymbol<double>>& m = {});

}  // namespace gfusion::io
