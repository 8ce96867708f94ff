#include "gfusion/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gfusion::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
}

const Json& require_key(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
  return *it;
}

double real_number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(where, "number is not finite");
  return x;
}

std::complex<double> scalar(const Json& j, const std::string& where) {
  if (j.is_number()) return {real_number(j, where), 0.0};
  if (j.is_array() && j.size() == 2)
    return {real_number(j[0], where + "[0]"), real_number(j[1], where + "[1]")};
  fail(where, "expected a number or [re, im]");
}

VectorD vector(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty list of entries");
  VectorD v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = scalar(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

OperatorD matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty list of rows");
  std::size_t cols = 0;
  OperatorD a;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    const VectorD row = vector(j[r], row_where);
    if (r == 0) {
      cols = static_cast<std::size_t>(row.size());
      a.resize(static_cast<Eigen::Index>(j.size()), row.size());
    } else if (static_cast<std::size_t>(row.size()) != cols) {
      fail(row_where, "row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(cols));
    }
    a.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return a;
}

MeasureAtomD atom(const Json& j, std::size_t index, Eigen::Index dim, const Tolerances& tol) {
  std::string where = "atoms[" + std::to_string(index) + "]";
  if (!j.is_object()) fail(where, "expected an object");
  reject_unknown(j, {"id", "weight", "v", "subspace", "lambda"}, where);
  const Json& id = require_key(j, "id", where);
  if (!id.is_string()) fail(where + ".id", "expected a string");
  MeasureAtomD a{id.get<std::string>(), 0.0, 0.0, SubspaceD::full(dim), OperatorD()};
  where += " ('" + a.id + "')";
  a.weight = real_number(require_key(j, "weight", where), where + ".weight");
  if (!(a.weight > 0)) fail(where + ".weight", "must be positive");
  a.frame_weight = real_number(require_key(j, "v", where), where + ".v");
  if (!(a.frame_weight >= 0)) fail(where + ".v", "must be nonnegative");

  const Json& sub = require_key(j, "subspace", where);
  if (!sub.is_array() || sub.empty()) fail(where + ".subspace", "expected a nonempty list of vectors");
  OperatorD basis(dim, static_cast<Eigen::Index>(sub.size()));
  for (std::size_t c = 0; c < sub.size(); ++c) {
    const std::string cw = where + ".subspace[" + std::to_string(c) + "]";
    const VectorD col = vector(sub[c], cw);
    if (col.size() != dim) fail(cw, "vector has length " + std::to_string(col.size()) + ", expected " +
                                        std::to_string(dim));
    basis.col(static_cast<Eigen::Index>(c)) = col;
  }
  try {
    a.subspace = SubspaceD(std::move(basis), tol.orth);
  } catch (const DimensionError& e) {
    fail(where + ".subspace", e.what());
  } catch (const PreconditionError& e) {
    fail(where + ".subspace", e.what());
  }

  a.local_operator = matrix(require_key(j, "lambda", where), where + ".lambda");
  if (a.local_operator.cols() != dim)
    fail(where + ".lambda", "has " + std::to_string(a.local_operator.cols()) + " columns, expected " +
                                std::to_string(dim));
  return a;
}

}  // namespace

Json encode_scalar(std::complex<double> z) {
  if (z.imag() == 0.0 && !std::signbit(z.imag())) return Json(z.real());
  return Json::array({z.real(), z.imag()});
}

Json encode_vector(const VectorD& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode_scalar(v(i)));
  return out;
}

Json encode_matrix(const OperatorD& a) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) out.push_back(encode_vector(a.row(r).transpose()));
  return out;
}

FamilyDocument parse_family(const Json& doc, const Tolerances& tol) {
  if (!doc.is_object()) fail("document", "expected an object");
  reject_unknown(doc, {"dim", "controls", "atoms", "m"}, "document");
  const Json& dim_j = require_key(doc, "dim", "document");
  if (!dim_j.is_number_integer()) fail("dim", "expected an integer");
  const auto dim = dim_j.get<long long>();
  if (dim < 1 || dim > kMaxDimension)
    fail("dim", "must lie in [1, " + std::to_string(kMaxDimension) + "]");
  const auto n = static_cast<Eigen::Index>(dim);

  FamilyDocument out;
  out.family.dim = n;
  out.family.left_control = identity<double>(n);
  out.family.right_control = identity<double>(n);
  if (auto it = doc.find("controls"); it != doc.end()) {
    if (!it->is_object()) fail("controls", "expected an object");
    reject_unknown(*it, {"T", "U"}, "controls");
    if (auto t = it->find("T"); t != it->end()) out.family.left_control = matrix(*t, "controls.T");
    if (auto u = it->find("U"); u != it->end()) out.family.right_control = matrix(*u, "controls.U");
  }

  const Json& atoms = require_key(doc, "atoms", "document");
  if (!atoms.is_array() || atoms.empty()) fail("atoms", "expected a nonempty list");
  for (std::size_t i = 0; i < atoms.size(); ++i) out.family.atoms.push_back(atom(atoms[i], i, n, tol));

  if (auto it = doc.find("m"); it != doc.end()) {
    if (!it->is_array()) fail("m", "expected a list");
    if (it->size() != out.family.atoms.size())
      fail("m", "has " + std::to_string(it->size()) + " values, expected one per atom (" +
                    std::to_string(out.family.atoms.size()) + ")");
    WeightSymbol<double> m;
    for (std::size_t i = 0; i < it->size(); ++i)
      m.values.push_back(scalar((*it)[i], "m[" + std::to_string(i) + "]"));
    out.m = std::move(m);
  }
  validate(out.family, tol);
  return out;
}

FamilyDocument parse_family_text(const std::string& text, const Tolerances& tol) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_family(doc, tol);
}

FamilyDocument load_family(const std::string& path, const Tolerances& tol) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_family_text(ss.str(), tol);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Json emit_family(const ControlledFamilyD& fam, const std::optional<WeightSymbol<double>>& m) {
  Json doc;
  doc["dim"] = fam.dim;
  doc["controls"]["T"] = encode_matrix(fam.left_control);
  doc["controls"]["U"] = encode_matrix(fam.right_control);
  doc["atoms"] = Json::array();
  for (const auto& a : fam.atoms) {
    Json j;
    j["id"] = a.id;
    j["weight"] = a.weight;
    j["v"] = a.frame_weight;
    j["subspace"] = Json::array();
    for (Eigen::Index c = 0; c < a.subspace.dim(); ++c)
      j["subspace"].push_back(encode_vector(a.subspace.basis().col(c)));
    j["lambda"] = encode_matrix(a.local_operator);
    doc["atoms"].push_back(std::move(j));
  }
  if (m) {
    doc["m"] = Json::array();
    for (const auto& x : m->values) doc["m"].push_back(encode_scalar(x));
  }
  return doc;
}

std::string emit_family_text(const ControlledFamilyD& fam,
                             const std::optional<WeightSymbol<double>>& m) {
  return emit_family(fam, m).dump(2) + "\n";
}

}  // namespace gfusion::io
