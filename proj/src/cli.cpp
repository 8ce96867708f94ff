#include "gfusion/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gfusion/gfusion.hpp"
#include "gfusion/io.hpp"

namespace gfusion::cli {

namespace {

using io::Json;

struct Globals {
  Tolerances tol;
  Sampling sampling;
  bool deterministic = false;
  std::string builtin;
  std::string reading = "consistent";
  std::vector<double> weights{2.0, 1.5, 1.2};

  Execution exec() const { return {!deterministic}; }
};

/// What a command produced: the report body and the exit status.
struct Outcome {
  Json body;
  int status;
};

struct Input {
  std::string name;
  io::FamilyDocument doc;
};

// Reports promise finite numbers; non-finite values are left out.
void put(Json& j, const char* key, double x) {
  if (std::isfinite(x)) j[key] = x;
}

Json bounds_json(const FrameReport<double>& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  put(j, "A_opt", r.lower);
  put(j, "B_opt", r.upper);
  put(j, "herm_defect", r.herm_defect);
  j["notes"] = r.notes;
  return j;
}

std::vector<Input> load_inputs(const Globals& g, const std::vector<std::string>& files,
                               std::size_t needed) {
  std::vector<Input> out;
  if (!g.builtin.empty()) {
    if (g.builtin != "paper-example") throw PreconditionError("unknown builtin '" + g.builtin + "'");
    const auto reading =
        g.reading == "literal" ? ExampleReading::literal : ExampleReading::consistent;
    auto fam = paper_example<double>(g.weights[0], g.weights[1], g.weights[2], reading);
    out.push_back({"builtin:paper-example:" + g.reading, {std::move(fam), std::nullopt}});
  }
  for (const auto& f : files) out.push_back({f, io::load_family(f, g.tol)});
  if (out.size() != needed)
    throw PreconditionError("expected " + std::to_string(needed) + " input famil" +
                            (needed == 1 ? "y" : "ies") + ", got " + std::to_string(out.size()));
  return out;
}

BesselPairD pair_of(const std::vector<Input>& in, const Tolerances& tol) {
  return make_bessel_pair(in[0].doc.family, in[1].doc.family, tol);
}

Outcome cmd_bounds(const Globals& g, const std::vector<Input>& in) {
  const auto& fam = in[0].doc.family;
  const auto diag = validate(fam, g.tol);
  const auto r = bounds_of(frame_operator(fam, g.tol, g.exec()), g.tol);
  Json body = bounds_json(r);
  put(body, "commutation_defect", diag.commutation_defect);
  return {body, r.is_frame() ? kAffirmative : kNegative};
}

Outcome cmd_dual(const Globals& g, const std::vector<Input>& in, const std::string& output) {
  const auto& fam = in[0].doc.family;
  const OperatorD s = frame_operator(fam, g.tol, g.exec());
  const auto dual = canonical_dual(fam, g.tol);
  const OperatorD sd = frame_operator(dual, g.tol, g.exec());
  const double residual = operator_norm(sd - inverse(s, g.tol.sing));
  Json body;
  body["original"] = bounds_json(bounds_of(s, g.tol));
  body["dual"] = bounds_json(bounds_of(sd, g.tol));
  put(body, "inverse_residual", residual);
  const bool ok = residual <= g.tol.res;
  body["verdict"] = ok ? "holds" : "fails";
  body["dual_family"] = io::emit_family(dual);
  if (!output.empty()) {
    std::ofstream f(output);
    if (!f) throw PreconditionError("cannot write '" + output + "'");
    f << io::emit_family_text(dual);
    body["dual_written_to"] = output;
  }
  return {body, ok ? kAffirmative : kNegative};
}

Outcome cmd_pair(const Globals& g, const std::vector<Input>& in, const std::string& variant) {
  const auto p = pair_of(in, g.tol);
  Json body;
  body["variant"] = variant;
  const auto op = pair_operator_report(p, g.tol);
  put(body, "B", op.bessel_lam);
  put(body, "D", op.bessel_gam);
  put(body, "norm", op.norm);
  put(body, "sqrt_BD", op.bound);
  body["within_sqrt_BD"] = op.within_bound;

  if (variant == "operator") {
    const OperatorD swap = pair_frame_operator(swapped(p), g.exec());
    put(body, "adjoint_swap_residual", (op.op.adjoint() - swap).cwiseAbs().maxCoeff());
    body["operator"] = io::encode_matrix(op.op);
    body["verdict"] = op.within_bound ? "holds" : "fails";
    return {body, op.within_bound ? kAffirmative : kNegative};
  }
  if (variant == "bounded-below") {
    const auto r = pair_bounded_below(p, g.tol);
    put(body, "sigma_min", r.sigma_min);
    body["bounded_below"] = r.bounded_below;
    if (r.bounded_below) {
      put(body, "resolution_residual", r.resolution_residual);
      body["resolution_holds"] = r.resolution_holds;
      put(body, "certified_lower_lam", r.certified_lower_lam);
      put(body, "certified_lower_gam", r.certified_lower_gam);
      body["certified_lower_gam_inferred_by_symmetry"] = true;
      body["certificates_hold"] = r.certificates_hold;
    }
    put(body, "computed_lower_lam", r.computed_lower_lam);
    put(body, "computed_lower_gam", r.computed_lower_gam);
    const bool ok = r.bounded_below && r.resolution_holds && r.certificates_hold;
    body["verdict"] = ok ? "holds" : "fails";
    return {body, ok ? kAffirmative : kNegative};
  }
  const auto r = pair_sum_positivity(p, g.tol);
  body["hypothesis_met"] = r.hypothesis_met;
  body["unmet"] = r.unmet;
  put(body, "factorization_residual", r.factorization_residual);
  body["factorization_holds"] = r.factorization_holds;
  put(body, "sum_lambda_min", r.sum_lambda_min);
  body["positive"] = r.positive;
  if (!r.hypothesis_met) {
    body["verdict"] = "hypothesis-not-met";
    return {body, kError};
  }
  body["verdict"] = r.positive ? "holds" : "fails";
  return {body, r.positive ? kAffirmative : kNegative};
}

Outcome cmd_multiplier(const Globals& g, const std::vector<Input>& in, std::optional<double> m_const,
                       std::optional<double> claimed) {
  const auto p = pair_of(in, g.tol);
  WeightSymbol<double> m;
  if (m_const) {
    m = WeightSymbol<double>::constant(p.lam.atoms.size(), *m_const);
  } else if (in[0].doc.m) {
    m = *in[0].doc.m;
  } else if (in[1].doc.m) {
    m = *in[1].doc.m;
  } else {
    throw PreconditionError("multiplier: no symbol given (use --m-const or an \"m\" array)");
  }
  const auto r = multiplier_frame_criterion(m, p, claimed, g.tol);
  Json body;
  put(body, "m_sup_norm", m.sup_norm());
  put(body, "norm", r.norm);
  put(body, "norm_bound", r.norm_bound);
  body["within_norm_bound"] = r.within_norm_bound;
  put(body, "lambda_star", r.lambda_star);
  body["applicable"] = r.applicable;
  if (claimed) {
    put(body, "claimed_lambda", *claimed);
    body["claimed_valid"] = r.claimed_valid;
  }
  put(body, "computed_lower_lam", r.computed_lower_lam);
  put(body, "computed_lower_gam", r.computed_lower_gam);
  if (!r.applicable) {
    body["verdict"] = "inapplicable";
    return {body, kError};
  }
  put(body, "certified_lower_gam", r.certified_lower_gam);
  put(body, "certified_lower_lam", r.certified_lower_lam);
  body["certified_lower_lam_inferred_by_symmetry"] = true;
  body["both_frames"] = r.both_frames;
  body["certificates_hold"] = r.certificates_hold;
  const bool ok = r.certificates_hold && r.within_norm_bound;
  body["verdict"] = ok ? "holds" : "fails";
  return {body, ok ? kAffirmative : kNegative};
}

Outcome perturbation_outcome(const PerturbationReport<double>& r, Json body) {
  Json atoms = Json::array();
  for (const auto& a : r.atoms) {
    Json j;
    j["id"] = a.id;
    put(j, "h_min", a.h_min);
    put(j, "h_max", a.h_max);
    put(j, "domination_min", a.domination_min);
    j["ok"] = a.ok;
    atoms.push_back(std::move(j));
  }
  body["atoms"] = std::move(atoms);
  body["hypothesis_met"] = r.hypothesis_met;
  body["samples"] = r.samples;
  body["sample_violations"] = r.sample_violations;
  if (r.first_violation) body["first_violation"] = *r.first_violation;
  put(body, "total_v2", r.total_v2);
  put(body, "A_opt", r.lam_lower);
  put(body, "B_opt", r.lam_upper);
  put(body, "minimal_D", r.minimal_d);
  body["applicable"] = r.applicable;
  put(body, "certified_lower", r.certified_lower);
  put(body, "certified_upper", r.certified_upper);
  body["perturbed"] = bounds_json(r.gam);
  body["contained"] = r.contained;
  if (!r.hypothesis_met) {
    body["verdict"] = "hypothesis-not-met";
    return {body, kError};
  }
  if (!r.applicable) {
    body["verdict"] = "inapplicable";
    return {body, kError};
  }
  body["verdict"] = r.contained ? "holds" : "fails";
  return {body, r.contained ? kAffirmative : kNegative};
}

Outcome cmd_perturb(const Globals& g, const std::vector<Input>& in, const PerturbationParams& p,
                    std::optional<double> simple) {
  const auto& lam = in[0].doc.family;
  const auto& gam = in[1].doc.family;
  Json body;
  if (simple) {
    body["form"] = "corollary";
    put(body, "D", *simple);
    return perturbation_outcome(perturb_check_simple(lam, gam, *simple, g.tol, g.sampling), body);
  }
  body["form"] = "theorem";
  put(body, "lambda1", p.lambda1);
  put(body, "lambda2", p.lambda2);
  put(body, "eps", p.eps);
  return perturbation_outcome(perturb_check(lam, gam, p, g.tol, g.sampling), body);
}

Outcome cmd_resolution(const Globals& g, const std::vector<Input>& in, const std::string& variant) {
  const auto& fam = in[0].doc.family;
  Json body;
  body["variant"] = variant;
  if (variant == "dual-bounds") {
    const auto r = dual_resolution_bounds(fam, g.tol, g.sampling);
    put(body, "resolution_residual", r.resolution_residual);
    body["resolution_holds"] = r.resolution_holds;
    put(body, "lower", r.lower);
    put(body, "upper", r.upper);
    put(body, "sample_min", r.sample_min);
    put(body, "sample_max", r.sample_max);
    put(body, "max_imag", r.max_imag);
    body["samples"] = r.samples;
    body["violations"] = r.violations;
    body["verdict"] = r.holds() ? "holds" : "fails";
    return {body, r.holds() ? kAffirmative : kNegative};
  }
  const auto c = canonical_resolutions(fam, g.tol);
  const auto r = is_resolution(variant == "canonical-left" ? c.left : c.right,
                               g.tol.res * std::max(1.0, c.condition));
  put(body, "condition", c.condition);
  put(body, "residual", r.residual);
  put(body, "threshold", g.tol.res * std::max(1.0, c.condition));
  body["verdict"] = r.holds ? "holds" : "fails";
  return {body, r.holds ? kAffirmative : kNegative};
}

Json header(const Globals& g, const std::string& command, const std::vector<Input>& in) {
  Json h;
  h["artifact"] = {{"name", kName}, {"version", kVersion}};
  h["command"] = command;
  Json names = Json::array();
  for (const auto& i : in) names.push_back(i.name);
  h["inputs"] = std::move(names);
  h["tolerances"] = {{"herm", g.tol.herm},   {"pd", g.tol.pd},     {"sing", g.tol.sing},
                     {"orth", g.tol.orth},   {"frame", g.tol.frame}, {"comm", g.tol.comm},
                     {"res", g.tol.res},     {"dual", g.tol.dual}};
  h["sampling"] = {{"count", g.sampling.count}, {"seed", g.sampling.seed}};
  h["deterministic"] = g.deterministic;
  return h;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Controlled g-fusion frame workbench"};
  app.name(kName);
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--tol-herm", g.tol.herm, "Hermiticity tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-frame", g.tol.frame, "lower bound threshold for a frame verdict")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol-res", g.tol.res, "resolution residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.sampling.seed, "sampling seed");
  app.add_flag("--deterministic", g.deterministic, "sequential per-atom evaluation");
  app.add_option("--builtin", g.builtin, "builtin family used as the first input")
      ->check(CLI::IsMember({"paper-example"}));
  app.add_option("--reading", g.reading, "reading of the builtin example")
      ->check(CLI::IsMember({"literal", "consistent"}));
  app.add_option("--weights", g.weights, "measure weights mu1,mu2,mu3 of the builtin example")
      ->expected(3)
      ->delimiter(',');

  std::vector<std::string> files;
  std::string variant, output;
  std::optional<double> m_const, claimed, simple;
  PerturbationParams pp;

  auto* bounds = app.add_subcommand("bounds", "optimal frame bounds of a family");
  bounds->add_option("file", files, "family file");

  auto* dual = app.add_subcommand("dual", "canonical dual family");
  dual->add_option("file", files, "family file");
  dual->add_option("--output", output, "write the dual family here");

  auto* pair = app.add_subcommand("pair", "frame operator of a pair of Bessel families");
  pair->add_option("variant", variant, "operator | bounded-below | positivity")
      ->required()
      ->check(CLI::IsMember({"operator", "bounded-below", "positivity"}));
  pair->add_option("files", files, "(T,T) family then (U,U) family");

  auto* mult = app.add_subcommand("multiplier", "Bessel multiplier and its frame criterion");
  mult->add_option("files", files, "(T,T) family then (U,U) family");
  mult->add_option("--m-const", m_const, "constant symbol value");
  mult->add_option("--claimed-lambda", claimed, "claimed bound on ||I - M||");

  auto* pert = app.add_subcommand("perturb", "frame stability under perturbation");
  pert->add_option("files", files, "unperturbed family then perturbed family");
  pert->add_option("--lambda1", pp.lambda1, "in [0, 1)");
  pert->add_option("--lambda2", pp.lambda2, "in [0, 1)");
  pert->add_option("--eps", pp.eps, "additive perturbation constant, >= 0");
  pert->add_option("--simple", simple, "corollary form with bound D");

  auto* res = app.add_subcommand("resolution", "resolutions of the identity");
  res->add_option("variant", variant, "canonical-left | canonical-right | dual-bounds")
      ->required()
      ->check(CLI::IsMember({"canonical-left", "canonical-right", "dual-bounds"}));
  res->add_option("file", files, "family file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kAffirmative : kError;
  }

  try {
    std::string command;
    Outcome o;
    std::vector<Input> in;
    if (bounds->parsed()) {
      command = "bounds";
      in = load_inputs(g, files, 1);
      o = cmd_bounds(g, in);
    } else if (dual->parsed()) {
      command = "dual";
      in = load_inputs(g, files, 1);
      o = cmd_dual(g, in, output);
    } else if (pair->parsed()) {
      command = "pair " + variant;
      in = load_inputs(g, files, 2);
      o = cmd_pair(g, in, variant);
    } else if (mult->parsed()) {
      command = "multiplier";
      in = load_inputs(g, files, 2);
      o = cmd_multiplier(g, in, m_const, claimed);
    } else if (pert->parsed()) {
      command = "perturb";
      in = load_inputs(g, files, 2);
      o = cmd_perturb(g, in, pp, simple);
    } else {
      command = "resolution " + variant;
      in = load_inputs(g, files, 1);
      o = cmd_resolution(g, in, variant);
    }
    Json report = header(g, command, in);
    for (auto& [key, value] : o.body.items()) report[key] = value;
    out << report.dump(2) << "\n";
    if (o.status == kError) err << kName << ": " << command << ": " << report["verdict"].get<std::string>() << "\n";
    return o.status;
  } catch (const ValidationError& e) {
    err << kName << ": error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << kName << ": error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << kName << ": internal error: " << e.what() << "\n";
  }
  return kError;
}

}  // namespace gfusion::cli
