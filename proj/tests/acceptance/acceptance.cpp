// Acceptance run: one pass/fail line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "gfusion/cli.hpp"
#include "gfusion/io.hpp"
#include "support/instances.hpp"

using namespace gfusion;
using namespace gfusion::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

struct Run {
  int status;
  std::string out;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gfusion");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str()};
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

constexpr int kInstances = 100;
constexpr int kSamples = 1000;

/// Frames with commuting diagonal controls: block-ratio and diagonal instances alternate.
std::vector<ControlledFamilyD> commuting_frames(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ControlledFamilyD> out;
  for (int i = 0; i < kInstances; ++i)
    out.push_back(i % 2 ? diagonal_frame(rng) : block_ratio_frame(rng));
  return out;
}

Outcome paper_example_bounds() {
  Outcome o;
  const std::vector<std::string> triples = {"2,1.5,1.2", "1.01,1.01,1.01", "100,10,1.5", "7,7,3",
                                            "1e6,2,1.0001"};
  double worst = 0, slowest = 0;
  for (const auto& w : triples) {
    const auto t0 = Clock::now();
    const auto r = run_cli({"bounds", "--builtin", "paper-example", "--reading", "consistent",
                            "--weights", w});
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    o.require(r.status == 0, "exit status " + std::to_string(r.status) + " for weights " + w);
    if (r.status != 0) continue;
    const auto j = io::Json::parse(r.out);
    const double a = j["A_opt"].get<double>(), b = j["B_opt"].get<double>();
    worst = std::max({worst, std::abs(a - 1), std::abs(b - 4)});
    o.require(std::abs(a - 1) <= 1e-9 && std::abs(b - 4) <= 1e-9,
              fmt("A_opt %.17g B_opt %.17g", a, b) + " for weights " + w);
    o.require(dt < 0.1, fmt("runtime %.3f s", dt));
  }
  if (o.pass)
    o.detail = fmt("A=1, B=4 for %.0f weight triples (max dev %.1e), slowest run %.4f s",
                   double(triples.size()), worst, slowest);
  return o;
}

Outcome sandwich(const std::vector<ControlledFamilyD>& frames) {
  Outcome o;
  double worst_form = 0, worst_inv = 0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& fam = frames[k];
    const auto b = optimal_bounds(fam);
    o.require(b.is_frame(), "instance " + std::to_string(k) + " is not a frame");
    for (const auto& f : random_unit_vectors<double>(fam.dim, {kSamples, 1000 + k})) {
      const double q = gram_form(fam, f, f).real();
      worst_form = std::max({worst_form, b.lower - q, q - b.upper});
    }
    const auto inv = hermitian_eigenvalues(inverse(frame_operator(fam)));
    worst_inv = std::max({worst_inv, 1 / b.upper - inv.minCoeff(), inv.maxCoeff() - 1 / b.lower});
  }
  o.require(worst_form <= 1e-9, fmt("gram form leaves [A, B] by %.3e", worst_form));
  o.require(worst_inv <= 1e-9, fmt("S_C^-1 spectrum leaves [1/B, 1/A] by %.3e", worst_inv));
  if (o.pass)
    o.detail = std::to_string(frames.size()) + " instances x " + std::to_string(kSamples) +
               fmt(" vectors, worst excess %.1e (form), %.1e (inverse)", worst_form, worst_inv);
  return o;
}

Outcome factorization(const std::vector<ControlledFamilyD>& frames) {
  Outcome o;
  double worst_mat = 0, worst_norm = 0, worst_op = 0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& fam = frames[k];
    const CoefficientMaps<double> maps(fam);
    const OperatorD s = frame_operator(fam);
    OperatorD composed(fam.dim, fam.dim);
    for (Eigen::Index c = 0; c < fam.dim; ++c)
      composed.col(c) = maps.synthesize(maps.analyze(OperatorD::Identity(fam.dim, fam.dim).col(c)));
    worst_mat = std::max(worst_mat, (composed - s).cwiseAbs().maxCoeff());
    for (const auto& f : random_unit_vectors<double>(fam.dim, {kSamples, 2000 + k})) {
      const auto bundle = maps.analyze(f);
      double sq = 0;
      for (std::size_t i = 0; i < bundle.components.size(); ++i)
        sq += bundle.weights[i] * bundle.components[i].squaredNorm();
      worst_norm = std::max(worst_norm, std::abs(sq - inner(VectorD(s * f), f).real()));
    }
    const double b = optimal_bounds(fam).upper;
    worst_op = std::max(worst_op, operator_norm(maps.synthesis_matrix()) - std::sqrt(b));
  }
  o.require(worst_mat <= 1e-8, fmt("synthesis o analysis differs from S_C by %.3e", worst_mat));
  o.require(worst_norm <= 1e-9, fmt("|T_C f|^2 differs from <S_C f, f> by %.3e", worst_norm));
  o.require(worst_op <= 1e-9, fmt("|T_C| exceeds sqrt(B) by %.3e", worst_op));
  if (o.pass)
    o.detail = fmt("matrix dev %.1e, norm dev %.1e, |T_C| - sqrt(B) <= %.1e", worst_mat, worst_norm,
                   worst_op);
  return o;
}

Outcome canonical_dual_check() {
  Outcome o;
  Rng rng(4);
  double worst_op = 0, worst_bounds = 0;
  for (int k = 0; k < kInstances; ++k) {
    const auto fam = diagonal_frame(rng);
    const auto b = optimal_bounds(fam);
    const auto dual = canonical_dual(fam);
    const OperatorD sd = frame_operator(dual);
    worst_op = std::max(worst_op, (sd - inverse(frame_operator(fam))).cwiseAbs().maxCoeff());
    const auto db = optimal_bounds(dual);
    worst_bounds = std::max({worst_bounds, std::abs(db.lower - 1 / b.upper), std::abs(db.upper - 1 / b.lower)});
  }
  o.require(worst_op <= 1e-8, fmt("dual frame operator differs from S_C^-1 by %.3e", worst_op));
  o.require(worst_bounds <= 1e-8, fmt("dual bounds differ from (1/B, 1/A) by %.3e", worst_bounds));
  const OperatorD ex = frame_operator(canonical_dual(paper_example(2.0, 1.5, 1.2)));
  const double dev = (ex - diag({1.0, 0.25, 0.8})).cwiseAbs().maxCoeff();
  o.require(dev <= 1e-8, fmt("builtin example dual frame operator off diag(1, 1/4, 4/5) by %.3e", dev));
  if (o.pass)
    o.detail = fmt("%.0f diagonal instances, dev %.1e; example dual = diag(1, 1/4, 4/5) within %.1e",
                   kInstances, std::max(worst_op, worst_bounds), dev);
  return o;
}

Outcome control_equivalences() {
  Outcome o;
  Rng rng(5);
  double worst = 0;
  for (int k = 0; k < kInstances; ++k) {
    const auto fam = k % 2 ? diagonal_frame(rng) : block_scalar_frame(rng);
    const auto b = optimal_bounds(fam);
    for (const auto& g : {recontrol_TU_I(fam), recontrol_sqrt(fam)}) {
      const auto r = optimal_bounds(g);
      worst = std::max({worst, std::abs(r.lower - b.lower), std::abs(r.upper - b.upper)});
    }
  }
  o.require(worst <= 1e-9, fmt("recontrolled bounds differ by %.3e", worst));
  if (o.pass) o.detail = fmt("%.0f instances, both recontrols, max bound dev %.1e", kInstances, worst);
  return o;
}

Outcome pair_operator() {
  Outcome o;
  Rng rng(6);
  double worst_bound = -1e300, worst_swap = 0;
  for (int k = 0; k < kInstances; ++k) {
    const auto pair = random_pair(rng);
    const auto r = pair_operator_report(pair);
    worst_bound = std::max(worst_bound, r.norm - std::sqrt(r.bessel_lam * r.bessel_gam));
    const OperatorD swap = pair_frame_operator(swapped(pair));
    worst_swap = std::max(worst_swap, (r.op.adjoint() - swap).cwiseAbs().maxCoeff());
  }
  o.require(worst_bound <= 1e-9, fmt("|S| exceeds sqrt(BD) by %.3e", worst_bound));
  o.require(worst_swap <= 1e-10, fmt("adjoint swap identity off by %.3e", worst_swap));
  if (o.pass)
    o.detail = fmt("%.0f pairs, max |S| - sqrt(BD) = %.2e, swap dev %.1e", kInstances, worst_bound,
                   worst_swap);
  return o;
}

Outcome resolutions() {
  Outcome o;
  Rng rng(7);
  std::vector<ControlledFamilyD> frames = {paper_example(2.0, 1.5, 1.2)};
  for (int k = 0; k < kInstances; ++k)
    frames.push_back(k % 3 == 0 ? block_ratio_frame(rng) : k % 3 == 1 ? block_scalar_frame(rng)
                                                                      : diagonal_frame(rng));
  double worst_ratio = 0;
  std::size_t sampled = 0, violations = 0, sandwich_frames = 0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& fam = frames[k];
    const auto c = canonical_resolutions(fam);
    for (const auto* side : {&c.left, &c.right})
      worst_ratio = std::max(worst_ratio, is_resolution(*side).residual / (1e-8 * c.condition));
    // the dual-resolution sandwich needs S_C^-1 to commute with the controls, so skip block-ratio
    if (k % 3 == 1) continue;
    const auto d = dual_resolution_bounds(fam, {}, {kSamples, 3000 + k});
    o.require(d.resolution_holds, "dual resolution fails on instance " + std::to_string(k));
    sampled += d.samples;
    violations += d.violations;
    ++sandwich_frames;
  }
  o.require(worst_ratio <= 1, fmt("resolution residual is %.2f x 1e-8 cond(S_C)", worst_ratio));
  o.require(violations == 0, std::to_string(violations) + " samples outside [A/B^2, B/A^2]");
  if (o.pass)
    o.detail = fmt("%.0f frames, worst residual / (1e-8 cond) = %.2e; sandwich on %.0f frames", double(frames.size()),
                   worst_ratio, double(sandwich_frames)) + ", " + std::to_string(sampled) + " samples, 0 violations";
  return o;
}

Outcome multiplier_check() {
  Outcome o;
  Rng rng(8);
  double worst_norm = -1e300;
  for (int k = 0; k < kInstances; ++k) {
    const auto pair = random_pair(rng);
    WeightSymbol<double> m;
    for (std::size_t i = 0; i < pair.lam.atoms.size(); ++i)
      m.values.emplace_back(uniform(rng, -2, 2), uniform(rng, -1, 1));
    const auto r = multiplier_frame_criterion(m, pair);
    worst_norm = std::max(worst_norm, r.norm - r.norm_bound);
  }
  o.require(worst_norm <= 1e-9, fmt("|M| exceeds |m| sqrt(BD) by %.3e", worst_norm));

  double worst_lambda = 0;
  int certified = 0;
  for (int k = 0; k < kInstances; ++k) {
    auto fam = block_scalar_frame(rng, {12, 16});
    fam.right_control = fam.left_control;
    if (!(optimal_bounds(fam).lower > 1e-3)) continue;
    const auto pair = make_bessel_pair(fam, canonical_dual(fam));
    const auto r = multiplier_frame_criterion(WeightSymbol<double>::constant(fam.atoms.size(), 1.0), pair);
    worst_lambda = std::max(worst_lambda, r.lambda_star);
    o.require(r.applicable && r.certificates_hold,
              "criterion fails to certify the dual pair on instance " + std::to_string(k));
    o.require(r.certified_lower_gam <= r.computed_lower_gam * (1 + 1e-9) + 1e-12,
              fmt("certified %.6g above computed %.6g", r.certified_lower_gam, r.computed_lower_gam));
    certified += r.applicable && r.certificates_hold;
  }
  o.require(worst_lambda <= 1e-8, fmt("lambda* = %.3e for m = 1 on a dual pair", worst_lambda));
  o.require(certified >= kInstances / 2, "too few dual pairs generated");
  if (o.pass)
    o.detail = fmt("max |M| - bound = %.2e; %.0f dual pairs, max lambda* %.1e", worst_norm, certified,
                   worst_lambda);
  return o;
}

Outcome perturbation() {
  Outcome o;
  Rng rng(9);
  int checked = 0;
  for (int k = 0; k < 40; ++k) {
    const auto fam = k % 2 ? diagonal_frame(rng) : block_ratio_frame(rng);
    const auto b = optimal_bounds(fam);
    const auto z = perturb_check(fam, fam, {0, 0, 0}, {}, {200, 4000u + k});
    o.require(z.hypothesis_met && z.certified_lower == b.lower && z.certified_upper == b.upper,
              fmt("zero perturbation certifies [%.17g, %.17g]", z.certified_lower, z.certified_upper));
    for (double delta : {0.01, 0.1}) {
      const auto r = perturb_check(fam, scaled(fam, delta), {delta, 0, 0}, {}, {200, 5000u + k});
      o.require(r.hypothesis_met && r.sample_violations == 0,
                fmt("scaled construction fails the hypothesis (delta %.2f)", delta));
      o.require(r.applicable && r.contained,
                fmt("computed bounds [%.6g, %.6g] not in certified interval", r.gam.lower, r.gam.upper));
    }
    const double tv2 = total_v2(fam.atoms);
    for (double s : {0.25, 0.999999, 1.0, 1.000001, 3.0}) {
      const double d = s * b.lower / tv2;
      const auto r = perturb_check_simple(fam, fam, d, {}, {20, 6000u + k});
      o.require(r.applicable == (d * tv2 < b.lower),
                fmt("corollary applicability wrong at D tv2 / A = %.7f", d * tv2 / b.lower));
    }
    ++checked;
  }
  if (o.pass)
    o.detail = fmt("%.0f frames: zero perturbation exact, delta in {0.01, 0.1} contained, "
                   "applicability matches D tv2 < A",
                   checked);
  return o;
}

Outcome round_trip_and_determinism() {
  Outcome o;
  Rng rng(10);
  int families = 0;
  for (int k = 0; k < 50; ++k) {
    const auto fam = k % 2 ? random_pair(rng).lam : block_ratio_frame(rng);
    const std::string text = io::emit_family_text(fam);
    const auto back = io::parse_family_text(text);
    o.require(io::emit_family_text(back.family) == text, "emit/parse/emit not byte stable");
    ++families;
  }
  const auto path = std::filesystem::temp_directory_path() / "gfusion_acceptance_example.json";
  std::ofstream(path) << io::emit_family_text(paper_example(2.0, 1.5, 1.2));
  const std::vector<std::vector<std::string>> commands = {
      {"bounds", "--builtin", "paper-example"},
      {"dual", "--builtin", "paper-example"},
      {"--seed", "11", "resolution", "dual-bounds", "--builtin", "paper-example"},
      {"resolution", "canonical-right", "--builtin", "paper-example"},
      {"--seed", "12", "perturb", "--builtin", "paper-example", path.string(), "--lambda1", "0.1"},
  };
  for (const auto& c : commands) {
    const auto a = run_cli(c), b = run_cli(c);
    o.require(a.status == 0, "exit status " + std::to_string(a.status) + " for '" + c[0] + "'");
    o.require(a.out == b.out, "report differs between runs for '" + c[0] + "'");
  }
  if (o.pass)
    o.detail = fmt("%.0f families byte stable, %.0f commands byte identical", families, double(commands.size()));
  return o;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const auto frames = commuting_frames(2);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"builtin example bounds", paper_example_bounds},
      {"frame operator sandwich", [&] { return sandwich(frames); }},
      {"synthesis/analysis factorization", [&] { return factorization(frames); }},
      {"canonical dual", canonical_dual_check},
      {"control equivalences", control_equivalences},
      {"pair operator", pair_operator},
      {"resolutions", resolutions},
      {"multiplier", multiplier_check},
      {"perturbation", perturbation},
      {"round trip and determinism", round_trip_and_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    if (i + 1 == criteria.size()) {
      const double total = seconds_since(t0);
      o.require(total < 60, fmt("acceptance run took %.1f s", total));
      if (o.pass) o.detail += fmt("; acceptance run %.2f s", total);
    }
    failed += !o.pass;
    std::printf("[%s] criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
