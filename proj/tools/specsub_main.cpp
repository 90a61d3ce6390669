// Command-line front end: single-instance analysis, ensemble sweeps,
// sharpness searches, and few-body box experiments.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "specsub/specsub.hpp"

namespace {

using namespace specsub;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void print_bound_lines(const AnalysisReport& report) {
  for (const auto& b : report.bounds) {
    std::printf("  %-28s", bound_kind_name(b.kind));
    if (!b.requirements_met) {
      std::printf("inapplicable (%s)\n", b.note.c_str());
      continue;
    }
    if (!b.applicable) {
      std::printf("inapplicable (x = %.6g exceeds threshold %.6g)\n", b.x,
                  b.condition_threshold);
      continue;
    }
    if (b.bound_radians) {
      std::printf("bound %.12g rad (%.6g deg)  margin %.3e\n", *b.bound_radians,
                  *b.bound_radians * kRadToDeg, b.margin ? *b.margin : 0.0);
    } else {
      std::printf("condition satisfied (x = %.6g < %.6g)%s%s\n", b.x, b.condition_threshold,
                  b.claim_holds ? ", holds: " : "",
                  b.claim_holds ? (*b.claim_holds ? "yes" : "NO") : "");
    }
  }
}

void print_report_summary(const AnalysisReport& report) {
  std::printf("d = %.12g, disposition = %s", report.partition.separation,
              disposition_name(report.partition.disposition));
  if (report.partition.gap) std::printf(", D = %.12g", report.partition.gap->length);
  std::printf("\n||V|| = %.12g, x = ||V||/d = %.12g, off-diagonal: %s (residual %.3e)\n",
              report.norm_v, report.x, report.offdiagonal ? "yes" : "no",
              report.offdiag_residual);
  std::printf("theta_exact = %.12g rad (%.8g deg), ||P - Q|| = %.12g\n", report.theta_exact,
              report.theta_exact * kRadToDeg, report.proj_diff_norm);
  if (report.ground_state_overlap)
    std::printf("ground-state overlap |<psi0|psi0'>| = %.12g\n", *report.ground_state_overlap);
  std::printf("bounds:\n");
  print_bound_lines(report);
  if (!report.enclosure_checks.empty()) {
    std::printf("enclosures:\n");
    for (const auto& c : report.enclosure_checks)
      std::printf("  %-16s %s (%.12g, %.12g)  %s\n", c.label.c_str(),
                  c.forbidden ? "forbidden" : "confined ", c.lo, c.hi,
                  c.pass ? "pass" : "FAIL");
  }
  for (const auto& c : report.condition_checks)
    std::printf("check %-24s observed %.3e  %s\n", c.name.c_str(), c.observed,
                c.pass ? "pass" : "FAIL");
  for (const auto& n : report.notes) std::printf("note: %s\n", n.c_str());
  std::printf("certified: %s\n", report.certified ? "yes" : "no");
}

int finish_with_report(const AnalysisReport& report, const std::string& out_path,
                       const Tolerances& tol) {
  if (!out_path.empty()) {
    atomic_write_file(out_path, report_to_json(report));
    std::fprintf(stderr, "report written to %s\n", out_path.c_str());
  }
  const auto violations = verify_report(report, tol);
  for (const auto& v : violations)
    std::fprintf(stderr, "violation: %s: %s (%.3e)\n", v.what.c_str(), v.detail.c_str(),
                 v.amount);
  return violations.empty() ? 0 : 2;
}

int cmd_analyze(const std::string& path_a, const std::string& path_v,
                const std::string& sigma_spec, const std::string& out_path,
                double tol_herm, double tol_margin) {
  const HermitianOperator a =
      decode_matrix_file(parse_json_text(read_file(path_a), path_a), tol_herm);
  const HermitianOperator v =
      decode_matrix_file(parse_json_text(read_file(path_v), path_v), tol_herm);
  AnalyzeOptions opts;
  opts.tol.hermiticity = tol_herm;
  opts.tol.margin = tol_margin;
  const EigenDecomposition eig_a = eigh(a, opts.tol);
  const IndexSet sigma = resolve_sigma_spec(sigma_spec, eig_a.values_vector());
  const AnalysisReport report = analyze(a, v, sigma, opts);
  print_report_summary(report);
  return finish_with_report(report, out_path, opts.tol);
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              double tol_margin) {
  SweepRunConfig cfg = parse_sweep_config(
      parse_json_text(read_file(config_path), config_path));
  if (!out_override.empty()) cfg.out = out_override;
  if (cfg.out.empty()) cfg.out = "sweep.csv";
  const auto records = sweep(cfg.ensemble);
  atomic_write_file(cfg.out, sweep_records_to_csv(records));

  std::size_t errors = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    if (!r.error.empty()) {
      ++errors;
      std::fprintf(stderr, "trial (%zu, %zu) failed: %s\n", r.grid_index, r.trial,
                   r.error.c_str());
      continue;
    }
    for (const auto& m : {r.margin_sin2theta, r.margin_generic_pi, r.margin_tan2theta,
                          r.margin_tantheta})
      if (m) worst_margin = std::min(worst_margin, *m);
  }
  std::printf("%zu records -> %s\n", records.size(), cfg.out.c_str());
  if (std::isfinite(worst_margin)) std::printf("worst margin: %.6e\n", worst_margin);
  if (errors) std::fprintf(stderr, "%zu trial(s) recorded errors\n", errors);
  return std::isfinite(worst_margin) && worst_margin < -tol_margin ? 2 : 0;
}

int cmd_sharpness(const std::string& config_path, const std::string& out_override,
                  const std::string& trace_override) {
  SharpnessRunConfig cfg = parse_sharpness_config(
      parse_json_text(read_file(config_path), config_path));
  if (!out_override.empty()) cfg.out = out_override;
  if (!trace_override.empty()) cfg.trace = trace_override;
  if (cfg.out.empty()) cfg.out = "sharpness.json";
  const SharpnessResult res = sharpness_search(cfg.search);
  atomic_write_file(cfg.out, sharpness_result_to_json(cfg.search, res));
  if (!cfg.trace.empty()) atomic_write_file(cfg.trace, sharpness_trace_to_csv(res));
  std::printf("objective %s: best %.12g after %ld evaluations\n",
              sharpness_objective_name(cfg.search.objective), res.best_objective,
              res.evaluations);
  std::printf("theta_exact = %.12g rad", res.theta_exact);
  if (res.tightest_bound) std::printf(", tightest bound = %.12g rad", *res.tightest_bound);
  std::printf(", dist(omega, Omega) = %.12g\n", res.dist_omega_Omega);
  std::printf("result written to %s\n", cfg.out.c_str());
  return 0;
}

// a priori section first: everything here is known before touching H = A + V
void print_fewbody_apriori(const SpectralPartition& part, double norm_v, bool offdiag) {
  const double d = part.separation;
  const double x = norm_v / d;
  std::printf("=== a priori (spectrum of A and ||V|| only) ===\n");
  std::printf("d = %.12g, disposition = %s, ||V|| = %.12g, x = %.12g\n", d,
              disposition_name(part.disposition), norm_v, x);
  if (!offdiag && x >= constants::kSin2ThetaThreshold)
    std::printf("condition ||V|| < d/2 violated; no general-perturbation certification "
                "available\n");
  for (const auto& b : applicability(part, offdiag, x)) {
    if (!b.applicable) continue;
    if (b.bound_radians)
      std::printf("  %-28s theta <= %.12g rad (%.6g deg)\n", bound_kind_name(b.kind),
                  *b.bound_radians, *b.bound_radians * kRadToDeg);
    else
      std::printf("  %-28s %s\n", bound_kind_name(b.kind), b.note.c_str());
  }
  if (offdiag) {
    const ShiftBound shift = epsilon_shift(norm_v, d);
    std::printf("  epsilon_V = %.12g (max a priori downward shift)\n", shift.epsilon);
  }
}

int cmd_fewbody(const std::string& config_path, const std::string& out_override,
                const std::string& csv_override) {
  FewBodyRunConfig cfg = parse_fewbody_config(
      parse_json_text(read_file(config_path), config_path));
  if (!out_override.empty()) cfg.out = out_override;
  if (!csv_override.empty()) cfg.csv = csv_override;
  const FewBodyModel model = few_body_hamiltonian(cfg.model);

  AnalyzeOptions opts;
  opts.tol = cfg.tol;
  const EigenDecomposition eig_a = eigh(model.a, opts.tol);
  const SpectralPartition part = build_partition(eig_a, model.sigma_indices, opts.tol);
  const OrthogonalProjection p = spectral_projection(eig_a, model.sigma_indices, opts.tol);
  const OffDiagonalCheck od = is_offdiagonal(model.v, p, opts.tol.offdiagonal);
  print_fewbody_apriori(part, operator_norm(model.v), od.offdiagonal);

  std::printf("=== exact (full diagonalization of H = A + V) ===\n");
  const AnalysisReport report = analyze(model.a, model.v, model.sigma_indices, opts);
  print_report_summary(report);
  if (!cfg.csv.empty()) {
    atomic_write_file(cfg.csv, fewbody_levels_to_csv(report));
    std::fprintf(stderr, "levels written to %s\n", cfg.csv.c_str());
  }
  return finish_with_report(report, cfg.out, opts.tol);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"a priori spectral-subspace perturbation bounds for Hermitian operators"};
  app.require_subcommand(1);

  std::string path_a, path_v, sigma_spec, config_path;
  std::string out_path, csv_path, trace_path;
  double tol_herm = 1e-10;
  double tol_margin = Tolerances{}.margin;

  auto* analyze_cmd = app.add_subcommand("analyze", "certify one (A, V, sigma) instance");
  analyze_cmd->add_option("--A", path_a, "matrix file for A")->required();
  analyze_cmd->add_option("--V", path_v, "matrix file for V")->required();
  analyze_cmd->add_option("--sigma", sigma_spec, "index list \"0,1\" or interval \"lo:hi\"")
      ->required();
  analyze_cmd->add_option("--out", out_path, "report JSON path (default report.json)");
  analyze_cmd->add_option("--tol-herm", tol_herm, "hermiticity tolerance");
  analyze_cmd->add_option("--tol-margin", tol_margin, "certification margin tolerance");

  auto* sweep_cmd = app.add_subcommand("sweep", "randomized ensemble sweep to CSV");
  sweep_cmd->add_option("--config", config_path, "sweep config JSON")->required();
  sweep_cmd->add_option("--out", out_path, "CSV path (overrides config)");
  sweep_cmd->add_option("--tol-margin", tol_margin, "margin threshold for exit code 2");

  auto* sharp_cmd = app.add_subcommand("sharpness", "derivative-free sharpness search");
  sharp_cmd->add_option("--config", config_path, "search config JSON")->required();
  sharp_cmd->add_option("--out", out_path, "result JSON path (overrides config)");
  sharp_cmd->add_option("--trace", trace_path, "trace CSV path (overrides config)");

  auto* fewbody_cmd = app.add_subcommand("fewbody", "1D box model experiment");
  fewbody_cmd->add_option("--config", config_path, "model config JSON")->required();
  fewbody_cmd->add_option("--out", out_path, "report JSON path (overrides config)");
  fewbody_cmd->add_option("--csv", csv_path, "levels CSV path (overrides config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze_cmd->parsed())
      return cmd_analyze(path_a, path_v, sigma_spec,
                         out_path.empty() ? "report.json" : out_path, tol_herm, tol_margin);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, out_path, tol_margin);
    if (sharp_cmd->parsed()) return cmd_sharpness(config_path, out_path, trace_path);
    if (fewbody_cmd->parsed()) return cmd_fewbody(config_path, out_path, csv_path);
  } catch (const specsub::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 1;
}
