#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "specsub/analyzer.hpp"
#include "specsub/errors.hpp"
#include "specsub/generators.hpp"
#include "specsub/hermitian.hpp"

namespace specsub {

using njson = nlohmann::json;

// 17 significant decimal digits round-trip doubles exactly.
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

// JSON number when finite, quoted string otherwise.
inline std::string json_double(double v) {
  if (std::isfinite(v)) return fmt_double(v);
  return "\"" + fmt_double(v) + "\"";
}

inline std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += "\"";
  return out;
}

template <typename T, typename F>
std::string json_array(const std::vector<T>& v, F&& fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  out += "]";
  return out;
}

inline std::string json_doubles(const std::vector<double>& v) {
  return json_array(v, [](double x) { return json_double(x); });
}

inline std::string json_indices(const IndexSet& v) {
  return json_array(v, [](std::size_t i) { return std::to_string(i); });
}

inline std::string json_opt(const std::optional<double>& v) {
  return v ? json_double(*v) : "null";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// matrix files: {"n": n, "re": [n*n row-major], "im": [n*n row-major]?}

inline std::string encode_matrix_file(const Matrix& m) {
  const Eigen::Index n = m.rows();
  bool any_imag = false;
  for (Eigen::Index i = 0; i < n && !any_imag; ++i)
    for (Eigen::Index j = 0; j < n && !any_imag; ++j)
      if (m(i, j).imag() != 0.0) any_imag = true;
  std::string out = "{\"n\":" + std::to_string(n) + ",\"re\":[";
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i || j) out += ",";
      out += fmt_double(m(i, j).real());
    }
  out += "]";
  if (any_imag) {
    out += ",\"im\":[";
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i || j) out += ",";
        out += fmt_double(m(i, j).imag());
      }
    out += "]";
  }
  out += "}";
  return out;
}

inline std::string encode_matrix_file(const HermitianOperator& h) {
  return encode_matrix_file(h.matrix());
}

namespace detail {

inline void require_keys(const njson& obj, std::initializer_list<const char*> allowed,
                         const std::string& context) {
  if (!obj.is_object()) fail(ErrorCode::ConfigInvalid, context + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) ok = true;
    if (!ok)
      fail(ErrorCode::ConfigInvalid, context + ": unknown key \"" + item.key() + "\"");
  }
}

inline const njson& require_field(const njson& obj, const char* key,
                                  const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(ErrorCode::ConfigInvalid, context + ": missing required key \"" + key + "\"");
  return *it;
}

inline double as_number(const njson& v, const std::string& where) {
  if (!v.is_number()) fail(ErrorCode::ConfigInvalid, where + " must be a number");
  return v.get<double>();
}

inline long as_integer(const njson& v, const std::string& where) {
  if (!v.is_number_integer()) fail(ErrorCode::ConfigInvalid, where + " must be an integer");
  return v.get<long>();
}

inline std::string as_string(const njson& v, const std::string& where) {
  if (!v.is_string()) fail(ErrorCode::ConfigInvalid, where + " must be a string");
  return v.get<std::string>();
}

inline std::vector<double> as_doubles(const njson& v, const std::string& where) {
  if (!v.is_array()) fail(ErrorCode::ConfigInvalid, where + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_number(e, where + " element"));
  return out;
}

inline IndexSet as_indices(const njson& v, const std::string& where) {
  if (!v.is_array()) fail(ErrorCode::ConfigInvalid, where + " must be an array of indices");
  IndexSet out;
  out.reserve(v.size());
  for (const auto& e : v) {
    const long i = as_integer(e, where + " element");
    if (i < 0) fail(ErrorCode::ConfigInvalid, where + " indices must be nonnegative");
    out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace detail

inline njson parse_json_text(const std::string& text, const std::string& context) {
  njson parsed = njson::parse(text, nullptr, false);
  if (parsed.is_discarded())
    fail(ErrorCode::ParseError, context + ": malformed JSON");
  return parsed;
}

inline HermitianOperator decode_matrix_file(const njson& doc, double tol = 1e-10) {
  detail::require_keys(doc, {"n", "re", "im"}, "matrix file");
  const long n = detail::as_integer(detail::require_field(doc, "n", "matrix file"), "n");
  if (n < 1) fail(ErrorCode::ConfigInvalid, "n must be >= 1");
  const auto re = detail::as_doubles(detail::require_field(doc, "re", "matrix file"), "re");
  if (re.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    fail(ErrorCode::ConfigInvalid, "re must hold n*n values");
  std::vector<double> im;
  if (doc.contains("im")) {
    im = detail::as_doubles(doc["im"], "im");
    if (im.size() != re.size()) fail(ErrorCode::ConfigInvalid, "im must hold n*n values");
  }
  Matrix m(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i * n + j);
      m(i, j) = Complex(re[idx], im.empty() ? 0.0 : im[idx]);
    }
  return validate_hermitian(m, tol);
}

// ---------------------------------------------------------------------------
// file helpers

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Write-then-rename so consumers never observe a partial file.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::ParseError, "cannot write \"" + tmp + "\"");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// sigma specification: "0,1,2" index list or "lo:hi" eigenvalue interval

inline IndexSet resolve_sigma_spec(const std::string& spec,
                                   const std::vector<double>& eigenvalues) {
  if (spec.empty()) fail(ErrorCode::ConfigInvalid, "sigma: empty specification");
  IndexSet out;
  if (spec.find(':') != std::string::npos) {
    const auto pos = spec.find(':');
    try {
      const double lo = std::stod(spec.substr(0, pos));
      const double hi = std::stod(spec.substr(pos + 1));
      for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        if (eigenvalues[i] >= lo && eigenvalues[i] <= hi) out.push_back(i);
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigInvalid, "sigma: cannot parse interval \"" + spec + "\"");
    }
    if (out.empty())
      fail(ErrorCode::EmptySet, "sigma: no eigenvalue lies in [" + spec + "]");
    return out;
  }
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      const long i = std::stol(tok);
      if (i < 0) throw std::invalid_argument("negative");
      out.push_back(static_cast<std::size_t>(i));
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigInvalid, "sigma: cannot parse index \"" + tok + "\"");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// analysis report JSON (stable key order, radians, 17 significant digits)

inline std::string report_to_json(const AnalysisReport& r) {
  using detail::json_double;
  using detail::json_doubles;
  using detail::json_indices;
  using detail::json_opt;
  using detail::json_quote;
  std::string s = "{\n";
  s += "  \"spec_A\": " + json_doubles(r.spec_a) + ",\n";
  s += "  \"spec_H\": " + json_doubles(r.spec_h) + ",\n";
  s += "  \"sigma_indices\": " + json_indices(r.partition.sigma_indices) + ",\n";
  s += "  \"d\": " + json_double(r.partition.separation) + ",\n";
  s += "  \"gap_D\": " +
       (r.partition.gap ? json_double(r.partition.gap->length) : std::string("null")) + ",\n";
  s += "  \"disposition\": " + json_quote(disposition_name(r.partition.disposition)) + ",\n";
  s += "  \"norm_V\": " + json_double(r.norm_v) + ",\n";
  s += "  \"x\": " + json_double(r.x) + ",\n";
  s += std::string("  \"offdiagonal\": ") + (r.offdiagonal ? "true" : "false") + ",\n";
  s += "  \"offdiag_residual\": " + json_double(r.offdiag_residual) + ",\n";
  s += "  \"omega\": " + json_doubles(r.components.omega) + ",\n";
  s += "  \"Omega\": " + json_doubles(r.components.Omega) + ",\n";
  s += "  \"ambiguous\": " + json_doubles(r.components.ambiguous) + ",\n";
  s += "  \"omega_indices\": " + json_indices(r.omega_indices) + ",\n";
  s += "  \"dist_omega_Omega\": " + json_double(r.dist_omega_Omega) + ",\n";
  s += "  \"theta_exact\": " + json_double(r.theta_exact) + ",\n";
  s += "  \"proj_diff_norm\": " + json_double(r.proj_diff_norm) + ",\n";
  s += std::string("  \"ranks_equal\": ") + (r.ranks_equal ? "true" : "false") + ",\n";
  s += "  \"ground_state_overlap\": " + json_opt(r.ground_state_overlap) + ",\n";
  s += "  \"bounds\": [";
  for (std::size_t i = 0; i < r.bounds.size(); ++i) {
    const auto& b = r.bounds[i];
    if (i) s += ",";
    s += "\n    {\"kind\": " + json_quote(bound_kind_name(b.kind));
    s += std::string(", \"requirements_met\": ") + (b.requirements_met ? "true" : "false");
    s += std::string(", \"applicable\": ") + (b.applicable ? "true" : "false");
    s += ", \"threshold\": " + json_double(b.condition_threshold);
    if (b.universal_threshold)
      s += ", \"universal_threshold\": " + json_double(*b.universal_threshold);
    s += ", \"x\": " + json_double(b.x);
    s += ", \"bound\": " + json_opt(b.bound_radians);
    s += ", \"exact\": " + json_opt(b.exact_radians);
    s += ", \"margin\": " + json_opt(b.margin);
    if (b.claim_holds)
      s += std::string(", \"claim_holds\": ") + (*b.claim_holds ? "true" : "false");
    if (!b.note.empty()) s += ", \"note\": " + json_quote(b.note);
    s += "}";
  }
  s += "\n  ],\n";
  s += "  \"enclosure_checks\": [";
  for (std::size_t i = 0; i < r.enclosure_checks.size(); ++i) {
    const auto& c = r.enclosure_checks[i];
    if (i) s += ",";
    s += "\n    {\"label\": " + json_quote(c.label);
    s += std::string(", \"type\": ") + (c.forbidden ? "\"forbidden\"" : "\"confined\"");
    s += ", \"lo\": " + json_double(c.lo);
    s += ", \"hi\": " + json_double(c.hi);
    s += ", \"observed\": " + json_double(c.observed);
    s += std::string(", \"pass\": ") + (c.pass ? "true" : "false") + "}";
  }
  s += "\n  ],\n";
  s += "  \"condition_checks\": [";
  for (std::size_t i = 0; i < r.condition_checks.size(); ++i) {
    const auto& c = r.condition_checks[i];
    if (i) s += ",";
    s += "\n    {\"name\": " + json_quote(c.name);
    s += ", \"observed\": " + json_double(c.observed);
    s += std::string(", \"pass\": ") + (c.pass ? "true" : "false");
    s += ", \"note\": " + json_quote(c.note) + "}";
  }
  s += "\n  ],\n";
  s += std::string("  \"has_ambiguity\": ") + (r.has_ambiguity ? "true" : "false") + ",\n";
  s += std::string("  \"ambiguity_covered\": ") + (r.ambiguity_covered ? "true" : "false") +
       ",\n";
  s += "  \"notes\": " + detail::json_array(r.notes, detail::json_quote) + ",\n";
  s += std::string("  \"certified\": ") + (r.certified ? "true" : "false") + "\n";
  s += "}\n";
  return s;
}

// ---------------------------------------------------------------------------
// sweep CSV (fixed column order, locale-independent)

inline std::string sweep_csv_header() {
  return "seed,trial,n,disposition,d,D,x,offdiag,theta_exact,"
         "bound_sin2theta,margin_sin2theta,bound_generic_pi,margin_generic_pi,"
         "bound_tan2theta,margin_tan2theta,bound_tantheta,margin_tantheta,"
         "dist_omega_Omega,enclosures_pass";
}

inline std::string sweep_records_to_csv(const std::vector<EnsembleRecord>& records) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
  };
  std::string out = sweep_csv_header() + "\n";
  for (const auto& r : records) {
    out += std::to_string(r.seed) + "," + std::to_string(r.trial) + "," +
           std::to_string(r.n) + ",";
    if (r.error.empty()) {
      out += disposition_name(r.disposition);
      out += "," + fmt_double(r.d) + "," + opt(r.gap_length) + "," + fmt_double(r.x) + "," +
             (r.offdiagonal ? "1" : "0") + "," + fmt_double(r.theta_exact) + "," +
             opt(r.bound_sin2theta) + "," + opt(r.margin_sin2theta) + "," +
             opt(r.bound_generic_pi) + "," + opt(r.margin_generic_pi) + "," +
             opt(r.bound_tan2theta) + "," + opt(r.margin_tan2theta) + "," +
             opt(r.bound_tantheta) + "," + opt(r.margin_tantheta) + "," +
             fmt_double(r.dist_omega_Omega) + ",";
      out += r.enclosures_pass ? (*r.enclosures_pass ? "1" : "0") : "";
    } else {
      // errored trial: keep the row, leave the data cells empty
      out += ",,," + fmt_double(r.x) + ",,,,,,,,,,,,";
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// run configuration files (strict schemas, unknown keys rejected)

struct SweepRunConfig {
  EnsembleConfig ensemble;
  std::string out;  // CSV path
  Tolerances tol;
};

struct FewBodyRunConfig {
  FewBodyConfig model;
  std::string out;  // report JSON path
  std::string csv;  // levels CSV path
  Tolerances tol;
};

struct SharpnessRunConfig {
  SharpnessConfig search;
  std::string out;    // result JSON path
  std::string trace;  // trace CSV path
};

namespace detail {

inline Tolerances parse_tolerances(const njson& doc) {
  Tolerances tol;
  require_keys(doc, {"hermiticity", "margin", "offdiagonal", "degeneracy"}, "tolerances");
  if (doc.contains("hermiticity")) tol.hermiticity = as_number(doc["hermiticity"], "hermiticity");
  if (doc.contains("margin")) tol.margin = as_number(doc["margin"], "margin");
  if (doc.contains("offdiagonal")) tol.offdiagonal = as_number(doc["offdiagonal"], "offdiagonal");
  if (doc.contains("degeneracy")) tol.degeneracy = as_number(doc["degeneracy"], "degeneracy");
  return tol;
}

}  // namespace detail

inline SweepRunConfig parse_sweep_config(const njson& doc) {
  detail::require_keys(doc,
                       {"dimension", "disposition", "sigma_size", "spectrum", "x_grid",
                        "trials", "perturbation", "seed", "out", "tolerances"},
                       "sweep config");
  SweepRunConfig cfg;
  cfg.ensemble.dimension =
      static_cast<int>(detail::as_integer(detail::require_field(doc, "dimension", "sweep config"), "dimension"));
  cfg.ensemble.disposition = disposition_from_name(
      detail::as_string(detail::require_field(doc, "disposition", "sweep config"), "disposition"));
  cfg.ensemble.trials =
      static_cast<int>(detail::as_integer(detail::require_field(doc, "trials", "sweep config"), "trials"));
  cfg.ensemble.x_grid =
      detail::as_doubles(detail::require_field(doc, "x_grid", "sweep config"), "x_grid");
  cfg.ensemble.perturbation = perturbation_class_from_name(
      detail::as_string(detail::require_field(doc, "perturbation", "sweep config"), "perturbation"));
  cfg.ensemble.seed = static_cast<std::uint64_t>(
      detail::as_integer(detail::require_field(doc, "seed", "sweep config"), "seed"));

  const njson& spec = detail::require_field(doc, "spectrum", "sweep config");
  const std::string law =
      detail::as_string(detail::require_field(spec, "law", "spectrum"), "law");
  if (law == "uniform") {
    detail::require_keys(spec, {"law", "d"}, "spectrum");
    cfg.ensemble.explicit_spectrum = false;
    cfg.ensemble.enforced_d = detail::as_number(detail::require_field(spec, "d", "spectrum"), "d");
    cfg.ensemble.sigma_size = static_cast<int>(
        detail::as_integer(detail::require_field(doc, "sigma_size", "sweep config"), "sigma_size"));
  } else if (law == "explicit") {
    detail::require_keys(spec, {"law", "values", "sigma_indices"}, "spectrum");
    cfg.ensemble.explicit_spectrum = true;
    cfg.ensemble.explicit_values =
        detail::as_doubles(detail::require_field(spec, "values", "spectrum"), "values");
    cfg.ensemble.explicit_sigma =
        detail::as_indices(detail::require_field(spec, "sigma_indices", "spectrum"), "sigma_indices");
    cfg.ensemble.sigma_size = static_cast<int>(cfg.ensemble.explicit_sigma.size());
  } else {
    fail(ErrorCode::ConfigInvalid, "spectrum law must be \"uniform\" or \"explicit\"");
  }
  if (doc.contains("out")) cfg.out = detail::as_string(doc["out"], "out");
  if (doc.contains("tolerances")) cfg.tol = detail::parse_tolerances(doc["tolerances"]);
  validate(cfg.ensemble);
  return cfg;
}

inline FewBodyRunConfig parse_fewbody_config(const njson& doc) {
  detail::require_keys(doc,
                       {"grid_points", "box_length", "base_potential", "perturbation",
                        "sigma", "out", "csv", "tolerances"},
                       "fewbody config");
  FewBodyRunConfig cfg;
  cfg.model.grid_points = static_cast<int>(
      detail::as_integer(detail::require_field(doc, "grid_points", "fewbody config"), "grid_points"));
  cfg.model.box_length =
      detail::as_number(detail::require_field(doc, "box_length", "fewbody config"), "box_length");
  if (doc.contains("base_potential"))
    cfg.model.base_potential = detail::as_doubles(doc["base_potential"], "base_potential");

  const njson& pert = detail::require_field(doc, "perturbation", "fewbody config");
  const std::string kind =
      detail::as_string(detail::require_field(pert, "kind", "perturbation"), "kind");
  if (kind == "rank_one") {
    detail::require_keys(pert, {"kind", "lambda", "profile"}, "perturbation");
    cfg.model.kind = FewBodyConfig::Kind::RankOne;
    cfg.model.amplitude =
        detail::as_number(detail::require_field(pert, "lambda", "perturbation"), "lambda");
    const njson& prof = detail::require_field(pert, "profile", "perturbation");
    if (prof.is_array()) {
      cfg.model.profile = detail::as_doubles(prof, "profile");
    } else if (prof.is_object()) {
      detail::require_keys(prof, {"mode"}, "profile");
      const int mode = static_cast<int>(
          detail::as_integer(detail::require_field(prof, "mode", "profile"), "mode"));
      cfg.model.profile = box_mode_profile(cfg.model.grid_points, mode);
    } else {
      fail(ErrorCode::ConfigInvalid, "profile must be an array or {\"mode\": k}");
    }
  } else if (kind == "local") {
    detail::require_keys(pert, {"kind", "samples"}, "perturbation");
    cfg.model.kind = FewBodyConfig::Kind::LocalPotential;
    cfg.model.local_samples =
        detail::as_doubles(detail::require_field(pert, "samples", "perturbation"), "samples");
  } else {
    fail(ErrorCode::ConfigInvalid, "perturbation kind must be \"rank_one\" or \"local\"");
  }

  const njson& sigma = detail::require_field(doc, "sigma", "fewbody config");
  detail::require_keys(sigma, {"lowest", "band"}, "sigma");
  if (sigma.contains("lowest"))
    cfg.model.lowest_k = static_cast<int>(detail::as_integer(sigma["lowest"], "lowest"));
  if (sigma.contains("band")) {
    const IndexSet band = detail::as_indices(sigma["band"], "band");
    if (band.size() != 2) fail(ErrorCode::ConfigInvalid, "band must be [first, last]");
    cfg.model.band = {static_cast<int>(band[0]), static_cast<int>(band[1])};
  }
  if (doc.contains("out")) cfg.out = detail::as_string(doc["out"], "out");
  if (doc.contains("csv")) cfg.csv = detail::as_string(doc["csv"], "csv");
  if (doc.contains("tolerances")) cfg.tol = detail::parse_tolerances(doc["tolerances"]);
  return cfg;
}

inline SharpnessRunConfig parse_sharpness_config(const njson& doc) {
  detail::require_keys(doc,
                       {"objective", "disposition", "perturbation", "x", "dimension",
                        "sigma_size", "budget", "seed", "d", "out", "trace"},
                       "sharpness config");
  SharpnessRunConfig cfg;
  cfg.search.objective = sharpness_objective_from_name(
      detail::as_string(detail::require_field(doc, "objective", "sharpness config"), "objective"));
  cfg.search.disposition = disposition_from_name(
      detail::as_string(detail::require_field(doc, "disposition", "sharpness config"), "disposition"));
  cfg.search.perturbation = perturbation_class_from_name(
      detail::as_string(detail::require_field(doc, "perturbation", "sharpness config"), "perturbation"));
  cfg.search.x = detail::as_number(detail::require_field(doc, "x", "sharpness config"), "x");
  cfg.search.dimension = static_cast<int>(
      detail::as_integer(detail::require_field(doc, "dimension", "sharpness config"), "dimension"));
  if (doc.contains("sigma_size"))
    cfg.search.sigma_size = static_cast<int>(detail::as_integer(doc["sigma_size"], "sigma_size"));
  else
    cfg.search.sigma_size = cfg.search.disposition == Disposition::Generic ||
                                    cfg.search.disposition == Disposition::ComplementInFiniteGap
                                ? 2
                                : 1;
  cfg.search.budget = detail::as_integer(detail::require_field(doc, "budget", "sharpness config"), "budget");
  cfg.search.seed = static_cast<std::uint64_t>(
      detail::as_integer(detail::require_field(doc, "seed", "sharpness config"), "seed"));
  if (doc.contains("d")) cfg.search.enforced_d = detail::as_number(doc["d"], "d");
  if (doc.contains("out")) cfg.out = detail::as_string(doc["out"], "out");
  if (doc.contains("trace")) cfg.trace = detail::as_string(doc["trace"], "trace");
  return cfg;
}

// ---------------------------------------------------------------------------
// sharpness outputs

inline std::string sharpness_result_to_json(const SharpnessConfig& cfg,
                                            const SharpnessResult& res) {
  using detail::json_double;
  std::string s = "{\n";
  s += "  \"objective\": " + detail::json_quote(sharpness_objective_name(cfg.objective)) + ",\n";
  s += "  \"disposition\": " + detail::json_quote(disposition_name(cfg.disposition)) + ",\n";
  s += "  \"perturbation\": " +
       detail::json_quote(perturbation_class_name(cfg.perturbation)) + ",\n";
  s += "  \"x\": " + json_double(res.x) + ",\n";
  s += "  \"best_objective\": " + json_double(res.best_objective) + ",\n";
  s += "  \"theta_exact\": " + json_double(res.theta_exact) + ",\n";
  s += "  \"tightest_bound\": " + detail::json_opt(res.tightest_bound) + ",\n";
  s += "  \"dist_omega_Omega\": " + json_double(res.dist_omega_Omega) + ",\n";
  s += "  \"evaluations\": " + std::to_string(res.evaluations) + ",\n";
  s += "  \"sigma_indices\": " + detail::json_indices(res.sigma_indices) + ",\n";
  s += "  \"A\": " + encode_matrix_file(res.a) + ",\n";
  s += "  \"V\": " + encode_matrix_file(res.v) + "\n";
  s += "}\n";
  return s;
}

inline std::string sharpness_trace_to_csv(const SharpnessResult& res) {
  std::string out = "evaluation,objective\n";
  for (const auto& p : res.trace)
    out += std::to_string(p.evaluation) + "," + fmt_double(p.objective) + "\n";
  return out;
}

// few-body levels CSV: unperturbed level, perturbed level, shift
inline std::string fewbody_levels_to_csv(const AnalysisReport& r) {
  std::string out = "index,E_A,E_H,shift\n";
  for (std::size_t i = 0; i < r.spec_a.size(); ++i)
    out += std::to_string(i) + "," + fmt_double(r.spec_a[i]) + "," +
           fmt_double(r.spec_h[i]) + "," + fmt_double(r.spec_h[i] - r.spec_a[i]) + "\n";
  return out;
}

}  // namespace specsub
