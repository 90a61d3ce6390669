#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "specsub/analyzer.hpp"
#include "specsub/bounds.hpp"
#include "specsub/errors.hpp"
#include "specsub/hermitian.hpp"
#include "specsub/partition.hpp"

namespace specsub {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Child seed for (master, a, b); stable across runs and platforms.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t state = master;
  state ^= 0x9E3779B97F4A7C15ull * (a + 1);
  state ^= 0xC2B2AE3D27D4EB4Full * (b + 1);
  splitmix64_next(state);
  return splitmix64_next(state);
}

enum class PerturbationClass { General, OffDiagonal };

inline const char* perturbation_class_name(PerturbationClass c) {
  return c == PerturbationClass::General ? "general" : "offdiagonal";
}

inline PerturbationClass perturbation_class_from_name(const std::string& s) {
  if (s == "general") return PerturbationClass::General;
  if (s == "offdiagonal" || s == "off-diagonal") return PerturbationClass::OffDiagonal;
  fail(ErrorCode::ConfigInvalid, "unknown perturbation class \"" + s + "\"");
}

namespace detail {

inline void fill_gaussian(RealMatrix& m, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = normal(rng);
}

inline std::vector<double> sorted_uniform(std::size_t count, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> v(count);
  for (double& x : v) x = uni(rng);
  std::sort(v.begin(), v.end());
  return v;
}

// translate so the block starts at `start`
inline void append_block(std::vector<double>& out, std::vector<double> block, double start) {
  const double off = start - block.front();
  for (double b : block) out.push_back(b + off);
}

}  // namespace detail

/// Spectrum with the requested disposition built from uniform draws; the
/// separation distance equals `d` exactly by construction.
struct DispositionSpectrum {
  std::vector<double> values;  // ascending
  IndexSet sigma_indices;
};

inline DispositionSpectrum spectrum_with_disposition(std::size_t n, std::size_t k,
                                                     Disposition target, double d,
                                                     Rng& rng) {
  if (n < 2 || k < 1 || k >= n)
    fail(ErrorCode::ConfigInvalid, "need n >= 2 and 1 <= k <= n-1");
  if (!(d > 0.0)) fail(ErrorCode::ConfigInvalid, "enforced separation d must be positive");
  if (target == Disposition::SigmaInFiniteGap && n - k < 2)
    fail(ErrorCode::ConfigInvalid, "sigma_in_finite_gap needs at least two complement points");
  if (target == Disposition::ComplementInFiniteGap && k < 2)
    fail(ErrorCode::ConfigInvalid, "complement_in_finite_gap needs at least two sigma points");
  if (target == Disposition::Generic && (k < 2 || n - k < 2))
    fail(ErrorCode::ConfigInvalid, "generic disposition needs k >= 2 and n-k >= 2");

  std::uniform_real_distribution<double> uni(0.0, 1.0);
  DispositionSpectrum out;
  out.values.reserve(n);

  switch (target) {
    case Disposition::Subordinated: {
      detail::append_block(out.values, detail::sorted_uniform(k, rng), 0.0);
      detail::append_block(out.values, detail::sorted_uniform(n - k, rng),
                           out.values.back() + d);
      for (std::size_t i = 0; i < k; ++i) out.sigma_indices.push_back(i);
      break;
    }
    case Disposition::SigmaInFiniteGap: {
      const std::size_t below =
          1 + static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n - k - 1));
      detail::append_block(out.values, detail::sorted_uniform(below, rng), 0.0);
      detail::append_block(out.values, detail::sorted_uniform(k, rng),
                           out.values.back() + d);
      const double upper_gap = d * (1.0 + uni(rng));  // >= d keeps dist exactly d
      detail::append_block(out.values, detail::sorted_uniform(n - k - below, rng),
                           out.values.back() + upper_gap);
      for (std::size_t i = 0; i < k; ++i) out.sigma_indices.push_back(below + i);
      break;
    }
    case Disposition::ComplementInFiniteGap: {
      const std::size_t below =
          1 + static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(k - 1));
      detail::append_block(out.values, detail::sorted_uniform(below, rng), 0.0);
      detail::append_block(out.values, detail::sorted_uniform(n - k, rng),
                           out.values.back() + d);
      const double upper_gap = d * (1.0 + uni(rng));
      detail::append_block(out.values, detail::sorted_uniform(k - below, rng),
                           out.values.back() + upper_gap);
      for (std::size_t i = 0; i < below; ++i) out.sigma_indices.push_back(i);
      for (std::size_t i = below + (n - k); i < n; ++i) out.sigma_indices.push_back(i);
      break;
    }
    case Disposition::Generic: {
      const std::size_t k1 =
          1 + static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(k - 1));
      const std::size_t m1 =
          1 + static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n - k - 1));
      detail::append_block(out.values, detail::sorted_uniform(k1, rng), 0.0);
      detail::append_block(out.values, detail::sorted_uniform(m1, rng),
                           out.values.back() + d);
      detail::append_block(out.values, detail::sorted_uniform(k - k1, rng),
                           out.values.back() + d * (1.0 + uni(rng)));
      detail::append_block(out.values, detail::sorted_uniform(n - k - m1, rng),
                           out.values.back() + d * (1.0 + uni(rng)));
      for (std::size_t i = 0; i < k1; ++i) out.sigma_indices.push_back(i);
      for (std::size_t i = k1 + m1; i < k1 + m1 + (k - k1); ++i)
        out.sigma_indices.push_back(i);
      break;
    }
  }
  return out;
}

/// A = U diag(spectrum) U^T with U Haar-distributed from QR of a Gaussian
/// matrix (signs fixed by R_ii > 0 so the factorization is unique).
inline HermitianOperator random_hermitian_with_spectrum(const std::vector<double>& spectrum,
                                                        Rng& rng) {
  const std::size_t n = spectrum.size();
  if (n == 0) fail(ErrorCode::ConfigInvalid, "empty spectrum");
  RealMatrix g(n, n);
  detail::fill_gaussian(g, rng);
  Eigen::HouseholderQR<RealMatrix> qr(g);
  RealMatrix q = qr.householderQ();
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  RealMatrix a = q * Eigen::Map<const RealVector>(spectrum.data(),
                                                  static_cast<Eigen::Index>(n))
                         .asDiagonal() *
                 q.transpose();
  return HermitianOperator(a.cast<Complex>());
}

inline HermitianOperator random_hermitian_with_spectrum(const std::vector<double>& spectrum,
                                                        std::uint64_t seed) {
  Rng rng(seed);
  return random_hermitian_with_spectrum(spectrum, rng);
}

/// Random Hermitian perturbation rescaled to the target operator norm.
/// The off-diagonal class keeps only the cross blocks between Ran(P) and its
/// complement. A draw of norm < 1e-13 is retried up to 8 times.
inline HermitianOperator random_perturbation(std::size_t n, double target_norm,
                                             PerturbationClass pclass, Rng& rng,
                                             const OrthogonalProjection* p = nullptr) {
  if (!(target_norm >= 0.0))
    fail(ErrorCode::DomainViolation, "target_norm must be nonnegative");
  if (pclass == PerturbationClass::OffDiagonal && (p == nullptr || p->n() != n))
    fail(ErrorCode::DimensionMismatch,
         "off-diagonal class needs a projection of matching dimension");
  if (target_norm == 0.0) return HermitianOperator::zero(n);

  for (int attempt = 0; attempt < 8; ++attempt) {
    RealMatrix g(n, n);
    detail::fill_gaussian(g, rng);
    HermitianOperator candidate(Matrix(0.5 * (g + g.transpose()).cast<Complex>()));
    if (pclass == PerturbationClass::OffDiagonal)
      candidate = offdiagonal_split(candidate, *p).v_offdiag;
    const double norm = operator_norm(candidate);
    if (norm >= 1e-13) return (target_norm / norm) * candidate;
  }
  fail(ErrorCode::DegenerateDraw, "8 consecutive draws had norm below 1e-13");
}

inline HermitianOperator random_perturbation(std::size_t n, double target_norm,
                                             PerturbationClass pclass, std::uint64_t seed,
                                             const OrthogonalProjection* p = nullptr) {
  Rng rng(seed);
  return random_perturbation(n, target_norm, pclass, rng, p);
}

// ---------------------------------------------------------------------------
// few-body toy models: 1D Dirichlet box discretization

/// Discretized -d^2/dx^2 + V0(x) on (0, L) with a rank-one or local-potential
/// perturbation (natural units, hbar^2/2mu = 1).
struct FewBodyConfig {
  int grid_points = 0;  // m >= 3 interior points
  double box_length = 1.0;
  std::vector<double> base_potential;  // size m, empty means zero

  enum class Kind { RankOne, LocalPotential };
  Kind kind = Kind::RankOne;
  double amplitude = 0.0;             // lambda (rank-one)
  std::vector<double> profile;        // rank-one |phi>, normalized before use
  std::vector<double> local_samples;  // W(x_i) (local potential)

  std::optional<int> lowest_k;                  // sigma = lowest k levels
  std::optional<std::pair<int, int>> band;      // sigma = levels [first, second]
};

struct FewBodyModel {
  HermitianOperator a;
  HermitianOperator v;
  IndexSet sigma_indices;
};

/// Normalized samples of the k-th Dirichlet box mode sin(k pi x / L).
inline std::vector<double> box_mode_profile(int m, int mode) {
  if (m < 1 || mode < 1) fail(ErrorCode::ConfigInvalid, "box mode needs m >= 1, mode >= 1");
  std::vector<double> phi(static_cast<std::size_t>(m));
  double norm2 = 0.0;
  for (int i = 0; i < m; ++i) {
    phi[static_cast<std::size_t>(i)] =
        std::sin(std::numbers::pi * mode * (i + 1) / (m + 1));
    norm2 += phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i)];
  }
  for (double& x : phi) x /= std::sqrt(norm2);
  return phi;
}

inline FewBodyModel few_body_hamiltonian(const FewBodyConfig& config) {
  const int m = config.grid_points;
  if (m < 3) fail(ErrorCode::ConfigInvalid, "grid_points must be >= 3");
  if (!(config.box_length > 0.0)) fail(ErrorCode::ConfigInvalid, "box_length must be positive");
  if (!config.base_potential.empty() &&
      config.base_potential.size() != static_cast<std::size_t>(m))
    fail(ErrorCode::ConfigInvalid, "base_potential must have one sample per grid point");

  const double h = config.box_length / (m + 1);
  const double diag = 2.0 / (h * h);
  const double off = -1.0 / (h * h);
  RealMatrix a = RealMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    a(i, i) = diag + (config.base_potential.empty()
                          ? 0.0
                          : config.base_potential[static_cast<std::size_t>(i)]);
    if (i + 1 < m) {
      a(i, i + 1) = off;
      a(i + 1, i) = off;
    }
  }

  RealMatrix v = RealMatrix::Zero(m, m);
  if (config.kind == FewBodyConfig::Kind::RankOne) {
    if (config.profile.size() != static_cast<std::size_t>(m))
      fail(ErrorCode::ConfigInvalid, "rank-one profile must have one sample per grid point");
    RealVector phi = Eigen::Map<const RealVector>(config.profile.data(), m);
    const double norm = phi.norm();
    if (!(norm > 0.0)) fail(ErrorCode::ConfigInvalid, "rank-one profile must be nonzero");
    phi /= norm;
    v = config.amplitude * phi * phi.transpose();
  } else {
    if (config.local_samples.size() != static_cast<std::size_t>(m))
      fail(ErrorCode::ConfigInvalid, "local potential must have one sample per grid point");
    for (int i = 0; i < m; ++i) v(i, i) = config.local_samples[static_cast<std::size_t>(i)];
  }

  FewBodyModel model{HermitianOperator(a.cast<Complex>()),
                     HermitianOperator(v.cast<Complex>()),
                     {}};
  if (config.lowest_k.has_value() == config.band.has_value())
    fail(ErrorCode::ConfigInvalid, "choose exactly one of lowest-k or band sigma selection");
  if (config.lowest_k) {
    const int k = *config.lowest_k;
    if (k < 1 || k >= m) fail(ErrorCode::ConfigInvalid, "lowest-k must be in [1, m-1]");
    for (int i = 0; i < k; ++i) model.sigma_indices.push_back(static_cast<std::size_t>(i));
  } else {
    const auto [lo, hi] = *config.band;
    if (lo < 0 || hi < lo || hi >= m || (lo == 0 && hi == m - 1))
      fail(ErrorCode::ConfigInvalid, "band must select a proper level range");
    for (int i = lo; i <= hi; ++i) model.sigma_indices.push_back(static_cast<std::size_t>(i));
  }
  return model;
}

// ---------------------------------------------------------------------------
// randomized sweeps

struct EnsembleConfig {
  int dimension = 0;
  Disposition disposition = Disposition::Subordinated;
  int sigma_size = 0;
  // spectrum law: uniform blocks with enforced separation, or an explicit list
  bool explicit_spectrum = false;
  double enforced_d = 0.35;
  std::vector<double> explicit_values;
  IndexSet explicit_sigma;
  std::vector<double> x_grid;
  int trials = 0;
  PerturbationClass perturbation = PerturbationClass::General;
  std::uint64_t seed = 0;
};

inline void validate(const EnsembleConfig& c) {
  if (c.dimension < 2) fail(ErrorCode::ConfigInvalid, "dimension must be >= 2");
  if (c.trials < 1) fail(ErrorCode::ConfigInvalid, "trials must be >= 1");
  if (c.x_grid.empty()) fail(ErrorCode::ConfigInvalid, "x_grid must be nonempty");
  for (double x : c.x_grid)
    if (!(x >= 0.0)) fail(ErrorCode::ConfigInvalid, "x values must be nonnegative");
  if (c.explicit_spectrum) {
    if (c.explicit_values.size() != static_cast<std::size_t>(c.dimension))
      fail(ErrorCode::ConfigInvalid, "explicit spectrum size differs from dimension");
  } else {
    if (c.sigma_size < 1 || c.sigma_size >= c.dimension)
      fail(ErrorCode::ConfigInvalid, "sigma_size must be in [1, dimension-1]");
    if (!(c.enforced_d > 0.0)) fail(ErrorCode::ConfigInvalid, "enforced d must be positive");
  }
}

/// One row of a randomized sweep.
struct EnsembleRecord {
  std::uint64_t seed = 0;  // derived per (grid point, trial)
  std::size_t grid_index = 0;
  std::size_t trial = 0;
  int n = 0;
  Disposition disposition = Disposition::Generic;
  double d = 0.0;
  std::optional<double> gap_length;
  double x = 0.0;
  bool offdiagonal = false;
  double theta_exact = 0.0;
  std::optional<double> bound_sin2theta, margin_sin2theta;
  std::optional<double> bound_generic_pi, margin_generic_pi;
  std::optional<double> bound_tan2theta, margin_tan2theta;
  std::optional<double> bound_tantheta, margin_tantheta;
  double dist_omega_Omega = 0.0;
  std::optional<bool> enclosures_pass;
  bool certified = false;
  std::string error;  // nonempty when this trial failed; not fatal to the sweep
};

namespace detail {

inline void fill_record_bounds(EnsembleRecord& rec, const AnalysisReport& report) {
  for (const auto& b : report.bounds) {
    if (!b.bound_radians) continue;
    switch (b.kind) {
      case BoundKind::Sin2Theta:
        rec.bound_sin2theta = b.bound_radians;
        rec.margin_sin2theta = b.margin;
        break;
      case BoundKind::GenericPi:
        rec.bound_generic_pi = b.bound_radians;
        rec.margin_generic_pi = b.margin;
        break;
      case BoundKind::Tan2ThetaOffdiag:
        rec.bound_tan2theta = b.bound_radians;
        rec.margin_tan2theta = b.margin;
        break;
      case BoundKind::TanThetaOffdiagGap:
        rec.bound_tantheta = b.bound_radians;
        rec.margin_tantheta = b.margin;
        break;
      default:
        break;
    }
  }
}

}  // namespace detail

/// Single sweep trial, reproducible from (config, grid_index, trial).
inline EnsembleRecord sweep_trial(const EnsembleConfig& config, std::size_t grid_index,
                                  std::size_t trial) {
  EnsembleRecord rec;
  rec.seed = derive_seed(config.seed, grid_index, trial);
  rec.grid_index = grid_index;
  rec.trial = trial;
  rec.n = config.dimension;
  rec.x = config.x_grid[grid_index];
  try {
    Rng rng(rec.seed);
    DispositionSpectrum spec;
    if (config.explicit_spectrum) {
      spec.values = config.explicit_values;
      spec.sigma_indices = config.explicit_sigma;
    } else {
      spec = spectrum_with_disposition(static_cast<std::size_t>(config.dimension),
                                       static_cast<std::size_t>(config.sigma_size),
                                       config.disposition, config.enforced_d, rng);
    }
    const SpectralPartition target = build_partition(spec.values, spec.sigma_indices);
    if (!config.explicit_spectrum && target.disposition != config.disposition)
      throw std::logic_error("constructed spectrum classified to the wrong disposition");

    const HermitianOperator a = random_hermitian_with_spectrum(spec.values, rng);
    const EigenDecomposition eig_a = eigh(a);
    const OrthogonalProjection p = spectral_projection(eig_a, spec.sigma_indices);
    const HermitianOperator v =
        random_perturbation(a.n(), rec.x * target.separation, config.perturbation, rng, &p);

    const AnalysisReport report = analyze(a, v, spec.sigma_indices);
    rec.disposition = report.partition.disposition;
    rec.d = report.partition.separation;
    if (report.partition.gap) rec.gap_length = report.partition.gap->length;
    rec.x = report.x;
    rec.offdiagonal = report.offdiagonal;
    rec.theta_exact = report.theta_exact;
    rec.dist_omega_Omega = report.dist_omega_Omega;
    detail::fill_record_bounds(rec, report);
    if (!report.enclosure_checks.empty()) {
      bool all = true;
      for (const auto& c : report.enclosure_checks) all = all && c.pass;
      rec.enclosures_pass = all;
    }
    rec.certified = report.certified;
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

/// Randomized sweep over the x grid; output is ordered by (grid point, trial)
/// regardless of how trials execute. Honors SPECSUB_THREADS when set.
inline std::vector<EnsembleRecord> sweep(const EnsembleConfig& config) {
  validate(config);
  const std::size_t total = config.x_grid.size() * static_cast<std::size_t>(config.trials);
  std::vector<EnsembleRecord> records(total);

  std::size_t threads = 1;
  if (const char* env = std::getenv("SPECSUB_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed > 1) threads = static_cast<std::size_t>(parsed);
  }
  threads = std::min(threads, total ? total : std::size_t{1});

  const auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t gi = idx / static_cast<std::size_t>(config.trials);
      const std::size_t t = idx % static_cast<std::size_t>(config.trials);
      records[idx] = sweep_trial(config, gi, t);
    }
  };
  if (threads <= 1) {
    run_range(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back(run_range, t * chunk, std::min(total, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  return records;
}

// ---------------------------------------------------------------------------
// sharpness search

enum class SharpnessObjective {
  ThetaMinusBound,  // maximize theta_exact - tightest applicable bound
  GapDistance,      // minimize dist(omega, Omega)
};

inline const char* sharpness_objective_name(SharpnessObjective o) {
  return o == SharpnessObjective::ThetaMinusBound ? "theta_minus_bound" : "gap_distance";
}

inline SharpnessObjective sharpness_objective_from_name(const std::string& s) {
  if (s == "theta_minus_bound") return SharpnessObjective::ThetaMinusBound;
  if (s == "gap_distance") return SharpnessObjective::GapDistance;
  fail(ErrorCode::ConfigInvalid, "unknown objective \"" + s + "\"");
}

struct SharpnessConfig {
  SharpnessObjective objective = SharpnessObjective::ThetaMinusBound;
  Disposition disposition = Disposition::Subordinated;
  PerturbationClass perturbation = PerturbationClass::OffDiagonal;
  double x = 0.0;
  int dimension = 2;
  int sigma_size = 1;
  long budget = 1000;
  std::uint64_t seed = 0;
  double enforced_d = 0.35;
};

struct SharpnessTracePoint {
  long evaluation;
  double objective;  // best so far, in the maximized orientation
};

struct SharpnessResult {
  double best_objective = 0.0;       // ThetaMinusBound: theta - bound; GapDistance: dist
  double theta_exact = 0.0;
  std::optional<double> tightest_bound;
  double dist_omega_Omega = 0.0;
  double x = 0.0;
  long evaluations = 0;
  Matrix a, v;  // the achieving instance
  IndexSet sigma_indices;
  std::vector<SharpnessTracePoint> trace;
};

namespace detail {

struct SharpnessEval {
  double score;  // maximized orientation
  double theta;
  std::optional<double> bound;
  double dist;
};

inline SharpnessEval sharpness_evaluate(const SharpnessConfig& cfg,
                                        const HermitianOperator& a,
                                        const HermitianOperator& v,
                                        const IndexSet& sigma) {
  const AnalysisReport rep = analyze(a, v, sigma);
  SharpnessEval ev{};
  ev.theta = rep.theta_exact;
  ev.dist = rep.dist_omega_Omega;
  double tightest = std::numeric_limits<double>::infinity();
  for (const auto& b : rep.bounds)
    if (b.bound_radians) tightest = std::min(tightest, *b.bound_radians);
  if (std::isfinite(tightest)) ev.bound = tightest;
  if (cfg.objective == SharpnessObjective::ThetaMinusBound) {
    if (!ev.bound)
      fail(ErrorCode::ConfigInvalid,
           "no estimating bound applies to this disposition/class/x combination");
    ev.score = ev.theta - *ev.bound;
  } else {
    ev.score = -ev.dist;
  }
  return ev;
}

// Standard Nelder-Mead (reflect / expand / contract / shrink), maximizing
// eval.score. `more()` gates every evaluation so the caller's budget holds.
// Returns the best vertex reached.
template <typename EvalFn, typename MoreFn>
std::pair<std::vector<double>, SharpnessEval> nelder_mead_maximize(
    EvalFn&& evaluate, MoreFn&& more, const std::vector<double>& start, double scale,
    Rng& rng) {
  const std::size_t p = start.size();
  std::vector<std::vector<double>> xs{start};
  std::vector<SharpnessEval> fs{evaluate(start)};

  // initial simplex along a random orthonormal frame
  RealMatrix frame(p, p);
  fill_gaussian(frame, rng);
  const RealMatrix q = Eigen::HouseholderQR<RealMatrix>(frame).householderQ();
  for (std::size_t i = 0; i < p && more(); ++i) {
    std::vector<double> v = start;
    for (std::size_t j = 0; j < p; ++j)
      v[j] += scale * q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    xs.push_back(std::move(v));
    fs.push_back(evaluate(xs.back()));
  }

  const auto best_of = [&] {
    std::size_t bi = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (fs[i].score > fs[bi].score) bi = i;
    return std::pair<std::vector<double>, SharpnessEval>(xs[bi], fs[bi]);
  };
  if (xs.size() < p + 1) return best_of();

  while (more()) {
    // order best-first
    std::vector<std::size_t> idx(p + 1);
    for (std::size_t i = 0; i <= p; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fs[a].score > fs[b].score; });
    {
      std::vector<std::vector<double>> xs2(p + 1);
      std::vector<SharpnessEval> fs2(p + 1);
      for (std::size_t i = 0; i <= p; ++i) {
        xs2[i] = std::move(xs[idx[i]]);
        fs2[i] = fs[idx[i]];
      }
      xs = std::move(xs2);
      fs = std::move(fs2);
    }

    double diameter = 0.0;
    for (std::size_t i = 1; i <= p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        diameter = std::max(diameter, std::abs(xs[i][j] - xs[0][j]));
    if (diameter < 1e-11) break;

    std::vector<double> centroid(p, 0.0);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) centroid[j] += xs[i][j] / static_cast<double>(p);

    const auto blend = [&](double t) {  // centroid + t (centroid - worst)
      std::vector<double> v(p);
      for (std::size_t j = 0; j < p; ++j)
        v[j] = centroid[j] + t * (centroid[j] - xs[p][j]);
      return v;
    };

    std::vector<double> xr = blend(1.0);
    const SharpnessEval fr = evaluate(xr);
    if (fr.score > fs[0].score) {
      if (more()) {
        std::vector<double> xe = blend(2.0);
        const SharpnessEval fe = evaluate(xe);
        if (fe.score > fr.score) {
          xs[p] = std::move(xe);
          fs[p] = fe;
          continue;
        }
      }
      xs[p] = std::move(xr);
      fs[p] = fr;
      continue;
    }
    if (fr.score > fs[p - 1].score) {
      xs[p] = std::move(xr);
      fs[p] = fr;
      continue;
    }
    if (!more()) break;
    const bool outside = fr.score > fs[p].score;
    std::vector<double> xc = blend(outside ? 0.5 : -0.5);
    const SharpnessEval fc = evaluate(xc);
    if ((outside && fc.score >= fr.score) || (!outside && fc.score > fs[p].score)) {
      xs[p] = std::move(xc);
      fs[p] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 1; i <= p && more(); ++i) {
      for (std::size_t j = 0; j < p; ++j) xs[i][j] = xs[0][j] + 0.5 * (xs[i][j] - xs[0][j]);
      fs[i] = evaluate(xs[i]);
    }
  }
  return best_of();
}

// V from free parameters: full symmetric coordinates, or the sigma-to-complement
// cross block in A's eigenbasis for the off-diagonal class. Rescaled to the
// target norm (zero stays zero).
inline HermitianOperator sharpness_materialize(const std::vector<double>& params,
                                               PerturbationClass pclass, std::size_t n,
                                               std::size_t k, const Matrix& basis,
                                               double target_norm) {
  Matrix v = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (pclass == PerturbationClass::General) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = params[idx];
        v(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = params[idx];
        ++idx;
      }
  } else {
    const std::size_t nc = n - k;
    Matrix b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(nc));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < nc; ++j)
        b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = params[i * nc + j];
    const auto u_sigma = basis.leftCols(static_cast<Eigen::Index>(k));
    const auto u_comp = basis.rightCols(static_cast<Eigen::Index>(nc));
    const Matrix cross = u_sigma * b * u_comp.adjoint();
    v = cross + cross.adjoint();
  }
  HermitianOperator out(symmetrize(v));
  if (target_norm == 0.0) return HermitianOperator::zero(n);
  const double norm = operator_norm(out);
  if (norm < 1e-13) return HermitianOperator::zero(n);
  return (target_norm / norm) * out;
}

}  // namespace detail

/// Multi-start random initialization followed by derivative-free simplex
/// refinement at geometrically shrinking scales; V is re-projected to the
/// fixed norm (and off-diagonal block structure) after every move.
/// Deterministic per seed; budget exhaustion returns best-so-far.
inline SharpnessResult sharpness_search(const SharpnessConfig& cfg) {
  if (cfg.budget < 1) fail(ErrorCode::ConfigInvalid, "budget must be >= 1");
  if (!(cfg.x >= 0.0)) fail(ErrorCode::ConfigInvalid, "x must be nonnegative");
  const std::size_t n = static_cast<std::size_t>(cfg.dimension);
  const std::size_t k = static_cast<std::size_t>(cfg.sigma_size);

  const std::size_t n_params = cfg.perturbation == PerturbationClass::General
                                   ? n * (n + 1) / 2
                                   : k * (n - k);
  const long restarts = std::max<long>(
      1, std::min<long>(6, cfg.budget / static_cast<long>(n_params * 250)));

  SharpnessResult best;
  best.best_objective = -std::numeric_limits<double>::infinity();
  best.x = cfg.x;
  long evals = 0;

  for (long restart = 0; restart < restarts && evals < cfg.budget; ++restart) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(restart), 0x5ea6c4));
    const DispositionSpectrum spec =
        spectrum_with_disposition(n, k, cfg.disposition, cfg.enforced_d, rng);
    const HermitianOperator a = random_hermitian_with_spectrum(spec.values, rng);
    const EigenDecomposition eig_a = eigh(a);
    // columns reordered: sigma eigenvectors first, complement after
    Matrix basis(eig_a.vectors.rows(), eig_a.vectors.cols());
    Eigen::Index col = 0;
    for (std::size_t i : spec.sigma_indices)
      basis.col(col++) = eig_a.vectors.col(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < n; ++i)
      if (!std::binary_search(spec.sigma_indices.begin(), spec.sigma_indices.end(), i))
        basis.col(col++) = eig_a.vectors.col(static_cast<Eigen::Index>(i));
    const double target_norm = cfg.x * cfg.enforced_d;

    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> params(n_params);
    for (double& q : params) q = normal(rng);

    const auto evaluate = [&](const std::vector<double>& q) {
      ++evals;
      return detail::sharpness_evaluate(
          cfg, a, detail::sharpness_materialize(q, cfg.perturbation, n, k, basis, target_norm),
          spec.sigma_indices);
    };

    const auto consider_best = [&](const detail::SharpnessEval& ev,
                                   const std::vector<double>& q) {
      if (ev.score <= best.best_objective) return;
      best.best_objective = ev.score;
      best.theta_exact = ev.theta;
      best.tightest_bound = ev.bound;
      best.dist_omega_Omega = ev.dist;
      best.a = a.matrix();
      best.v = detail::sharpness_materialize(q, cfg.perturbation, n, k, basis, target_norm)
                   .matrix();
      best.sigma_indices = spec.sigma_indices;
      best.trace.push_back({evals, cfg.objective == SharpnessObjective::GapDistance
                                       ? -ev.score
                                       : ev.score});
    };
    const auto evaluate_tracked = [&](const std::vector<double>& q) {
      const detail::SharpnessEval ev = evaluate(q);
      consider_best(ev, q);
      return ev;
    };
    const auto more = [&] { return evals < cfg.budget; };

    // simplex refinement restarted at shrinking scales around the incumbent
    for (const double scale : {0.7, 5e-2, 2e-3, 1e-4, 5e-6}) {
      if (!more()) break;
      auto [bx, bf] =
          detail::nelder_mead_maximize(evaluate_tracked, more, params, scale, rng);
      params = std::move(bx);
    }
  }
  best.evaluations = evals;
  if (cfg.objective == SharpnessObjective::GapDistance)
    best.best_objective = -best.best_objective;  // report the distance itself
  return best;
}

}  // namespace specsub
