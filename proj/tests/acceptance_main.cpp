// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code and enforces its own
// runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "specsub/specsub.hpp"
#include "test_support.hpp"

using namespace specsub;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
  int number;
  std::string title;
  double time_limit_seconds;
  std::function<void()> body;
};

int failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

void run(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  std::string error;
  try {
    c.body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (error.empty() && seconds > c.time_limit_seconds)
    error = "runtime " + std::to_string(seconds) + " s exceeds the " +
            std::to_string(c.time_limit_seconds) + " s budget";
  if (error.empty()) {
    std::printf("PASS criterion %d (%.2f s): %s\n", c.number, seconds, c.title.c_str());
  } else {
    ++failures;
    std::printf("FAIL criterion %d (%.2f s): %s\n  -> %s\n", c.number, seconds,
                c.title.c_str(), error.c_str());
  }
  std::fflush(stdout);
}

// ---------------------------------------------------------------------- 1

void criterion_constants() {
  using namespace constants;
  const long double pi_l = std::numbers::pi_v<long double>;
  check(kSin2ThetaThreshold == 0.5, "sin2theta threshold");
  check(std::abs(kGenericPiThreshold - static_cast<double>(1.0L / pi_l)) <= 1e-15,
        "1/pi threshold");
  check(kGenericConstantThreshold == 0.454839, "generic constant 0.454839");
  check(std::abs(kOffdiagGapUniversalThreshold -
                 static_cast<double>(std::sqrt(2.0L))) <= 1e-15,
        "sqrt(2) threshold");
  check(std::abs(kOffdiagGenericThreshold -
                 static_cast<double>(std::sqrt(3.0L) / 2.0L)) <= 1e-15,
        "sqrt(3)/2 threshold");
  check(kOffdiagGenericAngleConstant == 0.675989, "documented constant 0.675989");

  // 12-digit pins against decimal references
  check(std::abs(kGenericPiThreshold - 0.318309886183791) <= 1e-12, "1/pi digits");
  check(std::abs(kOffdiagGapUniversalThreshold - 1.41421356237310) <= 1e-12,
        "sqrt(2) digits");
  check(std::abs(kOffdiagGenericThreshold - 0.866025403784439) <= 1e-12,
        "sqrt(3)/2 digits");

  const int grid = 1000;
  for (int i = 0; i <= grid; ++i) {
    const double t = static_cast<double>(i) / grid;
    {
      const double x = 0.4999999 * t;
      const double oracle =
          static_cast<double>(0.5L * std::asin(std::min(2.0L * (long double)x, 1.0L)));
      check(std::abs(m_sin2theta(x) - oracle) <= 1e-12 * std::max(1.0, oracle),
            "m_sin2theta grid at x=" + std::to_string(x));
    }
    {
      const double x = std::numbers::inv_pi * t;
      const double oracle = static_cast<double>(
          0.5L * std::asin(std::min(pi_l * (long double)x, 1.0L)));
      check(std::abs(m_generic_pi(x) - oracle) <= 1e-12 * std::max(1.0, oracle),
            "m_generic_pi grid at x=" + std::to_string(x));
    }
    {
      const double x = 25.0 * t;
      const double oracle = static_cast<double>(0.5L * std::atan(2.0L * (long double)x));
      check(std::abs(m_tan2theta(x) - oracle) <= 1e-12 * std::max(1.0, oracle),
            "m_tan2theta grid at x=" + std::to_string(x));
    }
    {
      const double x = 1.41421356 * t;
      const double oracle = static_cast<double>(std::atan((long double)x));
      check(std::abs(m_tantheta(x) - oracle) <= 1e-12 * std::max(1.0, oracle),
            "m_tantheta grid at x=" + std::to_string(x));
    }
    for (const double d : {0.3, 1.0, 7.0}) {
      const double v = 10.0 * t * d;
      const ShiftBound s = epsilon_shift(v, d);
      const double x = v / d;
      const double closed = 0.5 * d * (std::sqrt(1.0 + 4.0 * x * x) - 1.0);
      check(std::abs(s.epsilon - closed) <= 1e-12 * (1.0 + s.epsilon),
            "epsilon_shift closed form at v=" + std::to_string(v));
    }
  }
}

// ---------------------------------------------------------------------- 2

void criterion_sharp_tan2theta() {
  RealVector d(2);
  d << 0.0, 1.0;
  Matrix vm(2, 2);
  vm << 0.0, 0.5, 0.5, 0.0;
  const AnalysisReport r =
      analyze(HermitianOperator::diagonal(d), HermitianOperator(vm), {0});
  check(std::abs(r.theta_exact - kPi / 8.0) <= 1e-10,
        "theta_exact = pi/8 +- 1e-10, got " + std::to_string(r.theta_exact));
  bool saw = false;
  for (const auto& b : r.bounds)
    if (b.kind == BoundKind::Tan2ThetaOffdiag) {
      saw = true;
      check(b.applicable && b.margin.has_value(), "tan2theta applicable");
      check(std::abs(*b.margin) <= 1e-10, "tan2theta margin <= 1e-10");
    }
  check(saw, "tan2theta evaluated");
  const double eps = epsilon_shift(0.5, 1.0).epsilon;
  check(std::abs(r.spec_h.front() - (0.0 - eps)) <= 1e-12,
        "E0' = E0 - epsilon_V +- 1e-12");
  check(r.certified, "instance certified");
}

// ---------------------------------------------------------------------- 3

void criterion_sharp_sin2theta() {
  RealVector d(2);
  d << 0.0, 1.0;
  const HermitianOperator a = HermitianOperator::diagonal(d);
  Matrix vm(2, 2);
  vm << 0.5, std::numbers::sqrt3 / 2.0, std::numbers::sqrt3 / 2.0, -0.5;
  const AnalysisReport r = analyze(a, 0.25 * HermitianOperator(vm), {0});
  check(std::abs(r.theta_exact - kPi / 12.0) <= 1e-8, "theta_exact = pi/12 +- 1e-8");
  for (const auto& b : r.bounds)
    if (b.kind == BoundKind::Sin2Theta)
      check(b.applicable && std::abs(*b.margin) <= 1e-8, "sin2theta margin <= 1e-8");

  // brute-force direction scan: no 2x2 Hermitian V of norm 0.25 rotates the
  // ground state further than pi/12
  std::mt19937_64 rng(0xACC3);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    HermitianOperator v(testing::random_complex_hermitian(2, rng));
    const double norm = operator_norm(v);
    if (norm < 1e-12) continue;
    v = (0.25 / norm) * v;
    const AnalysisReport rep = analyze(a, v, {0});
    worst = std::max(worst, rep.theta_exact);
  }
  check(worst <= kPi / 12.0 + 1e-8,
        "scan max theta " + std::to_string(worst) + " exceeds pi/12 + 1e-8");
}

// ---------------------------------------------------------------------- 4

EnsembleConfig ensemble(int n, Disposition dispo, int k, std::vector<double> grid,
                        int trials, PerturbationClass pclass, std::uint64_t seed) {
  EnsembleConfig cfg;
  cfg.dimension = n;
  cfg.disposition = dispo;
  cfg.sigma_size = k;
  cfg.enforced_d = 0.35;
  cfg.x_grid = std::move(grid);
  cfg.trials = trials;
  cfg.perturbation = pclass;
  cfg.seed = seed;
  return cfg;
}

void criterion_ensembles() {
  const int dims[] = {4, 8, 12};
  std::size_t count_a = 0, count_b = 0, count_c = 0, count_d = 0, count_e = 0;

  // (a) general V, gap dispositions, x < 1/2
  for (Disposition dispo : {Disposition::Subordinated, Disposition::SigmaInFiniteGap,
                            Disposition::ComplementInFiniteGap})
    for (int n : dims) {
      const auto records =
          sweep(ensemble(n, dispo, 2, {0.05, 0.15, 0.25, 0.35, 0.45, 0.49}, 187,
                         PerturbationClass::General, 0xA001 + n));
      for (const auto& r : records) {
        ++count_a;
        check(r.error.empty(), "4a: trial error: " + r.error);
        check(r.margin_sin2theta && *r.margin_sin2theta >= -1e-8,
              "4a: sin2theta margin at x=" + std::to_string(r.x));
        check(r.theta_exact <= kPi / 4.0 + 1e-8, "4a: 45 degree cap");
      }
    }
  check(count_a >= 10000, "4a: fewer than 1e4 instances");

  // (b) general V, any disposition, x <= 1/pi and the 0.4548 regime
  for (Disposition dispo : {Disposition::Subordinated, Disposition::SigmaInFiniteGap,
                            Disposition::ComplementInFiniteGap, Disposition::Generic})
    for (int n : dims) {
      const auto records = sweep(ensemble(
          n, dispo, 2, {0.02, 0.1, 0.2, 0.3, 0.318, 0.4, 0.454}, 120,
          PerturbationClass::General, 0xB001 + n));
      for (const auto& r : records) {
        ++count_b;
        check(r.error.empty(), "4b: trial error: " + r.error);
        if (r.x <= std::numbers::inv_pi)
          check(r.margin_generic_pi && *r.margin_generic_pi >= -1e-8,
                "4b: generic_pi margin at x=" + std::to_string(r.x));
        if (r.x < 0.4548)
          check(r.theta_exact < kPi / 2.0, "4b: ||P-Q|| < 1 at x=" + std::to_string(r.x));
      }
    }
  check(count_b >= 10000, "4b: fewer than 1e4 instances");

  // (c) off-diagonal subordinated, x in [0, 10]
  for (int k : {1, 2})
    for (int n : dims) {
      const auto records = sweep(ensemble(
          n, Disposition::Subordinated, k, {0.0, 0.1, 0.3, 0.5, 1.0, 2.0, 5.0, 10.0}, 209,
          PerturbationClass::OffDiagonal, 0xC001 + n + 16 * k));
      for (const auto& r : records) {
        ++count_c;
        check(r.error.empty(), "4c: trial error: " + r.error);
        check(r.margin_tan2theta && *r.margin_tan2theta >= -1e-8,
              "4c: tan2theta margin at x=" + std::to_string(r.x));
        check(r.enclosures_pass && *r.enclosures_pass,
              "4c: enclosure failed at x=" + std::to_string(r.x));
        check(r.certified, "4c: not certified at x=" + std::to_string(r.x));
      }
    }
  check(count_c >= 10000, "4c: fewer than 1e4 instances");

  // (d) off-diagonal sigma in a finite gap, x < sqrt(dD)/d per draw
  std::size_t beyond_sqrt2 = 0;
  for (int k : {1, 2})
    for (int n : dims)
      for (int trial = 0; trial < 240; ++trial)
        for (const double f : {0.1, 0.3, 0.5, 0.7, 0.85, 0.95, 0.99}) {
          Rng rng(derive_seed(0xD001 + n + 16 * k, trial,
                              static_cast<std::uint64_t>(f * 1000)));
          const auto spec = spectrum_with_disposition(
              n, k, Disposition::SigmaInFiniteGap, 0.35, rng);
          const HermitianOperator a = random_hermitian_with_spectrum(spec.values, rng);
          const EigenDecomposition eig_a = eigh(a);
          const OrthogonalProjection p = spectral_projection(eig_a, spec.sigma_indices);
          const SpectralPartition part = build_partition(eig_a, spec.sigma_indices);
          const double x_max = std::sqrt(part.gap->length / part.separation);
          const double x = f * x_max;
          const HermitianOperator v = random_perturbation(
              a.n(), x * part.separation, PerturbationClass::OffDiagonal, rng, &p);
          const AnalysisReport r = analyze(a, v, spec.sigma_indices);
          ++count_d;
          if (r.x > std::numbers::sqrt2) ++beyond_sqrt2;
          bool saw_tantheta = false;
          for (const auto& b : r.bounds)
            if (b.kind == BoundKind::TanThetaOffdiagGap) {
              saw_tantheta = true;
              check(b.applicable && b.margin.has_value(), "4d: tantheta applicable");
              check(*b.margin >= -1e-8, "4d: tantheta margin at x=" + std::to_string(r.x));
            }
          check(saw_tantheta, "4d: tantheta evaluated");
          bool saw_lower = false, saw_upper = false;
          for (const auto& c : r.enclosure_checks) {
            check(c.pass, "4d: enclosure " + c.label + " at x=" + std::to_string(r.x));
            if (c.label == "gap_lower") saw_lower = true;
            if (c.label == "gap_upper") saw_upper = true;
          }
          // the flanking intervals may be absent only when epsilon swallows
          // the corresponding gap segment
          const double eps = epsilon_shift(r.norm_v, part.separation).epsilon;
          if (part.sigma_min() - eps > part.gap->lower)
            check(saw_lower, "4d: lower forbidden interval checked");
          if (part.sigma_max() + eps < part.gap->upper)
            check(saw_upper, "4d: upper forbidden interval checked");
          check(r.certified, "4d: not certified at x=" + std::to_string(r.x));
        }
  check(count_d >= 10000, "4d: fewer than 1e4 instances");
  check(beyond_sqrt2 > 500, "4d: the x > sqrt(2) regime was not exercised");

  // (e) off-diagonal generic, x <= 0.86: components stay disjoint
  for (int n : dims) {
    const auto records = sweep(ensemble(n, Disposition::Generic, 2,
                                        {0.1, 0.3, 0.5, 0.7, 0.86}, 667,
                                        PerturbationClass::OffDiagonal, 0xE001 + n));
    for (const auto& r : records) {
      ++count_e;
      check(r.error.empty(), "4e: trial error: " + r.error);
      check(r.dist_omega_Omega > 0.0, "4e: components touched at x=" + std::to_string(r.x));
    }
  }
  check(count_e >= 10000, "4e: fewer than 1e4 instances");

  std::printf("  [4] instances: a=%zu b=%zu c=%zu d=%zu (%zu beyond sqrt2) e=%zu\n",
              count_a, count_b, count_c, count_d, beyond_sqrt2, count_e);
}

// ---------------------------------------------------------------------- 5

void criterion_rank_one_identity() {
  std::mt19937_64 seeds(0x5001);
  for (int trial = 0; trial < 1000; ++trial) {
    Rng rng(seeds());
    const std::size_t n = trial % 2 ? 4 : 8;
    const Disposition dispo =
        trial % 3 ? Disposition::Subordinated : Disposition::SigmaInFiniteGap;
    const auto spec = spectrum_with_disposition(n, 1, dispo, 0.4, rng);
    const HermitianOperator a = random_hermitian_with_spectrum(spec.values, rng);
    std::uniform_real_distribution<double> uni(0.0, 0.49);
    const HermitianOperator v =
        random_perturbation(n, uni(rng) * 0.4, PerturbationClass::General, rng);
    const AnalysisReport r = analyze(a, v, spec.sigma_indices);
    check(r.omega_indices.size() == 1, "5: omega is rank one");

    // test-side overlap oracle from the raw eigenvectors
    const EigenDecomposition ea = eigh(a);
    const EigenDecomposition eh = eigh(a + v);
    const Complex overlap =
        (ea.vectors.col(static_cast<Eigen::Index>(spec.sigma_indices[0])).adjoint() *
         eh.vectors.col(static_cast<Eigen::Index>(r.omega_indices[0])))(0, 0);
    const double expected = std::acos(std::min(1.0, std::abs(overlap)));
    check(std::abs(r.theta_exact - expected) <= 1e-10,
          "5: identity violated by " + std::to_string(std::abs(r.theta_exact - expected)));
    if (r.ground_state_overlap)
      check(std::abs(*r.ground_state_overlap - std::abs(overlap)) <= 1e-10,
            "5: reported overlap mismatch");
  }
}

// ---------------------------------------------------------------------- 6

void criterion_offdiagonal_split() {
  std::mt19937_64 rng(0x6001);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 4 + rng() % 9;
    const std::size_t rank = 1 + rng() % (n - 1);
    const HermitianOperator v(testing::random_complex_hermitian(n, rng));
    const OrthogonalProjection p = testing::random_projection(n, rank, rng);
    const OffDiagonalSplit s = offdiagonal_split(v, p);
    check(detail::max_abs(s.v_diag.matrix() + s.v_offdiag.matrix() - v.matrix()) <= 1e-14,
          "6: reconstruction");
    check(s.anticommutator_residual <= 1e-12, "6: anticommutator residual");
    check(operator_norm(s.v_offdiag) <= operator_norm(v) + 1e-10, "6: norm contraction");
  }
}

// ---------------------------------------------------------------------- 7

void criterion_few_body() {
  FewBodyConfig box;
  box.grid_points = 99;
  box.box_length = 1.0;
  box.kind = FewBodyConfig::Kind::RankOne;
  box.amplitude = 0.0;
  box.profile = box_mode_profile(99, 1);
  box.lowest_k = 1;
  const double e0 = eigh(few_body_hamiltonian(box).a).values(0);
  const double pi2 = kPi * kPi;
  check(std::abs(e0 - pi2) / pi2 < 0.005, "7: box ground level within 0.5% of pi^2");

  box.amplitude = -0.7;
  check(std::abs(operator_norm(few_body_hamiltonian(box).v) - 0.7) <= 1e-12,
        "7: rank-one norm identity");

  FewBodyConfig local;
  local.grid_points = 99;
  local.box_length = 1.0;
  local.kind = FewBodyConfig::Kind::LocalPotential;
  local.local_samples.assign(99, 0.05);
  local.local_samples[40] = -0.3;
  local.lowest_k = 1;
  check(std::abs(operator_norm(few_body_hamiltonian(local).v) - 0.3) <= 1e-12,
        "7: local potential norm identity");
}

// ---------------------------------------------------------------------- 8

void criterion_determinism() {
  const std::string bin = SPECSUB_CLI_BIN;
  const std::string cfg =
      std::string(SPECSUB_CONFIG_DIR) + "/sweep_subordinated_offdiag.json";
  const std::string out1 = "/tmp/specsub_acceptance_run1.csv";
  const std::string out2 = "/tmp/specsub_acceptance_run2.csv";
  for (const std::string& out : {out1, out2}) {
    const std::string cmd =
        "\"" + bin + "\" sweep --config \"" + cfg + "\" --out " + out + " > /dev/null";
    const int rc = std::system(cmd.c_str());
    check(rc == 0, "8: sweep exited with status " + std::to_string(rc));
  }
  const std::string a = read_file(out1);
  const std::string b = read_file(out2);
  check(!a.empty(), "8: empty CSV");
  check(a == b, "8: reruns differ");
  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

// ---------------------------------------------------------------------- 9

void criterion_disclosure() {
  // guarantee side only: these constants gate certification (or are carried
  // as documentation); their optimality is not re-proven here
  check(constants::kGenericConstantThreshold == 0.454839, "9: 0.454839 present");
  check(constants::kOffdiagGenericAngleConstant == 0.675989, "9: 0.675989 present");
  check(constants::kOffdiagGenericThreshold == std::numbers::sqrt3 / 2.0,
        "9: sqrt(3)/2 present");
  const std::string readme = read_file(std::string(SPECSUB_CONFIG_DIR) + "/../README.md");
  check(readme.find("0.454839") != std::string::npos, "9: README documents 0.454839");
  check(readme.find("0.675989") != std::string::npos, "9: README documents 0.675989");
  check(readme.find("reported, not asserted") != std::string::npos,
        "9: README carries the sharpness disclosure");
  std::printf("  [9] optimality of 0.454839, 0.675989, and sqrt(3)/2 rests on the cited "
              "literature; this artifact verifies the guarantee side and reports "
              "sharpness-search output without asserting it\n");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "constant pinning and estimating-function grids", 1.0, criterion_constants},
      {2, "sharp 2x2 tan2theta / epsilon_V instance", 1.0, criterion_sharp_tan2theta},
      {3, "sharp 2x2 sin2theta instance with brute-force scan", 10.0,
       criterion_sharp_sin2theta},
      {4, "ensemble theorem suite (five regimes, >= 1e4 instances each)", 300.0,
       criterion_ensembles},
      {5, "rank-one identity over 1e3 instances", 30.0, criterion_rank_one_identity},
      {6, "off-diagonal split over 1e3 instances", 30.0, criterion_offdiagonal_split},
      {7, "few-body model sanity", 10.0, criterion_few_body},
      {8, "sweep determinism: byte-identical CSV reruns", 60.0, criterion_determinism},
      {9, "sharpness disclosure: guarantee side only", 5.0, criterion_disclosure},
  };
  for (const auto& c : criteria) run(c);
  if (failures)
    std::printf("%d criterion(s) FAILED\n", failures);
  else
    std::printf("all %zu criteria passed\n", criteria.size());
  return failures == 0 ? 0 : 1;
}
