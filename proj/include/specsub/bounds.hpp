#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "specsub/errors.hpp"
#include "specsub/partition.hpp"

namespace specsub {

// Thresholds on x = ||V||/d, each the exact constant of the theorem it gates.
namespace constants {

/// sin2theta theorem: optimal constant for the gap dispositions.
inline constexpr double kSin2ThetaThreshold = 0.5;
/// Admissible range of the generic (1/2)arcsin(pi x) estimate.
inline constexpr double kGenericPiThreshold = std::numbers::inv_pi;
/// Best published lower bound on the generic optimal constant c*
/// (guarantees theta < pi/2; no estimating function is attached here).
inline constexpr double kGenericConstantThreshold = 0.454839;
/// Universal gap-non-closing threshold for off-diagonal V with sigma in a
/// finite gap; the partition-specific sqrt(dD)/d is weaker and also admitted.
inline constexpr double kOffdiagGapUniversalThreshold = std::numbers::sqrt2;
/// Optimal gap-non-closing threshold for off-diagonal V, any disposition.
inline constexpr double kOffdiagGenericThreshold = std::numbers::sqrt3 / 2.0;
/// Best published lower bound on the off-diagonal generic optimal constant
/// for theta < pi/2. Documented only; certification never consumes it, since
/// the optimality argument lives in the cited literature.
inline constexpr double kOffdiagGenericAngleConstant = 0.675989;

}  // namespace constants

/// sin2theta estimate M(x) = (1/2) arcsin(2x) on [0, 1/2).
inline double m_sin2theta(double x) {
  if (!(x >= 0.0) || x >= constants::kSin2ThetaThreshold)
    fail(ErrorCode::DomainViolation,
         "m_sin2theta requires 0 <= x < 1/2, got " + detail::num_str(x));
  return 0.5 * std::asin(std::min(2.0 * x, 1.0));
}

/// Generic estimate M(x) = (1/2) arcsin(pi x) on [0, 1/pi]; reaches pi/4 at
/// the right endpoint.
inline double m_generic_pi(double x) {
  if (!(x >= 0.0) || x > constants::kGenericPiThreshold)
    fail(ErrorCode::DomainViolation,
         "m_generic_pi requires 0 <= x <= 1/pi, got " + detail::num_str(x));
  return 0.5 * std::asin(std::min(std::numbers::pi * x, 1.0));
}

/// tan2theta estimate M(x) = (1/2) arctan(2x) on [0, inf); stays below pi/4.
inline double m_tan2theta(double x) {
  if (!(x >= 0.0))
    fail(ErrorCode::DomainViolation, "m_tan2theta requires x >= 0, got " + detail::num_str(x));
  return 0.5 * std::atan(2.0 * x);
}

/// tantheta estimate M(x) = arctan(x) on [0, sqrt(2)); stays below arctan(sqrt(2)).
inline double m_tantheta(double x) {
  if (!(x >= 0.0) || x >= constants::kOffdiagGapUniversalThreshold)
    fail(ErrorCode::DomainViolation,
         "m_tantheta requires 0 <= x < sqrt(2), got " + detail::num_str(x));
  return std::atan(x);
}

/// Maximal a priori downward shift of the lowest level under an off-diagonal
/// perturbation: epsilon_V = ||V|| tan((1/2) arctan(2||V||/d)).
struct ShiftBound {
  double epsilon;  // epsilon_V >= 0; < norm_v for norm_v > 0; < d iff norm_v < sqrt(2) d
  double norm_v;
  double d;
};

inline ShiftBound epsilon_shift(double norm_v, double d) {
  if (!(d > 0.0)) fail(ErrorCode::DomainViolation, "epsilon_shift requires d > 0");
  if (!(norm_v >= 0.0)) fail(ErrorCode::DomainViolation, "epsilon_shift requires norm_v >= 0");
  const double x = norm_v / d;
  const double eps = norm_v * std::tan(0.5 * std::atan(2.0 * x));
  // algebraically equal route: (d/2)(sqrt(1+4x^2) - 1); disagreement flags a defect
  const double closed = 0.5 * d * (std::sqrt(1.0 + 4.0 * x * x) - 1.0);
  if (std::abs(eps - closed) > 1e-12 * (1.0 + std::abs(eps) + d))
    throw std::logic_error("epsilon_shift: trig and algebraic routes disagree: " +
                           std::to_string(eps) + " vs " + std::to_string(closed));
  return {eps, norm_v, d};
}

/// The catalog of a priori subspace-perturbation bounds.
enum class BoundKind {
  Sin2Theta,                 // gap dispositions, any V, x < 1/2
  GenericPi,                 // any disposition, any V, x <= 1/pi
  Tan2ThetaOffdiag,          // subordinated, off-diagonal V, any x
  TanThetaOffdiagGap,        // sigma in finite gap, off-diagonal V, x < sqrt(dD)/d
  GenericOffdiagThreshold,   // any disposition, off-diagonal V, x < sqrt(3)/2; condition only
  GenericConstantThreshold,  // any disposition, any V, x < 0.454839; condition only
};

inline const char* bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::Sin2Theta: return "sin2theta";
    case BoundKind::GenericPi: return "generic_pi";
    case BoundKind::Tan2ThetaOffdiag: return "tan2theta";
    case BoundKind::TanThetaOffdiagGap: return "tantheta";
    case BoundKind::GenericOffdiagThreshold: return "generic_offdiag_threshold";
    case BoundKind::GenericConstantThreshold: return "generic_constant_threshold";
  }
  return "unknown";
}

/// One evaluated bound: structural requirements, admissibility threshold on
/// x = ||V||/d, and (for the estimating kinds) the bound value itself.
/// Condition-only kinds certify a predicate (theta < pi/2, or
/// dist(omega, Omega) > 0) and never carry a bound value.
struct BoundEvaluation {
  BoundKind kind;
  bool requirements_met = false;  // disposition and perturbation-class requirements
  bool applicable = false;        // requirements_met and x within the threshold
  double condition_threshold = 0.0;
  std::optional<double> universal_threshold;  // tantheta: sqrt(2), reported alongside
  double x = 0.0;
  std::optional<double> bound_radians;
  std::optional<double> exact_radians;
  std::optional<double> margin;      // bound - exact; >= -margin tolerance when both present
  std::optional<bool> claim_holds;   // condition-only kinds, filled by the analyzer
  std::string note;
};

/// Evaluate every bound kind against a partition, perturbation class, and x.
/// Bound values are attached where applicable; exact angles and margins are
/// filled later by the analyzer.
inline std::vector<BoundEvaluation> applicability(const SpectralPartition& partition,
                                                  bool offdiagonal, double x) {
  if (!(x >= 0.0)) fail(ErrorCode::DomainViolation, "x must be nonnegative");
  const Disposition dispo = partition.disposition;
  const bool gap_disposition = dispo != Disposition::Generic;
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<BoundEvaluation> out;

  {
    BoundEvaluation b;
    b.kind = BoundKind::Sin2Theta;
    b.requirements_met = gap_disposition;
    b.condition_threshold = constants::kSin2ThetaThreshold;
    b.x = x;
    b.applicable = b.requirements_met && x < b.condition_threshold;
    if (b.applicable) b.bound_radians = m_sin2theta(x);
    if (!b.requirements_met) b.note = "requires a gap disposition";
    out.push_back(std::move(b));
  }
  {
    BoundEvaluation b;
    b.kind = BoundKind::GenericPi;
    b.requirements_met = true;
    b.condition_threshold = constants::kGenericPiThreshold;
    b.x = x;
    b.applicable = x <= b.condition_threshold;  // closed right endpoint
    if (b.applicable) b.bound_radians = m_generic_pi(x);
    out.push_back(std::move(b));
  }
  {
    BoundEvaluation b;
    b.kind = BoundKind::Tan2ThetaOffdiag;
    b.requirements_met = offdiagonal && dispo == Disposition::Subordinated;
    b.condition_threshold = inf;
    b.x = x;
    b.applicable = b.requirements_met;
    if (b.applicable) b.bound_radians = m_tan2theta(x);
    if (!b.requirements_met) b.note = "requires subordinated sets and off-diagonal V";
    out.push_back(std::move(b));
  }
  {
    BoundEvaluation b;
    b.kind = BoundKind::TanThetaOffdiagGap;
    b.requirements_met = offdiagonal && dispo == Disposition::SigmaInFiniteGap;
    b.x = x;
    b.universal_threshold = constants::kOffdiagGapUniversalThreshold;
    if (b.requirements_met && partition.gap) {
      // the partition-specific threshold sqrt(dD)/d = sqrt(D/d) >= sqrt(2)
      b.condition_threshold = std::sqrt(partition.gap->length / partition.separation);
      b.applicable = x < b.condition_threshold;
      // arctan(x) on the whole admitted range; beyond sqrt(2) it is dominated
      // by the stronger D-dependent estimate, so it remains a valid bound
      if (b.applicable) b.bound_radians = std::atan(x);
    } else {
      b.condition_threshold = constants::kOffdiagGapUniversalThreshold;
      b.note = "requires sigma inside a finite gap and off-diagonal V";
    }
    out.push_back(std::move(b));
  }
  {
    BoundEvaluation b;
    b.kind = BoundKind::GenericOffdiagThreshold;
    b.requirements_met = offdiagonal;
    b.condition_threshold = constants::kOffdiagGenericThreshold;
    b.x = x;
    b.applicable = b.requirements_met && x < b.condition_threshold;
    b.note = b.requirements_met
                 ? "condition only: certifies dist(omega, Omega) > 0; no angle bound attached"
                 : "requires off-diagonal V";
    out.push_back(std::move(b));
  }
  {
    BoundEvaluation b;
    b.kind = BoundKind::GenericConstantThreshold;
    b.requirements_met = true;
    b.condition_threshold = constants::kGenericConstantThreshold;
    b.x = x;
    b.applicable = x < b.condition_threshold;
    b.note = "condition only: certifies theta < pi/2; no finite angle bound attached";
    out.push_back(std::move(b));
  }
  return out;
}

/// Closed interval that must contain a perturbed level group, or open
/// interval that must contain no spectrum of H. Infinite endpoints allowed.
struct LabeledInterval {
  std::string label;
  double lo;
  double hi;
};

struct EnclosureSet {
  std::vector<LabeledInterval> confined;   // closed, must contain the stated levels
  std::vector<LabeledInterval> forbidden;  // open, must be spectrum-free
};

/// Enclosures for the subordinated case with sigma = the lowest levels and
/// off-diagonal V: omega stays in [E0 - eps, E_n], the gap up to min(Sigma)
/// stays empty, and spec(H) never dips below E0 - eps.
inline EnclosureSet enclosures_lowest_levels(const std::vector<double>& levels,
                                             double min_complement,
                                             const ShiftBound& shift) {
  if (levels.empty())
    fail(ErrorCode::DispositionMismatch, "no sigma levels given");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] < levels[i - 1])
      fail(ErrorCode::DomainViolation, "levels must be ascending");
  if (!(levels.back() < min_complement))
    fail(ErrorCode::DispositionMismatch,
         "sigma is not subordinated below the complement");
  const double inf = std::numeric_limits<double>::infinity();
  const double floor = levels.front() - shift.epsilon;
  EnclosureSet out;
  out.confined.push_back({"omega", floor, levels.back()});
  out.forbidden.push_back({"gap", levels.back(), min_complement});
  out.forbidden.push_back({"below_spectrum", -inf, floor});
  return out;
}

/// Enclosures for sigma inside a finite gap of Sigma with off-diagonal V and
/// ||V|| < sqrt(dD): omega stays within eps of sigma's hull, the flanking gap
/// segments stay empty, and spec(H) never dips below E0 - eps.
inline EnclosureSet enclosures_finite_gap(const SpectralPartition& partition,
                                          const ShiftBound& shift) {
  if (partition.disposition != Disposition::SigmaInFiniteGap || !partition.gap)
    fail(ErrorCode::DispositionMismatch, "sigma does not lie in a finite gap of Sigma");
  const GapBounds& gap = *partition.gap;
  const double limit = std::sqrt(shift.d * gap.length);
  if (!(shift.norm_v < limit))
    fail(ErrorCode::ConditionViolated,
         "||V|| = " + detail::num_str(shift.norm_v) + " is not below sqrt(dD) = " +
             detail::num_str(limit));
  const double inf = std::numeric_limits<double>::infinity();
  const double lo = partition.sigma_min() - shift.epsilon;
  const double hi = partition.sigma_max() + shift.epsilon;
  EnclosureSet out;
  out.confined.push_back({"omega", lo, hi});
  if (gap.lower < lo) out.forbidden.push_back({"gap_lower", gap.lower, lo});
  if (hi < gap.upper) out.forbidden.push_back({"gap_upper", hi, gap.upper});
  out.forbidden.push_back({"below_spectrum", -inf, partition.eigenvalues.front() - shift.epsilon});
  return out;
}

}  // namespace specsub
