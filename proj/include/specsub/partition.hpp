#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "specsub/errors.hpp"
#include "specsub/hermitian.hpp"
#include "specsub/tolerances.hpp"

namespace specsub {

/// Mutual arrangement of sigma and its complement Sigma on the real line.
enum class Disposition {
  Subordinated,            // max(sigma) < min(Sigma) or max(Sigma) < min(sigma)
  SigmaInFiniteGap,        // Sigma has points on both sides, none inside sigma's hull
  ComplementInFiniteGap,   // the symmetric arrangement
  Generic,
};

inline const char* disposition_name(Disposition d) {
  switch (d) {
    case Disposition::Subordinated: return "subordinated";
    case Disposition::SigmaInFiniteGap: return "sigma_in_finite_gap";
    case Disposition::ComplementInFiniteGap: return "complement_in_finite_gap";
    case Disposition::Generic: return "generic";
  }
  return "unknown";
}

inline Disposition disposition_from_name(const std::string& s) {
  if (s == "subordinated") return Disposition::Subordinated;
  if (s == "sigma_in_finite_gap") return Disposition::SigmaInFiniteGap;
  if (s == "complement_in_finite_gap") return Disposition::ComplementInFiniteGap;
  if (s == "generic") return Disposition::Generic;
  fail(ErrorCode::ConfigInvalid, "unknown disposition \"" + s + "\"");
}

/// Finite gap of Sigma that sigma sits in: (lower, upper) = (max Sigma_-, min Sigma_+).
struct GapBounds {
  double lower;
  double upper;
  double length;  // D = upper - lower
};

/// The partition spec(A) = sigma u Sigma with its separation distance d,
/// disposition, and (for the finite-gap case) the gap data.
struct SpectralPartition {
  std::vector<double> eigenvalues;  // ascending
  IndexSet sigma_indices;           // sorted, nonempty, proper
  double separation = 0.0;          // d = dist(sigma, Sigma) > 0
  Disposition disposition = Disposition::Generic;
  std::optional<GapBounds> gap;     // present only for SigmaInFiniteGap

  std::size_t n() const { return eigenvalues.size(); }
  bool in_sigma(std::size_t i) const {
    return std::binary_search(sigma_indices.begin(), sigma_indices.end(), i);
  }
  std::vector<double> sigma_values() const {
    std::vector<double> v;
    v.reserve(sigma_indices.size());
    for (std::size_t i : sigma_indices) v.push_back(eigenvalues[i]);
    return v;
  }
  std::vector<double> complement_values() const {
    std::vector<double> v;
    v.reserve(n() - sigma_indices.size());
    for (std::size_t i = 0; i < n(); ++i)
      if (!in_sigma(i)) v.push_back(eigenvalues[i]);
    return v;
  }
  double sigma_min() const { return eigenvalues[sigma_indices.front()]; }
  double sigma_max() const { return eigenvalues[sigma_indices.back()]; }
  double spectral_radius() const {
    return std::max(std::abs(eigenvalues.front()), std::abs(eigenvalues.back()));
  }
};

/// Separation distance, disposition class, and gap data for a given index
/// partition of an ascending spectrum.
inline SpectralPartition build_partition(const std::vector<double>& eigenvalues,
                                         const IndexSet& sigma_indices,
                                         const Tolerances& tol = {}) {
  const std::size_t n = eigenvalues.size();
  if (n < 2) fail(ErrorCode::EmptySet, "need at least two eigenvalues to partition");
  for (std::size_t i = 1; i < n; ++i)
    if (eigenvalues[i] < eigenvalues[i - 1])
      fail(ErrorCode::DomainViolation, "eigenvalues must be ascending");

  SpectralPartition part;
  part.eigenvalues = eigenvalues;
  part.sigma_indices = detail::normalize_index_set(sigma_indices, n, "sigma");
  if (part.sigma_indices.empty() || part.sigma_indices.size() == n)
    fail(ErrorCode::EmptySet, "sigma and its complement must both be nonempty");

  const double scale = 1.0 + std::max(std::abs(eigenvalues.front()),
                                      std::abs(eigenvalues.back()));
  const double deg_tol = tol.degeneracy * scale;

  // min cross-set distance is attained at an adjacent pair of the sorted
  // spectrum whose memberships differ; an index set splitting a degenerate
  // group therefore lands here as ZeroSeparation
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n; ++i)
    if (part.in_sigma(i) != part.in_sigma(i - 1))
      d = std::min(d, eigenvalues[i] - eigenvalues[i - 1]);
  if (!(d > deg_tol))
    fail(ErrorCode::ZeroSeparation,
         "dist(sigma, Sigma) = " + detail::num_str(d) + " is below the degeneracy tolerance");
  part.separation = d;

  const auto sigma = part.sigma_values();
  const auto comp = part.complement_values();
  const double smin = sigma.front(), smax = sigma.back();
  const double cmin = comp.front(), cmax = comp.back();

  const auto none_inside = [](const std::vector<double>& pts, double lo, double hi) {
    for (double p : pts)
      if (p > lo && p < hi) return false;
    return true;
  };

  if (smax < cmin || cmax < smin) {
    part.disposition = Disposition::Subordinated;
  } else if (cmin < smin && cmax > smax && none_inside(comp, smin, smax)) {
    part.disposition = Disposition::SigmaInFiniteGap;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (double p : comp) {
      if (p < smin) lower = std::max(lower, p);
      if (p > smax) upper = std::min(upper, p);
    }
    part.gap = GapBounds{lower, upper, upper - lower};
  } else if (smin < cmin && smax > cmax && none_inside(sigma, cmin, cmax)) {
    part.disposition = Disposition::ComplementInFiniteGap;
  } else {
    part.disposition = Disposition::Generic;
  }
  return part;
}

inline SpectralPartition build_partition(const EigenDecomposition& eig,
                                         const IndexSet& sigma_indices,
                                         const Tolerances& tol = {}) {
  return build_partition(eig.values_vector(), sigma_indices, tol);
}

/// spec(H) split by the closed ||V||-neighborhoods of sigma and Sigma.
/// An eigenvalue inside both neighborhoods is ambiguity data, not an error;
/// one inside neither is flagged escaped and parked in Omega.
struct PerturbedComponents {
  std::vector<double> omega;      // assigned to sigma's neighborhood only
  std::vector<double> Omega;      // assigned to Sigma's neighborhood (or escaped)
  std::vector<double> ambiguous;  // inside both neighborhoods
  IndexSet omega_indices;
  IndexSet Omega_indices;
  IndexSet ambiguous_indices;
  IndexSet escaped_indices;       // subset of Omega_indices
  double dist_omega_Omega = std::numeric_limits<double>::infinity();
};

inline PerturbedComponents perturbed_components(const std::vector<double>& spec_h,
                                                const SpectralPartition& partition,
                                                double norm_v,
                                                const Tolerances& tol = {}) {
  if (!(norm_v >= 0.0)) fail(ErrorCode::DomainViolation, "norm_v must be nonnegative");
  const auto sigma = partition.sigma_values();
  const auto comp = partition.complement_values();
  const auto dist_to = [](const std::vector<double>& set, double x) {
    double d = std::numeric_limits<double>::infinity();
    for (double s : set) d = std::min(d, std::abs(x - s));
    return d;
  };

  PerturbedComponents out;
  const double reach = norm_v + tol.neighborhood;  // closed neighborhoods, slack on the boundary
  for (std::size_t i = 0; i < spec_h.size(); ++i) {
    const double mu = spec_h[i];
    const bool in_sigma = dist_to(sigma, mu) <= reach;
    const bool in_comp = dist_to(comp, mu) <= reach;
    if (in_sigma && in_comp) {
      out.ambiguous.push_back(mu);
      out.ambiguous_indices.push_back(i);
    } else if (in_sigma) {
      out.omega.push_back(mu);
      out.omega_indices.push_back(i);
    } else {
      if (!in_comp) out.escaped_indices.push_back(i);
      out.Omega.push_back(mu);
      out.Omega_indices.push_back(i);
    }
  }
  for (double a : out.omega)
    for (double b : out.Omega)
      out.dist_omega_Omega = std::min(out.dist_omega_Omega, std::abs(a - b));
  return out;
}

}  // namespace specsub
