#pragma once

#include <cstdint>
#include <vector>

#include "hrn/network.hpp"
#include "hrn/params.hpp"

namespace hrn {

enum class Direction : std::uint8_t { In, Out };

/// Degree histograms N_m^in, N_m^out, indexed by degree m.
struct DegreeCounts {
  std::vector<std::uint64_t> in_counts;
  std::vector<std::uint64_t> out_counts;
  std::uint64_t n_nodes = 0;
  std::uint64_t n_edges = 0;

  const std::vector<std::uint64_t>& counts(Direction d) const noexcept {
    return d == Direction::In ? in_counts : out_counts;
  }
  /// N_m, zero beyond the histogram.
  std::uint64_t count(Direction d, std::size_t m) const noexcept;

  friend bool operator==(const DegreeCounts&, const DegreeCounts&) = default;
};

DegreeCounts degree_counts(const NetworkState& state);

/// Builds counts from sparse (m, N_m) pairs; n_nodes and n_edges are derived.
DegreeCounts degree_counts_from_histograms(const std::vector<std::uint64_t>& in_counts,
                                           const std::vector<std::uint64_t>& out_counts);

/// N_{>m} for m = 0 .. max degree (last entry is 0).
std::vector<std::uint64_t> strict_tail_counts(const DegreeCounts& counts, Direction d);

struct CcdfPoint {
  std::uint64_t m;
  double value;  // N_{>m} / n_nodes

  friend bool operator==(const CcdfPoint&, const CcdfPoint&) = default;
};

/// Empirical tail P(D > m) for m = 0 .. max degree - 1; every value is > 0.
std::vector<CcdfPoint> ccdf(const DegreeCounts& counts, Direction d);

/// Negative binomial pmf Gamma(r+m)/(Gamma(r) m!) q^r (1-q)^m, the law with
/// generating function q^r (1 - (1-q) s)^{-r}. Non-integer r is supported.
/// Throws std::domain_error unless r > 0 and 0 < q <= 1.
double nb_pmf(double r, double q, std::uint64_t m);

/// E[nb_pmf(r, exp(-T), m)] for T ~ Exp(rate), in closed form:
///   rate * Gamma(r+m)/(Gamma(r) m!) * B(rate + r, m + 1).
double nb_exponential_mixture_pmf(double r, double rate, std::uint64_t m);

/// The same expectation by adaptive composite Gauss-Legendre quadrature over
/// t in (0, t_max). Independent check on the closed form.
double nb_exponential_mixture_pmf_quadrature(double r, double rate, std::uint64_t m);

/// Limiting per-edge degree frequencies psi_m^in, psi_m^out of the
/// three-scenario model:
///   psi_m^in = alpha P(NB(dt_in, e^{-T_in}) = m) + gamma P(1 + NB(1 + dt_in, e^{-T_in}) = m)
/// (out analogous), where dt are the effective offsets and T the exponential
/// clocks of derived_constants().
struct LimitPmf {
  std::vector<double> psi_in;
  std::vector<double> psi_out;
  std::size_t truncation_m = 0;  // entries cover m = 0 .. truncation_m
  bool mass_certified = false;   // partial masses reached (alpha+gamma) - mass_tolerance
  HybridParams params;

  const std::vector<double>& psi(Direction d) const noexcept {
    return d == Direction::In ? psi_in : psi_out;
  }
};

struct LimitPmfOptions {
  std::size_t m_max = 200;
  bool adaptive = true;         // extend past m_max until the mass is certified
  double mass_tolerance = 1e-8;
  std::size_t hard_limit = std::size_t{1} << 24;
};

/// Closed form. Throws ValidationError when p = 0 or when xi/eta are nonzero
/// (the limit law covers the three-scenario model only).
LimitPmf limit_pmf(const HybridParams& params, const LimitPmfOptions& options = {});

/// Quadrature evaluation of the same limit for m = 0 .. m_max (no extension).
LimitPmf limit_pmf_quadrature(const HybridParams& params, std::size_t m_max);

/// One trajectory: degree of a fixed node at increasing checkpoints n.
struct DegreeTrajectory {
  std::vector<std::uint64_t> steps;
  std::vector<std::uint64_t> degrees;
};

struct GrowthDiagnostic {
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::vector<double>> normalized;  // [replicate][checkpoint] D(n) / n^c
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> supremum;
  /// |mean(last) - mean(second to last)| / mean(second to last).
  double stabilization = 0.0;
};

/// All trajectories must share the same checkpoints.
GrowthDiagnostic growth_diagnostic(const std::vector<DegreeTrajectory>& trajectories,
                                   double exponent);

}  // namespace hrn
