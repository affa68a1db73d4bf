#include "hrn/degree_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace hrn {

std::uint64_t DegreeCounts::count(Direction d, std::size_t m) const noexcept {
  const auto& c = counts(d);
  return m < c.size() ? c[m] : 0;
}

namespace {

std::vector<std::uint64_t> histogram(std::span<const std::uint64_t> degrees) {
  std::uint64_t max_degree = 0;
  for (auto d : degrees) max_degree = std::max(max_degree, d);
  std::vector<std::uint64_t> h(degrees.empty() ? 0 : max_degree + 1, 0);
  for (auto d : degrees) ++h[d];
  return h;
}

std::uint64_t first_moment(const std::vector<std::uint64_t>& h) {
  std::uint64_t total = 0;
  for (std::size_t m = 0; m < h.size(); ++m) total += m * h[m];
  return total;
}

void trim(std::vector<std::uint64_t>& h) {
  while (!h.empty() && h.back() == 0) h.pop_back();
}

}  // namespace

DegreeCounts degree_counts(const NetworkState& state) {
  DegreeCounts out;
  out.in_counts = histogram(state.in_degrees());
  out.out_counts = histogram(state.out_degrees());
  out.n_nodes = state.node_count();
  out.n_edges = state.total_edges();
  return out;
}

DegreeCounts degree_counts_from_histograms(const std::vector<std::uint64_t>& in_counts,
                                           const std::vector<std::uint64_t>& out_counts) {
  DegreeCounts out;
  out.in_counts = in_counts;
  out.out_counts = out_counts;
  trim(out.in_counts);
  trim(out.out_counts);
  const auto nodes_in = std::accumulate(out.in_counts.begin(), out.in_counts.end(), std::uint64_t{0});
  const auto nodes_out =
      std::accumulate(out.out_counts.begin(), out.out_counts.end(), std::uint64_t{0});
  const auto edges_in = first_moment(out.in_counts);
  const auto edges_out = first_moment(out.out_counts);
  if (nodes_in != nodes_out || edges_in != edges_out) {
    throw std::invalid_argument("in- and out-histograms disagree on node or edge totals");
  }
  out.n_nodes = nodes_in;
  out.n_edges = edges_in;
  return out;
}

std::vector<std::uint64_t> strict_tail_counts(const DegreeCounts& counts, Direction d) {
  const auto& h = counts.counts(d);
  std::vector<std::uint64_t> tail(h.size(), 0);
  std::uint64_t above = 0;
  for (std::size_t m = h.size(); m-- > 0;) {
    tail[m] = above;
    above += h[m];
  }
  return tail;
}

std::vector<CcdfPoint> ccdf(const DegreeCounts& counts, Direction d) {
  std::vector<CcdfPoint> out;
  if (counts.n_nodes == 0) return out;
  const auto tail = strict_tail_counts(counts, d);
  const auto nodes = static_cast<double>(counts.n_nodes);
  for (std::size_t m = 0; m < tail.size() && tail[m] > 0; ++m) {
    out.push_back({m, static_cast<double>(tail[m]) / nodes});
  }
  return out;
}

double nb_pmf(double r, double q, std::uint64_t m) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("nb_pmf: r must be positive");
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("nb_pmf: q must lie in (0, 1]");
  if (q == 1.0) return m == 0 ? 1.0 : 0.0;
  const double mm = static_cast<double>(m);
  const double log_coef =
      boost::math::lgamma(r + mm) - boost::math::lgamma(r) - boost::math::lgamma(mm + 1.0);
  return std::exp(log_coef + r * std::log(q) + mm * std::log1p(-q));
}

double nb_exponential_mixture_pmf(double r, double rate, std::uint64_t m) {
  if (!(r > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("nb_exponential_mixture_pmf: r and rate must be positive");
  }
  const double mm = static_cast<double>(m);
  // rate * Gamma(r+m) Gamma(rate+r) / (Gamma(r) Gamma(rate+r+m+1))
  const double upper = boost::math::tgamma_delta_ratio(r + mm, rate + 1.0);
  const double lower = boost::math::tgamma_delta_ratio(r, rate);
  return rate * upper / lower;
}

double nb_exponential_mixture_pmf_quadrature(double r, double rate, std::uint64_t m) {
  if (!(r > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("nb_exponential_mixture_pmf_quadrature: r and rate must be positive");
  }
  const double mm = static_cast<double>(m);
  const double log_coef =
      boost::math::lgamma(r + mm) - boost::math::lgamma(r) - boost::math::lgamma(mm + 1.0);
  auto integrand = [&](double t) {
    if (t <= 0.0) return m == 0 ? rate : 0.0;
    // log of rate e^{-rate t} e^{-r t} (1 - e^{-t})^m
    const double log_one_minus_q = std::log(-std::expm1(-t));
    return std::exp(std::log(rate) - (rate + r) * t + mm * log_one_minus_q + log_coef);
  };

  const double decay = rate + r;
  const double peak = std::log1p(mm / decay);
  double t_max = peak + 40.0 / decay + 1.0;

  using Rule = boost::math::quadrature::gauss<double, 20>;
  auto composite = [&](double upper, std::size_t panels) {
    const double width = upper / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
      const double a = width * static_cast<double>(i);
      sum += Rule::integrate(integrand, a, a + width);
    }
    return sum;
  };

  double previous = -1.0;
  double value = 0.0;
  for (int range_round = 0; range_round < 8; ++range_round) {
    std::size_t panels = 8;
    double inner_prev = composite(t_max, panels);
    for (int refine = 0; refine < 14; ++refine) {
      panels *= 2;
      const double next = composite(t_max, panels);
      const bool stable = std::abs(next - inner_prev) <= 1e-15 * std::max(1.0, std::abs(next));
      inner_prev = next;
      if (stable) break;
    }
    value = inner_prev;
    if (previous >= 0.0 && std::abs(value - previous) <= 1e-15 * std::max(1.0, std::abs(value))) {
      break;
    }
    previous = value;
    t_max *= 2.0;
  }
  return value;
}

namespace {

void check_limit_params(const HybridParams& params) {
  validate(params);
  if (params.is_extended()) {
    throw ValidationError("the degree limit law covers the three-scenario model (xi = eta = 0)");
  }
  if (!(params.p > 0.0)) {
    throw ValidationError("the degree limit law requires p > 0");
  }
}

// alpha-weighted nodes are born with in-degree 0 and out-degree 1,
// gamma-weighted nodes with in-degree 1 and out-degree 0.
template <typename MixturePmf>
double limit_entry(double born_zero_weight, double born_one_weight, double delta_tilde,
                   double rate, std::uint64_t m, MixturePmf&& mixture) {
  double value = 0.0;
  if (born_zero_weight > 0.0) value += born_zero_weight * mixture(delta_tilde, rate, m);
  if (born_one_weight > 0.0 && m >= 1) {
    value += born_one_weight * mixture(1.0 + delta_tilde, rate, m - 1);
  }
  return value;
}

template <typename MixturePmf>
void fill_limit(LimitPmf& out, std::size_t from, std::size_t to, const DerivedConstants& dc,
                MixturePmf&& mixture) {
  const auto& prm = out.params;
  out.psi_in.resize(to + 1);
  out.psi_out.resize(to + 1);
  for (std::size_t m = from; m <= to; ++m) {
    out.psi_in[m] = prm.alpha + prm.beta > 0.0
                        ? limit_entry(prm.alpha, prm.gamma, dc.delta_in_tilde, dc.rate_in, m, mixture)
                        : (m == 0 ? prm.alpha : (m == 1 ? prm.gamma : 0.0));
    out.psi_out[m] = prm.beta + prm.gamma > 0.0
                         ? limit_entry(prm.gamma, prm.alpha, dc.delta_out_tilde, dc.rate_out, m, mixture)
                         : (m == 0 ? prm.gamma : (m == 1 ? prm.alpha : 0.0));
  }
  out.truncation_m = to;
}

}  // namespace

LimitPmf limit_pmf(const HybridParams& params, const LimitPmfOptions& options) {
  check_limit_params(params);
  const auto dc = derived_constants(params);
  LimitPmf out;
  out.params = params;
  fill_limit(out, 0, options.m_max, dc, nb_exponential_mixture_pmf);

  const double target = params.alpha + params.gamma - options.mass_tolerance;
  auto certified = [&] {
    const double in_mass = std::accumulate(out.psi_in.begin(), out.psi_in.end(), 0.0);
    const double out_mass = std::accumulate(out.psi_out.begin(), out.psi_out.end(), 0.0);
    return in_mass >= target && out_mass >= target;
  };
  out.mass_certified = certified();
  while (options.adaptive && !out.mass_certified && out.truncation_m < options.hard_limit) {
    const std::size_t next = std::min(options.hard_limit, 2 * out.truncation_m + 1);
    fill_limit(out, out.truncation_m + 1, next, dc, nb_exponential_mixture_pmf);
    out.mass_certified = certified();
  }
  return out;
}

LimitPmf limit_pmf_quadrature(const HybridParams& params, std::size_t m_max) {
  check_limit_params(params);
  const auto dc = derived_constants(params);
  LimitPmf out;
  out.params = params;
  fill_limit(out, 0, m_max, dc, nb_exponential_mixture_pmf_quadrature);
  return out;
}

GrowthDiagnostic growth_diagnostic(const std::vector<DegreeTrajectory>& trajectories,
                                   double exponent) {
  if (trajectories.empty()) throw std::invalid_argument("growth_diagnostic: no trajectories");
  GrowthDiagnostic out;
  out.checkpoints = trajectories.front().steps;
  const std::size_t points = out.checkpoints.size();
  for (const auto& tr : trajectories) {
    if (tr.steps != out.checkpoints || tr.degrees.size() != points) {
      throw std::invalid_argument("growth_diagnostic: trajectories must share checkpoints");
    }
    std::vector<double> row(points);
    for (std::size_t i = 0; i < points; ++i) {
      row[i] = static_cast<double>(tr.degrees[i]) /
               std::pow(static_cast<double>(tr.steps[i]), exponent);
    }
    out.normalized.push_back(std::move(row));
  }
  const auto reps = static_cast<double>(trajectories.size());
  out.mean.assign(points, 0.0);
  out.variance.assign(points, 0.0);
  out.supremum.assign(points, 0.0);
  for (const auto& row : out.normalized) {
    for (std::size_t i = 0; i < points; ++i) {
      out.mean[i] += row[i] / reps;
      out.supremum[i] = std::max(out.supremum[i], row[i]);
    }
  }
  if (trajectories.size() > 1) {
    for (const auto& row : out.normalized) {
      for (std::size_t i = 0; i < points; ++i) {
        out.variance[i] += (row[i] - out.mean[i]) * (row[i] - out.mean[i]) / (reps - 1.0);
      }
    }
  }
  if (points >= 2 && out.mean[points - 2] != 0.0) {
    out.stabilization = std::abs(out.mean[points - 1] - out.mean[points - 2]) / out.mean[points - 2];
  }
  return out;
}

}  // namespace hrn
