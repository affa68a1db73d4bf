#include "hrn/params.hpp"

#include <cmath>
#include <cstdio>

namespace hrn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

HybridParams make_params(double alpha, double beta, double p, double delta_in,
                         double delta_out, double xi, double eta) {
  HybridParams params;
  params.alpha = alpha;
  params.beta = beta;
  params.xi = xi;
  params.eta = eta;
  params.gamma = 1.0 - alpha - beta - xi - eta;
  // Rounding can leave -1e-17 when the other four sum to one.
  if (params.gamma < 0.0 && params.gamma > -kProbabilitySumTolerance) params.gamma = 0.0;
  params.p = p;
  params.delta_in = delta_in;
  params.delta_out = delta_out;
  validate(params);
  return params;
}

void validate(const HybridParams& params) {
  const double probs[] = {params.alpha, params.beta, params.gamma, params.xi, params.eta};
  for (double v : probs) {
    require(std::isfinite(v), "scenario probabilities must be finite");
    require(v >= 0.0, "scenario probabilities must be nonnegative");
  }
  const double total = params.alpha + params.beta + params.gamma + params.xi + params.eta;
  require(std::abs(total - 1.0) <= kProbabilitySumTolerance,
          "alpha + beta + gamma + xi + eta must equal 1");
  require(params.alpha < 1.0, "alpha must be < 1");
  require(params.beta < 1.0, "beta must be < 1");
  require(std::isfinite(params.p) && params.p >= 0.0 && params.p <= 1.0, "p must lie in [0, 1]");
  require(std::isfinite(params.delta_in) && params.delta_in > 0.0,
          "delta_in must be positive and finite");
  require(std::isfinite(params.delta_out) && params.delta_out > 0.0,
          "delta_out must be positive and finite");
}

void validate_for_estimation(const HybridParams& params) {
  validate(params);
  require(params.alpha + params.beta > 0.0, "alpha + beta must be positive");
}

bool is_valid(const HybridParams& params) noexcept {
  try {
    validate(params);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

std::string to_string(const HybridParams& params) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "alpha=%.6g beta=%.6g gamma=%.6g xi=%.6g eta=%.6g p=%.6g delta_in=%.6g "
                "delta_out=%.6g",
                params.alpha, params.beta, params.gamma, params.xi, params.eta, params.p,
                params.delta_in, params.delta_out);
  return buf;
}

double growth_exponent_in(const HybridParams& params) {
  return (params.alpha + params.beta) * params.p / (1.0 + params.delta_in * (1.0 - params.beta));
}

double growth_exponent_out(const HybridParams& params) {
  return (params.beta + params.gamma) * params.p /
         (1.0 + params.delta_out * (1.0 - params.beta));
}

double effective_offset(double delta, double p, double beta) {
  if (!(p > 0.0)) throw ValidationError("effective offset is undefined at p = 0");
  return delta / p + (1.0 - p) / (p * (1.0 - beta));
}

double offset_from_effective(double delta_tilde, double p, double beta) {
  return p * delta_tilde - (1.0 - p) / (1.0 - beta);
}

DerivedConstants derived_constants(const HybridParams& params) {
  validate(params);
  if (!(params.p > 0.0)) {
    throw ValidationError("effective offsets and clock rates require p > 0");
  }
  DerivedConstants out{};
  out.c1 = growth_exponent_in(params);
  out.c2 = growth_exponent_out(params);
  out.delta_in_tilde = effective_offset(params.delta_in, params.p, params.beta);
  out.delta_out_tilde = effective_offset(params.delta_out, params.p, params.beta);
  // A zero exponent means the corresponding clock never ticks.
  out.rate_in = (1.0 + params.delta_in * (1.0 - params.beta)) / (params.p * (params.alpha + params.beta));
  out.rate_out = (1.0 + params.delta_out * (1.0 - params.beta)) / (params.p * (params.beta + params.gamma));
  return out;
}

}  // namespace hrn
