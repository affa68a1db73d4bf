#pragma once

#include <stdexcept>
#include <string>

namespace hrn {

/// Thrown when a parameter vector or configuration violates the model's
/// constraints.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter vector of the hybrid PA/UA network.
///
/// alpha, beta, gamma are the probabilities of the three base edge-creation
/// scenarios (new source, both endpoints existing, new target). xi and eta
/// are the optional extended scenarios (fresh self-looped node, fresh
/// connected pair); both default to zero. p is the probability that an
/// endpoint is drawn preferentially rather than uniformly.
struct HybridParams {
  double alpha = 1.0 / 3.0;
  double beta = 1.0 / 3.0;
  double gamma = 1.0 / 3.0;
  double p = 0.5;
  double delta_in = 1.0;
  double delta_out = 1.0;
  double xi = 0.0;
  double eta = 0.0;

  bool is_extended() const noexcept { return xi > 0.0 || eta > 0.0; }

  friend bool operator==(const HybridParams&, const HybridParams&) = default;
};

inline constexpr double kProbabilitySumTolerance = 1e-12;

/// Builds a parameter vector with gamma = 1 - alpha - beta - xi - eta.
HybridParams make_params(double alpha, double beta, double p, double delta_in,
                         double delta_out, double xi = 0.0, double eta = 0.0);

/// Model constraints: nonnegative scenario probabilities summing to one,
/// alpha < 1, beta < 1, p in [0, 1], finite positive offsets.
void validate(const HybridParams& params);

/// Model constraints plus the estimation regularity alpha + beta > 0.
void validate_for_estimation(const HybridParams& params);

bool is_valid(const HybridParams& params) noexcept;

std::string to_string(const HybridParams& params);

/// Growth exponents, effective offsets and exponential clock rates of the
/// degree limit theory.
struct DerivedConstants {
  double c1;
  double c2;
  double delta_in_tilde;
  double delta_out_tilde;
  double rate_in;
  double rate_out;
};

/// Throws ValidationError at p = 0, where the effective offsets and rates
/// are undefined.
DerivedConstants derived_constants(const HybridParams& params);

double growth_exponent_in(const HybridParams& params);
double growth_exponent_out(const HybridParams& params);

/// delta -> delta / p + (1 - p) / (p (1 - beta))
double effective_offset(double delta, double p, double beta);

/// Inverse of effective_offset at fixed p and beta.
double offset_from_effective(double delta_tilde, double p, double beta);

}  // namespace hrn
