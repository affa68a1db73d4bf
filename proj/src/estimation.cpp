#include "hrn/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hrn/generator.hpp"

namespace hrn {

// ---------------------------------------------------------------------------
// Nelder-Mead

SimplexOutcome nelder_mead_minimize(const std::function<double(std::span<const double>)>& f,
                                    std::vector<double> x0, std::span<const double> step,
                                    const SimplexOptions& options) {
  const std::size_t dim = x0.size();
  if (step.size() != dim) throw std::invalid_argument("nelder_mead: step size dimension mismatch");
  SimplexOutcome out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step[i];
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto combine = [&](std::vector<double>& dst, double t, const std::vector<double>& from) {
    // dst = centroid + t (centroid - from)
    for (std::size_t j = 0; j < dim; ++j) dst[j] = centroid[j] + t * (centroid[j] - from[j]);
  };

  for (;;) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    {
      std::vector<std::vector<double>> s2(dim + 1);
      std::vector<double> v2(dim + 1);
      for (std::size_t i = 0; i <= dim; ++i) {
        s2[i] = std::move(simplex[order[i]]);
        v2[i] = values[order[i]];
      }
      simplex = std::move(s2);
      values = std::move(v2);
    }

    if (!std::isfinite(values[0])) {
      out.collapsed = true;
      break;
    }
    double x_spread = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        x_spread = std::max(x_spread, std::abs(simplex[i][j] - simplex[0][j]));
      }
    }
    if (values[dim] - values[0] <= options.f_tol && x_spread <= options.x_tol) {
      out.converged = true;
      break;
    }
    if (out.iterations >= options.max_iters) break;
    ++out.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j] / static_cast<double>(dim);
    }
    const auto& worst = simplex[dim];

    combine(trial, 1.0, worst);
    const double fr = eval(trial);
    if (fr < values[0]) {
      combine(trial2, 2.0, worst);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[dim] = trial2;
        values[dim] = fe;
      } else {
        simplex[dim] = trial;
        values[dim] = fr;
      }
      continue;
    }
    if (fr < values[dim - 1]) {
      simplex[dim] = trial;
      values[dim] = fr;
      continue;
    }
    bool accepted = false;
    if (fr < values[dim]) {
      combine(trial2, 0.5, worst);  // outside contraction
      const double fc = eval(trial2);
      if (fc <= fr) {
        simplex[dim] = trial2;
        values[dim] = fc;
        accepted = true;
      }
    } else {
      combine(trial2, -0.5, worst);  // inside contraction
      const double fc = eval(trial2);
      if (fc < values[dim]) {
        simplex[dim] = trial2;
        values[dim] = fc;
        accepted = true;
      }
    }
    if (!accepted) {
      for (std::size_t i = 1; i <= dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
          simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
        }
        values[i] = eval(simplex[i]);
      }
    }
  }
  out.x = simplex[0];
  out.value = values[0];
  return out;
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

// Likelihood that never throws: invalid parameters map to -inf.
double safe_log_likelihood(const SufficientStats& stats, const HybridParams& theta) {
  if (!is_valid(theta)) return kNegInf;
  const double scen = scenario_log_likelihood(stats.counts, theta);
  if (scen == kNegInf) return kNegInf;
  const double value = scen + kernel_log_likelihood(stats.in_terms, theta.p, theta.delta_in) +
                       kernel_log_likelihood(stats.out_terms, theta.p, theta.delta_out);
  return std::isnan(value) ? kNegInf : value;
}

struct ActiveScenarios {
  bool xi = false;
  bool eta = false;
};

ActiveScenarios active_scenarios(const SufficientStats& stats, const HybridParams& init) {
  return {stats.counts[Scenario::NewSelfLoop] > 0 || init.xi > 0.0,
          stats.counts[Scenario::NewPair] > 0 || init.eta > 0.0};
}

double logit(double p) {
  const double c = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return std::log(c / (1.0 - c));
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void set_gamma_from_rest(HybridParams& t) {
  t.gamma = 1.0 - t.alpha - t.beta - t.xi - t.eta;
  if (t.gamma < 0.0 && t.gamma > -kProbabilitySumTolerance) t.gamma = 0.0;
}

// Coordinates of the unconstrained search space.
class Transform {
 public:
  Transform(bool profile, ActiveScenarios active, const ScenarioEstimate& fixed)
      : profile_(profile), active_(active), fixed_(fixed) {}

  std::size_t dimension() const {
    return 3 + (profile_ ? 0 : 2 + (active_.xi ? 1 : 0) + (active_.eta ? 1 : 0));
  }

  std::vector<double> encode(const HybridParams& theta) const {
    std::vector<double> z;
    if (!profile_) {
      // Keep every active probability strictly inside the simplex.
      const double floor = 1e-6;
      double a = std::max(theta.alpha, floor), b = std::max(theta.beta, floor),
             g = std::max(theta.gamma, floor);
      double x = active_.xi ? std::max(theta.xi, floor) : 0.0;
      double e = active_.eta ? std::max(theta.eta, floor) : 0.0;
      z.push_back(std::log(a / g));
      z.push_back(std::log(b / g));
      if (active_.xi) z.push_back(std::log(x / g));
      if (active_.eta) z.push_back(std::log(e / g));
    }
    z.push_back(logit(theta.p));
    z.push_back(std::log(theta.delta_in));
    z.push_back(std::log(theta.delta_out));
    return z;
  }

  HybridParams decode(std::span<const double> z) const {
    HybridParams t;
    std::size_t i = 0;
    if (profile_) {
      t.alpha = fixed_.alpha;
      t.beta = fixed_.beta;
      t.gamma = fixed_.gamma;
      t.xi = fixed_.xi;
      t.eta = fixed_.eta;
    } else {
      double logs[4] = {z[i], z[i + 1], 0.0, 0.0};
      i += 2;
      if (active_.xi) logs[2] = z[i++];
      if (active_.eta) logs[3] = z[i++];
      double top = 0.0;  // reference gamma has log-weight 0
      for (int j = 0; j < 4; ++j) {
        if (j < 2 || (j == 2 && active_.xi) || (j == 3 && active_.eta)) top = std::max(top, logs[j]);
      }
      const double wa = std::exp(logs[0] - top);
      const double wb = std::exp(logs[1] - top);
      const double wx = active_.xi ? std::exp(logs[2] - top) : 0.0;
      const double we = active_.eta ? std::exp(logs[3] - top) : 0.0;
      const double wg = std::exp(-top);
      const double total = wa + wb + wx + we + wg;
      t.alpha = wa / total;
      t.beta = wb / total;
      t.xi = wx / total;
      t.eta = we / total;
      set_gamma_from_rest(t);
    }
    t.p = logistic(z[i++]);
    t.delta_in = std::exp(z[i++]);
    t.delta_out = std::exp(z[i++]);
    return t;
  }

 private:
  bool profile_;
  ActiveScenarios active_;
  ScenarioEstimate fixed_;
};

}  // namespace

void validate(const NelderMeadConfig& config) {
  validate(config.initial_point);
  if (config.max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (!(config.f_tol > 0.0) || !(config.x_tol > 0.0)) {
    throw ValidationError("Nelder-Mead tolerances must be positive");
  }
  for (double s : config.scale) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("simplex scale must be positive");
  }
}

void validate(const MhConfig& config) {
  if (config.thinning < 1) throw ValidationError("thinning must be at least 1");
  if (config.iterations < config.thinning) {
    throw ValidationError("iterations must be at least the thinning gap");
  }
  if (!(config.step_sizes.probability >= 0.0) || !(config.step_sizes.log_delta >= 0.0)) {
    throw ValidationError("proposal step sizes must be nonnegative");
  }
  if (!(config.delta_upper > 0.0) || !std::isfinite(config.delta_upper)) {
    throw ValidationError("delta_upper must be positive and finite");
  }
  if (config.initial_point) validate(*config.initial_point);
}

EstimationResult fit_nelder_mead(const SufficientStats& stats, const NelderMeadConfig& config) {
  validate(config);
  EstimationResult result;
  result.point = config.initial_point;

  if (stats.counts.total() == 0) {
    result.message = "empty edge log";
    return result;
  }
  const ScenarioEstimate mle = mle_scenarios(stats);
  if (config.profile_scenarios && !mle.regular) {
    result.log_likelihood = safe_log_likelihood(stats, result.point);
    result.message = "scenario frequencies lie on the boundary (alpha or beta equals 1, or alpha + beta = 0)";
    return result;
  }

  const Transform transform(config.profile_scenarios, active_scenarios(stats, config.initial_point),
                            mle);
  const std::size_t dim = transform.dimension();
  std::vector<double> step = config.scale;
  if (step.empty()) step.assign(dim, 0.5);
  if (step.size() != dim) {
    throw ValidationError("simplex scale has " + std::to_string(step.size()) +
                          " entries, expected " + std::to_string(dim));
  }

  auto objective = [&](std::span<const double> z) {
    return -safe_log_likelihood(stats, transform.decode(z));
  };
  const SimplexOptions options{config.max_iters, config.f_tol, config.x_tol};

  HybridParams start = config.initial_point;
  if (config.profile_scenarios) {
    start.alpha = mle.alpha;
    start.beta = mle.beta;
    start.gamma = mle.gamma;
    start.xi = mle.xi;
    start.eta = mle.eta;
  }
  SimplexOutcome outcome = nelder_mead_minimize(objective, transform.encode(start), step, options);
  result.iterations = outcome.iterations;
  result.evaluations = outcome.evaluations;
  for (std::size_t r = 0; r < config.restarts && outcome.converged; ++r) {
    SimplexOutcome again = nelder_mead_minimize(objective, outcome.x, step, options);
    result.iterations += again.iterations;
    result.evaluations += again.evaluations;
    const bool improved = again.value < outcome.value - config.f_tol;
    if (again.value <= outcome.value) outcome = std::move(again);
    else outcome.converged = again.converged;
    if (!improved) break;
  }

  result.point = transform.decode(outcome.x);
  result.log_likelihood = -outcome.value;
  result.converged = outcome.converged && !outcome.collapsed;
  if (outcome.collapsed) {
    result.message = "simplex collapsed: no vertex with finite likelihood";
  } else if (!outcome.converged) {
    result.message = "iteration limit reached before the simplex converged";
  } else {
    result.message = "converged";
  }
  if (!is_valid(result.point)) {
    result.point = config.initial_point;
    result.converged = false;
    result.message = "optimum left the parameter space";
  }
  return result;
}

// ---------------------------------------------------------------------------
// Metropolis-Hastings

namespace {

double reflect_into(double x, double lo, double hi) {
  if (!(hi > lo)) return lo;
  const double width = hi - lo;
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  return y <= width ? lo + y : lo + 2.0 * width - y;
}

double reflect_below(double x, double hi) { return x <= hi ? x : 2.0 * hi - x; }

// Log-likelihood split into its separable blocks so each coordinate update
// recomputes only the blocks it touches.
struct ChainState {
  HybridParams theta;
  double scenario = 0.0;
  double in_num = 0.0, in_norm = 0.0;
  double out_num = 0.0, out_norm = 0.0;

  double total() const { return scenario + in_num - in_norm + out_num - out_norm; }
};

ChainState make_state(const SufficientStats& stats, const HybridParams& theta) {
  ChainState s{theta};
  s.scenario = scenario_log_likelihood(stats.counts, theta);
  s.in_num = kernel_log_numerator(stats.in_terms, theta.p, theta.delta_in);
  s.in_norm = kernel_log_normalizer(stats.in_terms, theta.delta_in);
  s.out_num = kernel_log_numerator(stats.out_terms, theta.p, theta.delta_out);
  s.out_norm = kernel_log_normalizer(stats.out_terms, theta.delta_out);
  return s;
}

HybridParams draw_from_prior(Engine& engine, ActiveScenarios active, double delta_upper) {
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  HybridParams t;
  double w[5] = {expo(engine), expo(engine), expo(engine), active.xi ? expo(engine) : 0.0,
                 active.eta ? expo(engine) : 0.0};
  const double total = w[0] + w[1] + w[2] + w[3] + w[4];
  t.alpha = w[0] / total;
  t.beta = w[1] / total;
  t.xi = w[3] / total;
  t.eta = w[4] / total;
  set_gamma_from_rest(t);
  t.p = unit(engine);
  do {
    t.delta_in = expo(engine);
  } while (!(t.delta_in > 0.0 && t.delta_in <= delta_upper));
  do {
    t.delta_out = expo(engine);
  } while (!(t.delta_out > 0.0 && t.delta_out <= delta_upper));
  return t;
}

HybridParams default_mh_start(ActiveScenarios active) {
  HybridParams t;
  const double k = 3.0 + (active.xi ? 1.0 : 0.0) + (active.eta ? 1.0 : 0.0);
  t.alpha = t.beta = 1.0 / k;
  t.xi = active.xi ? 1.0 / k : 0.0;
  t.eta = active.eta ? 1.0 / k : 0.0;
  set_gamma_from_rest(t);
  return t;
}

double summarize(std::vector<double> values, PointSummary summary) {
  if (summary == PointSummary::Mean) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

EstimationResult fit_mh(const SufficientStats& stats, const MhConfig& config) {
  validate(config);
  if (stats.counts.total() == 0) throw std::invalid_argument("fit_mh: empty edge log");

  Engine engine(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const HybridParams init_hint = config.initial_point.value_or(HybridParams{});
  const ActiveScenarios active = active_scenarios(stats, init_hint);
  HybridParams start = config.initial_point.value_or(default_mh_start(active));

  ChainState state = make_state(stats, start);
  std::size_t attempts = 0;
  while (!std::isfinite(state.total()) || start.delta_in > config.delta_upper ||
         start.delta_out > config.delta_upper) {
    if (++attempts > config.max_start_attempts) {
      throw std::runtime_error("fit_mh: no starting point with positive likelihood found");
    }
    start = draw_from_prior(engine, active, config.delta_upper);
    state = make_state(stats, start);
  }

  // Scenario coordinates that move; gamma absorbs every change.
  std::vector<double HybridParams::*> scenario_coords = {&HybridParams::alpha, &HybridParams::beta};
  if (active.xi) scenario_coords.push_back(&HybridParams::xi);
  if (active.eta) scenario_coords.push_back(&HybridParams::eta);
  const double log_upper = std::log(config.delta_upper);
  const double prob_step = config.step_sizes.probability;
  const double delta_step = config.step_sizes.log_delta;

  // Flat prior density: Dirichlet(1,...,1) on the active simplex, U[0,1] for p,
  // U(0, delta_upper] for each offset.
  const double simplex_dim = static_cast<double>(scenario_coords.size());
  const double log_prior = std::lgamma(simplex_dim + 1.0) - 2.0 * log_upper;

  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  auto accept = [&](double log_ratio, bool counted) {
    const bool ok = std::isfinite(log_ratio) ? std::log(unit(engine)) < log_ratio
                                             : log_ratio > 0.0;
    if (counted) {
      ++proposals;
      if (ok) ++accepted;
    }
    return ok;
  };

  EstimationResult result;
  std::vector<HybridParams> kept;
  const std::uint64_t total_iters = config.burn_in + config.iterations;
  for (std::uint64_t iter = 1; iter <= total_iters; ++iter) {
    const bool counted = iter > config.burn_in;

    for (auto coord : scenario_coords) {
      HybridParams prop = state.theta;
      const double room = prop.*coord + prop.gamma;
      prop.*coord = reflect_into(prop.*coord + prob_step * normal(engine), 0.0, room);
      set_gamma_from_rest(prop);
      const double scen = prop.alpha < 1.0 && prop.beta < 1.0 && prop.gamma >= 0.0
                              ? scenario_log_likelihood(stats.counts, prop)
                              : kNegInf;
      if (accept(scen - state.scenario, counted)) {
        state.theta = prop;
        state.scenario = scen;
      }
    }

    {
      const double p = reflect_into(state.theta.p + prob_step * normal(engine), 0.0, 1.0);
      const double in_num = kernel_log_numerator(stats.in_terms, p, state.theta.delta_in);
      const double out_num = kernel_log_numerator(stats.out_terms, p, state.theta.delta_out);
      if (accept(in_num + out_num - state.in_num - state.out_num, counted)) {
        state.theta.p = p;
        state.in_num = in_num;
        state.out_num = out_num;
      }
    }

    {
      const double y = std::log(state.theta.delta_in);
      const double y_new = reflect_below(y + delta_step * normal(engine), log_upper);
      const double d = std::exp(y_new);
      const double num = kernel_log_numerator(stats.in_terms, state.theta.p, d);
      const double norm = kernel_log_normalizer(stats.in_terms, d);
      // + (y_new - y): Jacobian of the log scale under a flat prior on delta.
      const double ratio = (num - norm) - (state.in_num - state.in_norm) + (y_new - y);
      if (d > 0.0 && accept(ratio, counted)) {
        state.theta.delta_in = d;
        state.in_num = num;
        state.in_norm = norm;
      }
    }

    {
      const double y = std::log(state.theta.delta_out);
      const double y_new = reflect_below(y + delta_step * normal(engine), log_upper);
      const double d = std::exp(y_new);
      const double num = kernel_log_numerator(stats.out_terms, state.theta.p, d);
      const double norm = kernel_log_normalizer(stats.out_terms, d);
      const double ratio = (num - norm) - (state.out_num - state.out_norm) + (y_new - y);
      if (d > 0.0 && accept(ratio, counted)) {
        state.theta.delta_out = d;
        state.out_num = num;
        state.out_norm = norm;
      }
    }

    if (counted && (iter - config.burn_in) % config.thinning == 0) {
      result.trace.push_back({iter, state.theta, state.total() + log_prior});
      kept.push_back(state.theta);
    }
  }

  // Running means of the kept draws.
  HybridParams sum{0, 0, 0, 0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto& t = kept[i];
    sum.alpha += t.alpha;
    sum.beta += t.beta;
    sum.gamma += t.gamma;
    sum.xi += t.xi;
    sum.eta += t.eta;
    sum.p += t.p;
    sum.delta_in += t.delta_in;
    sum.delta_out += t.delta_out;
    const double n = static_cast<double>(i + 1);
    result.running_mean.push_back({sum.alpha / n, sum.beta / n, sum.gamma / n, sum.p / n,
                                   sum.delta_in / n, sum.delta_out / n, sum.xi / n, sum.eta / n});
  }

  auto column = [&](double HybridParams::*field) {
    std::vector<double> v;
    v.reserve(kept.size());
    for (const auto& t : kept) v.push_back(t.*field);
    return summarize(std::move(v), config.summary);
  };
  HybridParams point;
  point.alpha = column(&HybridParams::alpha);
  point.beta = column(&HybridParams::beta);
  point.xi = column(&HybridParams::xi);
  point.eta = column(&HybridParams::eta);
  set_gamma_from_rest(point);
  point.p = column(&HybridParams::p);
  point.delta_in = column(&HybridParams::delta_in);
  point.delta_out = column(&HybridParams::delta_out);
  if (point.gamma < 0.0) {
    // Medians need not sum to one; renormalize the scenario block.
    const double total = point.alpha + point.beta + point.xi + point.eta;
    point.alpha /= total;
    point.beta /= total;
    point.xi /= total;
    point.eta /= total;
    set_gamma_from_rest(point);
  }

  result.point = point;
  result.log_likelihood = safe_log_likelihood(stats, point);
  result.iterations = total_iters;
  result.evaluations = total_iters * (scenario_coords.size() + 3);
  result.acceptance_rate =
      proposals == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  result.converged = true;
  result.message = "completed " + std::to_string(total_iters) + " iterations";
  return result;
}

EstimationResult fit_integrated(const SufficientStats& stats, const MhConfig& mh_config,
                                const NelderMeadConfig& nm_template) {
  EstimationResult mh = fit_mh(stats, mh_config);
  NelderMeadConfig nm = nm_template;
  nm.initial_point = mh.point;
  if (!is_valid(nm.initial_point)) nm.initial_point = nm_template.initial_point;
  EstimationResult out = fit_nelder_mead(stats, nm);
  out.trace = std::move(mh.trace);
  out.running_mean = std::move(mh.running_mean);
  out.acceptance_rate = mh.acceptance_rate;
  out.iterations += mh.iterations;
  out.evaluations += mh.evaluations;
  return out;
}

}  // namespace hrn
