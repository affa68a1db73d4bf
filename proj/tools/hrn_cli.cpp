// hrn: simulate hybrid PA/UA networks, fit them, and emit data for tables
// and tail plots.
//
// Exit codes: 0 success, 2 invalid input, 3 Nelder-Mead did not converge,
// 1 anything else (I/O failures).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hrn/data_io.hpp"
#include "hrn/degree_stats.hpp"
#include "hrn/estimation.hpp"
#include "hrn/generator.hpp"
#include "hrn/kernels.hpp"
#include "hrn/likelihood.hpp"

#ifndef HRN_VERSION
#define HRN_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hrn;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNoConvergence = 3;

class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParamFlags {
  double alpha = 0.1;
  double beta = 0.8;
  double p = 0.8;
  double din = 1.3;
  double dout = 0.7;
  double xi = 0.0;
  double eta = 0.0;

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "new-source scenario probability")->capture_default_str();
    app->add_option("--beta", beta, "existing-pair scenario probability")->capture_default_str();
    app->add_option("--p", p, "preferential attachment weight")->capture_default_str();
    app->add_option("--din", din, "in-degree offset")->capture_default_str();
    app->add_option("--dout", dout, "out-degree offset")->capture_default_str();
    app->add_option("--xi", xi, "fresh self-loop scenario probability")->capture_default_str();
    app->add_option("--eta", eta, "fresh pair scenario probability")->capture_default_str();
  }
  HybridParams params() const { return make_params(alpha, beta, p, din, dout, xi, eta); }
};

struct MhFlags {
  std::uint64_t burn_in = 10'000;
  std::uint64_t iterations = 20'000;
  std::uint64_t thinning = 500;
  double step_prob = 0.01;
  double step_log_delta = 0.05;
  double delta_upper = 100.0;
  std::string summary = "mean";

  void add(CLI::App* app) {
    app->add_option("--burn-in", burn_in)->capture_default_str();
    app->add_option("--iterations", iterations)->capture_default_str();
    app->add_option("--thinning", thinning)->capture_default_str();
    app->add_option("--step-prob", step_prob, "proposal sd for probabilities")->capture_default_str();
    app->add_option("--step-log-delta", step_log_delta, "proposal sd for log offsets")
        ->capture_default_str();
    app->add_option("--delta-upper", delta_upper, "upper bound of the flat offset prior")
        ->capture_default_str();
    app->add_option("--summary", summary, "posterior point summary")
        ->check(CLI::IsMember({"mean", "median"}))
        ->capture_default_str();
  }
  MhConfig config(std::uint64_t seed) const {
    MhConfig c;
    c.burn_in = burn_in;
    c.iterations = iterations;
    c.thinning = thinning;
    c.step_sizes = {step_prob, step_log_delta};
    c.delta_upper = delta_upper;
    c.seed = seed;
    c.summary = summary == "median" ? PointSummary::Median : PointSummary::Mean;
    return c;
  }
};

struct NmFlags {
  std::size_t max_iters = 10'000;
  bool full = false;

  void add(CLI::App* app) {
    app->add_option("--max-iters", max_iters, "Nelder-Mead iteration limit")->capture_default_str();
    app->add_flag("--full-simplex", full, "search the scenario probabilities too");
  }
  NelderMeadConfig config() const {
    NelderMeadConfig c;
    c.max_iters = max_iters;
    c.profile_scenarios = !full;
    return c;
  }
};

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string replicate_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "replicate_%03zu", i);
  return buf;
}

json manifest_base(const std::string& command) {
  return {{"command", command}, {"version", HRN_VERSION}, {"rng", "mt19937_64"}};
}

// Input log ready for replay: dense ids, origin resolved.
EdgeLog load_log(const fs::path& path, const std::string& origin) {
  auto log = parse_edge_file(path);
  if (origin == "seed") log.origin = LogOrigin::Seed;
  if (origin == "first-record") log.origin = LogOrigin::FirstRecord;
  return relabel(log).log;
}

NetworkState build_state(const EdgeLog& log) {
  NetworkState state;
  std::size_t first = 0;
  if (log.origin == LogOrigin::FirstRecord && !log.empty()) {
    const auto& r = log.records.front();
    state = NetworkState::from_initial_edge(r.source == r.target);
    first = 1;
  }
  for (std::size_t i = first; i < log.size(); ++i) {
    const auto& r = log.records[i];
    state.apply(classify_scenario(state.node_count(), r), r.source, r.target);
  }
  return state;
}

// ---------------------------------------------------------------------------

struct SimulateCmd {
  ParamFlags params;
  std::uint64_t n = 10'000;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  std::size_t workers = default_workers();
  std::vector<std::uint64_t> snapshots;
  std::string out = "hrn_out";

  int run() const {
    SimulationConfig cfg;
    cfg.params = params.params();
    cfg.n_edges = n;
    cfg.seed = seed;
    cfg.snapshot_steps = snapshots;
    validate(cfg);
    if (replicates < 1) throw ValidationError("--replicates must be at least 1");
    fs::create_directories(out);
    const auto runs = simulate_replicates(cfg, replicates, workers);
    json files = json::array();
    json seeds = json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto name = replicate_name(i);
      export_to(fs::path(out) / (name + ".edges"), runs[i].log);
      json entry = {{"edges", name + ".edges"}, {"seed", runs[i].seed}};
      json snaps = json::array();
      for (const auto& s : runs[i].snapshots) {
        const auto file = name + "_degrees_" + std::to_string(s.step) + ".csv";
        export_to(fs::path(out) / file, s.counts, ExportFormat::Csv);
        snaps.push_back({{"step", s.step}, {"file", file}});
      }
      entry["snapshots"] = snaps;
      files.push_back(entry);
      seeds.push_back(runs[i].seed);
    }
    auto m = manifest_base("simulate");
    m["params"] = to_json(cfg.params);
    m["n_edges"] = n;
    m["replicates"] = replicates;
    m["master_seed"] = seed;
    m["replicate_seeds"] = seeds;
    m["files"] = files;
    write_json(fs::path(out) / "manifest.json", m);
    std::cout << "wrote " << runs.size() << " edge logs to " << out << "\n";
    return 0;
  }
};

struct FitCmd {
  std::vector<std::string> inputs;
  std::string method = "nm";
  std::string origin = "auto";
  std::uint64_t seed = 1;
  std::size_t workers = default_workers();
  NmFlags nm;
  MhFlags mh;
  std::string out = "hrn_fit";

  int run() const {
    validate(nm.config());
    if (method != "nm") validate(mh.config(seed));
    std::vector<SufficientStats> stats;
    for (const auto& in : inputs) stats.push_back(replay(load_log(in, origin)));
    std::vector<EstimationResult> results(inputs.size());
    parallel_for(inputs.size(), workers, [&](std::size_t i) {
      const auto mcfg = mh.config(replicate_seed(seed, i));
      if (method == "nm") results[i] = fit_nelder_mead(stats[i], nm.config());
      else if (method == "mh") results[i] = fit_mh(stats[i], mcfg);
      else results[i] = fit_integrated(stats[i], mcfg, nm.config());
    });
    fs::create_directories(out);
    json files = json::array();
    bool all_converged = true;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto stem = fs::path(inputs[i]).stem().string();
      auto j = to_json(results[i]);
      j["input"] = inputs[i];
      j["method"] = method;
      j["n_records"] = stats[i].counts.total();
      if (method != "nm") j["chain_seed"] = replicate_seed(seed, i);
      write_json(fs::path(out) / (stem + ".fit.json"), j);
      json entry = {{"input", inputs[i]}, {"estimate", stem + ".fit.json"}};
      if (!results[i].trace.empty()) {
        export_to(fs::path(out) / (stem + ".trace.csv"), results[i].trace, ExportFormat::Csv);
        entry["trace"] = stem + ".trace.csv";
      }
      files.push_back(entry);
      if (method != "mh" && !results[i].converged) {
        all_converged = false;
        std::cerr << inputs[i] << ": " << results[i].message << "\n";
      }
    }
    auto m = manifest_base("fit");
    m["method"] = method;
    m["origin"] = origin;
    m["seed"] = seed;
    m["files"] = files;
    write_json(fs::path(out) / "manifest.json", m);
    if (!all_converged) throw ConvergenceFailure("Nelder-Mead did not converge on every input");
    return 0;
  }
};

struct TableCmd {
  ParamFlags params;
  std::uint64_t n = 10'000;
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  std::size_t workers = default_workers();
  std::vector<std::string> methods{"nm"};
  NmFlags nm;
  MhFlags mh;
  std::string out;

  int run() const {
    SimulationConfig cfg;
    cfg.params = params.params();
    cfg.n_edges = n;
    cfg.seed = seed;
    cfg.log_scenarios = false;
    validate(cfg);
    validate_for_estimation(cfg.params);
    validate(nm.config());
    if (replicates < 1) throw ValidationError("--replicates must be at least 1");
    std::vector<SufficientStats> stats(replicates);
    parallel_for(replicates, workers, [&](std::size_t r) {
      Simulator sim(cfg.params, replicate_seed(seed, r), false);
      sim.run(n);
      stats[r] = replay(sim.log());
    });

    const auto& truth = cfg.params;
    std::ostringstream csv;
    csv << "method,parameter,truth,mean,abs_bias_pct,sd,se,replicates,converged\n";
    std::size_t failures = 0;
    for (const auto& method : methods) {
      if (method != "nm") validate(mh.config(seed));
      std::vector<EstimationResult> res(replicates);
      parallel_for(replicates, workers, [&](std::size_t r) {
        // Chains use derived streams disjoint from the simulation streams.
        const auto mcfg = mh.config(replicate_seed(seed, replicates + r));
        if (method == "nm") res[r] = fit_nelder_mead(stats[r], nm.config());
        else if (method == "mh") res[r] = fit_mh(stats[r], mcfg);
        else res[r] = fit_integrated(stats[r], mcfg, nm.config());
      });
      std::size_t converged = 0;
      for (const auto& e : res) converged += e.converged;
      if (method != "mh") failures += replicates - converged;

      std::vector<std::pair<std::string, double HybridParams::*>> fields{
          {"alpha", &HybridParams::alpha}, {"beta", &HybridParams::beta},
          {"gamma", &HybridParams::gamma}, {"p", &HybridParams::p},
          {"delta_in", &HybridParams::delta_in}, {"delta_out", &HybridParams::delta_out}};
      if (truth.xi > 0) fields.emplace_back("xi", &HybridParams::xi);
      if (truth.eta > 0) fields.emplace_back("eta", &HybridParams::eta);
      for (const auto& [name, member] : fields) {
        const auto k = static_cast<double>(replicates);
        double mean = 0.0;
        for (const auto& e : res) mean += e.point.*member / k;
        double ss = 0.0;
        for (const auto& e : res) ss += (e.point.*member - mean) * (e.point.*member - mean);
        const double sd = replicates > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
        const double t = truth.*member;
        const double bias = t != 0.0 ? 100.0 * std::abs(mean - t) / std::abs(t) : 0.0;
        csv << method << ',' << name << ',' << format_double(t) << ',' << format_double(mean) << ','
            << format_double(bias) << ',' << format_double(sd) << ','
            << format_double(sd / std::sqrt(k)) << ',' << replicates << ',' << converged << '\n';
      }
    }
    if (out.empty()) {
      std::cout << csv.str();
    } else {
      write_text(out, csv.str());
      auto m = manifest_base("table");
      m["params"] = to_json(truth);
      m["n_edges"] = n;
      m["replicates"] = replicates;
      m["master_seed"] = seed;
      m["methods"] = methods;
      write_json(fs::path(out).replace_extension(".manifest.json"), m);
    }
    if (failures) {
      throw ConvergenceFailure(std::to_string(failures) + " Nelder-Mead fits did not converge");
    }
    return 0;
  }
};

struct CcdfCmd {
  std::string input;
  std::string origin = "auto";
  ParamFlags params;
  std::uint64_t n = 100'000;
  std::uint64_t seed = 1;
  std::string direction = "in";
  bool with_limit = false;
  std::string format = "csv";
  std::string out;

  int run() const {
    NetworkState state;
    std::optional<HybridParams> th;
    if (!input.empty()) {
      state = build_state(load_log(input, origin));
    } else {
      SimulationConfig cfg;
      cfg.params = params.params();
      cfg.n_edges = n;
      cfg.seed = seed;
      validate(cfg);
      th = cfg.params;
      state = simulate(cfg).state;
    }
    const auto counts = degree_counts(state);
    const auto dir = direction == "in" ? Direction::In : Direction::Out;
    const auto points = ccdf(counts, dir);
    const auto fmt = format == "json" ? ExportFormat::Json : ExportFormat::Csv;
    if (out.empty()) {
      if (fmt == ExportFormat::Json) std::cout << to_json(points).dump(2) << "\n";
      else write_ccdf_csv(std::cout, points);
    } else {
      export_to(out, points, fmt);
    }
    if (with_limit) {
      if (!th) th = params.params();
      const auto pmf = limit_pmf(*th);
      const auto& psi = pmf.psi(dir);
      // N_{>m} / |V| -> (sum_{j > m} psi_j) / (alpha + gamma).
      const double nodes_per_edge = th->alpha + th->gamma;
      std::vector<CcdfPoint> limit;
      double above = 0.0;
      for (double v : psi) above += v;
      for (std::size_t m = 0; m < psi.size(); ++m) {
        above -= psi[m];
        if (above <= 0.0) break;
        limit.push_back({m, above / nodes_per_edge});
      }
      if (out.empty()) {
        std::cout << "\n";
        write_ccdf_csv(std::cout, limit);
      } else {
        auto path = fs::path(out);
        path.replace_extension(".limit" + path.extension().string());
        export_to(path, limit, fmt);
      }
    }
    return 0;
  }
};

struct LimitPmfCmd {
  ParamFlags params;
  std::size_t m_max = 200;
  bool fixed = false;
  std::string format = "csv";
  std::string out;

  int run() const {
    const auto pmf = limit_pmf(params.params(), {.m_max = m_max, .adaptive = !fixed});
    const auto fmt = format == "json" ? ExportFormat::Json : ExportFormat::Csv;
    if (out.empty()) {
      if (fmt == ExportFormat::Json) std::cout << to_json(pmf).dump(2) << "\n";
      else write_limit_pmf_csv(std::cout, pmf);
    } else {
      export_to(out, pmf, fmt);
    }
    return 0;
  }
};

struct ClassifyCmd {
  std::string input;
  std::string origin = "auto";
  std::string out;

  int run() const {
    auto log = load_log(input, origin);
    for (auto& r : log.records) r.scenario.reset();
    const auto stats = replay(log);
    std::size_t k = 0;
    if (stats.initial_scenario) log.records[k++].scenario = stats.initial_scenario;
    for (const auto& s : stats.steps) log.records[k++].scenario = s.scenario;
    if (out.empty()) write_edge_log(std::cout, log);
    else export_to(out, log);
    std::cerr << "scenario counts:";
    for (int j = 0; j < 5; ++j) std::cerr << ' ' << stats.counts.n[j];
    std::cerr << "\n";
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and likelihood fitting for hybrid PA/UA directed networks"};
  app.set_version_flag("--version", HRN_VERSION);
  app.require_subcommand(1);

  SimulateCmd sim;
  auto* s = app.add_subcommand("simulate", "simulate replicate networks and write edge logs");
  sim.params.add(s);
  s->add_option("--n", sim.n, "edges per network (seed edge excluded)")->capture_default_str();
  s->add_option("--replicates", sim.replicates)->capture_default_str();
  s->add_option("--seed", sim.seed, "master seed")->capture_default_str();
  s->add_option("--workers", sim.workers)->check(CLI::PositiveNumber);
  s->add_option("--snapshot", sim.snapshots, "steps at which to save degree counts");
  s->add_option("--out", sim.out, "output directory")->capture_default_str();

  FitCmd fit;
  auto* f = app.add_subcommand("fit", "estimate parameters from edge logs");
  f->add_option("input", fit.inputs, "edge log files")->required()->check(CLI::ExistingFile);
  f->add_option("--method", fit.method)
      ->check(CLI::IsMember({"nm", "mh", "integrated"}))
      ->capture_default_str();
  f->add_option("--origin", fit.origin, "initial graph: seed self-loop or first record")
      ->check(CLI::IsMember({"auto", "seed", "first-record"}))
      ->capture_default_str();
  f->add_option("--seed", fit.seed, "chain seed")->capture_default_str();
  f->add_option("--workers", fit.workers)->check(CLI::PositiveNumber);
  fit.nm.add(f);
  fit.mh.add(f);
  f->add_option("--out", fit.out, "output directory")->capture_default_str();

  TableCmd table;
  auto* t = app.add_subcommand("table", "replicate study: mean, |bias|%, sd and se per parameter");
  table.params.add(t);
  t->add_option("--n", table.n)->capture_default_str();
  t->add_option("--replicates", table.replicates)->capture_default_str();
  t->add_option("--seed", table.seed)->capture_default_str();
  t->add_option("--workers", table.workers)->check(CLI::PositiveNumber);
  t->add_option("--methods", table.methods)
      ->delimiter(',')
      ->check(CLI::IsMember({"nm", "mh", "integrated"}))
      ->capture_default_str();
  table.nm.add(t);
  table.mh.add(t);
  t->add_option("--out", table.out, "CSV path (stdout when omitted)");

  CcdfCmd cc;
  auto* c = app.add_subcommand("ccdf", "empirical degree tail of an edge log or a fresh simulation");
  c->add_option("--input", cc.input, "edge log; simulate from the parameters when omitted")
      ->check(CLI::ExistingFile);
  c->add_option("--origin", cc.origin)
      ->check(CLI::IsMember({"auto", "seed", "first-record"}))
      ->capture_default_str();
  cc.params.add(c);
  c->add_option("--n", cc.n)->capture_default_str();
  c->add_option("--seed", cc.seed)->capture_default_str();
  c->add_option("--direction", cc.direction)->check(CLI::IsMember({"in", "out"}))->capture_default_str();
  c->add_flag("--with-limit", cc.with_limit, "also write the tail implied by the limit pmf");
  c->add_option("--format", cc.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  c->add_option("--out", cc.out, "output path (stdout when omitted)");

  LimitPmfCmd lp;
  auto* l = app.add_subcommand("limit-pmf", "limiting per-edge degree frequencies");
  lp.params.add(l);
  l->add_option("--m-max", lp.m_max)->capture_default_str();
  l->add_flag("--fixed", lp.fixed, "stop at m-max instead of extending until the mass is certified");
  l->add_option("--format", lp.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  l->add_option("--out", lp.out, "output path (stdout when omitted)");

  ClassifyCmd cl;
  auto* k = app.add_subcommand("classify", "label every record of an edge log with its scenario");
  k->add_option("input", cl.input)->required()->check(CLI::ExistingFile);
  k->add_option("--origin", cl.origin)
      ->check(CLI::IsMember({"auto", "seed", "first-record"}))
      ->capture_default_str();
  k->add_option("--out", cl.out, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*s) return sim.run();
    if (*f) return fit.run();
    if (*t) return table.run();
    if (*c) return cc.run();
    if (*l) return lp.run();
    if (*k) return cl.run();
  } catch (const ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const ValidationError& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParseError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
