#include "hrn/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace hrn {

namespace {

constexpr std::string_view kEdgeLogDirective = "% hrn-edge-log";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

template <typename Int>
bool parse_int(std::string_view field, Int& out) {
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::string value_after(std::string_view line, std::string_view key) {
  const auto pos = line.find(key);
  if (pos == std::string_view::npos) return {};
  const auto start = pos + key.size();
  const auto stop = line.find_first_of(" \t\r", start);
  return std::string(line.substr(start, stop == std::string_view::npos ? line.npos : stop - start));
}

}  // namespace

EdgeLog parse_edge_stream(std::istream& in, const ParseOptions& options_in) {
  ParseOptions options = options_in;
  EdgeLog log;
  log.origin = LogOrigin::FirstRecord;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    const auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    view.remove_prefix(first);
    if (view.front() == '%') {
      if (view.starts_with(kEdgeLogDirective)) {
        log.origin = value_after(view, "origin=") == "seed" ? LogOrigin::Seed : LogOrigin::FirstRecord;
        options.time_column = 3;
        options.scenario_column = 4;
      }
      continue;
    }
    const auto fields = split_fields(view);
    if (fields.size() < 2) throw ParseError("expected at least two fields", line_no);

    EdgeRecord r;
    if (!parse_int(fields[0], r.source) || !parse_int(fields[1], r.target)) {
      throw ParseError("node ids must be integers", line_no);
    }
    if (r.source == 0 || r.target == 0) throw ParseError("node ids must be positive", line_no);
    r.time = static_cast<std::int64_t>(log.records.size());
    if (options.time_column > 0 && options.time_column <= fields.size()) {
      if (!parse_int(fields[options.time_column - 1], r.time)) {
        throw ParseError("timestamp must be an integer", line_no);
      }
    }
    if (options.scenario_column > 0 && options.scenario_column <= fields.size()) {
      int label = 0;
      if (!parse_int(fields[options.scenario_column - 1], label) || label < 0 || label > 5) {
        throw ParseError("scenario label must be an integer in 0..5", line_no);
      }
      if (label > 0) r.scenario = static_cast<Scenario>(label);
    }
    log.records.push_back(r);
  }
  if (log.records.empty()) throw ParseError("edge file contains no records", 0);
  std::stable_sort(log.records.begin(), log.records.end(),
                   [](const EdgeRecord& a, const EdgeRecord& b) { return a.time < b.time; });
  return log;
}

EdgeLog parse_edge_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return parse_edge_stream(in, options);
}

RelabeledLog relabel(const EdgeLog& log, NodeId seed_id) {
  RelabeledLog out;
  out.log.origin = log.origin;
  out.log.records.reserve(log.size());
  std::unordered_map<NodeId, NodeId> ids;
  auto lookup = [&](NodeId original) {
    auto [it, inserted] = ids.try_emplace(original, out.original_ids.size() + 1);
    if (inserted) out.original_ids.push_back(original);
    return it->second;
  };
  if (log.origin == LogOrigin::Seed) lookup(seed_id);
  for (const auto& r : log.records) {
    EdgeRecord mapped = r;
    mapped.source = lookup(r.source);
    mapped.target = lookup(r.target);
    out.log.records.push_back(mapped);
  }
  return out;
}

RelabeledLog window(const EdgeLog& log, std::int64_t t_start, std::int64_t t_end) {
  if (t_start > t_end) throw std::invalid_argument("window: t_start must not exceed t_end");
  EdgeLog selected;
  selected.origin = LogOrigin::FirstRecord;
  for (const auto& r : log.records) {
    if (r.time >= t_start && r.time <= t_end) {
      EdgeRecord copy = r;
      copy.scenario.reset();
      selected.records.push_back(copy);
    }
  }
  if (selected.empty()) {
    throw std::invalid_argument("window [" + std::to_string(t_start) + ", " + std::to_string(t_end) +
                                "] contains no records");
  }
  return relabel(selected);
}

// ---------------------------------------------------------------------------
// Export

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_edge_log(std::ostream& out, const EdgeLog& log) {
  out << kEdgeLogDirective << " origin=" << to_string(log.origin)
      << " columns=source,target,time,scenario\n";
  for (const auto& r : log.records) {
    out << r.source << ' ' << r.target << ' ' << r.time << ' '
        << (r.scenario ? to_int(*r.scenario) : 0) << '\n';
  }
}

void write_ccdf_csv(std::ostream& out, const std::vector<CcdfPoint>& points) {
  out << "m,value\n";
  for (const auto& pt : points) out << pt.m << ',' << format_double(pt.value) << '\n';
}

void write_limit_pmf_csv(std::ostream& out, const LimitPmf& pmf) {
  out << "m,psi_in,psi_out\n";
  const std::size_t rows = std::min(pmf.psi_in.size(), pmf.psi_out.size());
  for (std::size_t m = 0; m < rows; ++m) {
    out << m << ',' << format_double(pmf.psi_in[m]) << ',' << format_double(pmf.psi_out[m]) << '\n';
  }
}

void write_degree_counts_csv(std::ostream& out, const DegreeCounts& counts) {
  out << "m,in_count,out_count\n";
  const std::size_t rows = std::max(counts.in_counts.size(), counts.out_counts.size());
  for (std::size_t m = 0; m < rows; ++m) {
    out << m << ',' << counts.count(Direction::In, m) << ',' << counts.count(Direction::Out, m)
        << '\n';
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iteration,alpha,beta,gamma,xi,eta,p,delta_in,delta_out,log_posterior\n";
  for (const auto& row : trace) {
    const auto& t = row.theta;
    out << row.iteration;
    for (double v : {t.alpha, t.beta, t.gamma, t.xi, t.eta, t.p, t.delta_in, t.delta_out,
                     row.log_posterior}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

std::vector<CcdfPoint> read_ccdf_csv(std::istream& in) {
  std::vector<CcdfPoint> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "m,value") throw ParseError("expected header m,value", line_no);
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected two columns", line_no);
    CcdfPoint pt{};
    if (!parse_int(std::string_view(line).substr(0, comma), pt.m)) {
      throw ParseError("m must be an integer", line_no);
    }
    try {
      std::size_t used = 0;
      const std::string value = line.substr(comma + 1);
      pt.value = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ParseError("value must be a number", line_no);
    }
    points.push_back(pt);
  }
  return points;
}

nlohmann::json to_json(const HybridParams& t) {
  return {{"alpha", t.alpha}, {"beta", t.beta},         {"gamma", t.gamma},
          {"xi", t.xi},       {"eta", t.eta},           {"p", t.p},
          {"delta_in", t.delta_in}, {"delta_out", t.delta_out}};
}

HybridParams params_from_json(const nlohmann::json& j) {
  HybridParams t;
  t.alpha = j.at("alpha").get<double>();
  t.beta = j.at("beta").get<double>();
  t.gamma = j.at("gamma").get<double>();
  t.xi = j.value("xi", 0.0);
  t.eta = j.value("eta", 0.0);
  t.p = j.at("p").get<double>();
  t.delta_in = j.at("delta_in").get<double>();
  t.delta_out = j.at("delta_out").get<double>();
  validate(t);
  return t;
}

nlohmann::json to_json(const std::vector<CcdfPoint>& points) {
  auto arr = nlohmann::json::array();
  for (const auto& pt : points) arr.push_back({{"m", pt.m}, {"value", pt.value}});
  return arr;
}

nlohmann::json to_json(const LimitPmf& pmf) {
  return {{"params", to_json(pmf.params)},
          {"truncation_m", pmf.truncation_m},
          {"mass_certified", pmf.mass_certified},
          {"psi_in", pmf.psi_in},
          {"psi_out", pmf.psi_out}};
}

nlohmann::json to_json(const DegreeCounts& counts) {
  return {{"n_nodes", counts.n_nodes},
          {"n_edges", counts.n_edges},
          {"in_counts", counts.in_counts},
          {"out_counts", counts.out_counts}};
}

nlohmann::json to_json(const EstimationResult& r) {
  nlohmann::json j = {{"point", to_json(r.point)},
                      {"log_likelihood", r.log_likelihood},
                      {"converged", r.converged},
                      {"message", r.message},
                      {"iterations", r.iterations},
                      {"evaluations", r.evaluations},
                      {"trace_length", r.trace.size()}};
  j["acceptance_rate"] = r.acceptance_rate ? nlohmann::json(*r.acceptance_rate) : nlohmann::json();
  return j;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

template <typename T, typename CsvWriter>
void export_generic(const std::filesystem::path& path, const T& value, ExportFormat format,
                    CsvWriter&& csv) {
  auto out = open_output(path);
  if (format == ExportFormat::Csv) {
    csv(out, value);
  } else {
    out << to_json(value).dump(2) << '\n';
  }
  finish(out, path);
}

}  // namespace

void export_to(const std::filesystem::path& path, const std::vector<CcdfPoint>& points,
               ExportFormat format) {
  export_generic(path, points, format, write_ccdf_csv);
}

void export_to(const std::filesystem::path& path, const LimitPmf& pmf, ExportFormat format) {
  export_generic(path, pmf, format, write_limit_pmf_csv);
}

void export_to(const std::filesystem::path& path, const DegreeCounts& counts, ExportFormat format) {
  export_generic(path, counts, format, write_degree_counts_csv);
}

void export_to(const std::filesystem::path& path, const std::vector<TraceRow>& trace,
               ExportFormat format) {
  auto out = open_output(path);
  if (format == ExportFormat::Csv) {
    write_trace_csv(out, trace);
  } else {
    auto arr = nlohmann::json::array();
    for (const auto& row : trace) {
      arr.push_back({{"iteration", row.iteration},
                     {"theta", to_json(row.theta)},
                     {"log_posterior", row.log_posterior}});
    }
    out << arr.dump(2) << '\n';
  }
  finish(out, path);
}

void export_to(const std::filesystem::path& path, const EdgeLog& log) {
  auto out = open_output(path);
  write_edge_log(out, log);
  finish(out, path);
}

}  // namespace hrn
