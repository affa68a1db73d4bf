#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hrn/degree_stats.hpp"
#include "hrn/estimation.hpp"
#include "hrn/network.hpp"

namespace hrn {

/// Malformed input, reported with its 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ParseOptions {
  /// 1-based column holding the UNIX timestamp; 0 uses the record order.
  /// A missing column on a line also falls back to record order.
  std::size_t time_column = 3;
  /// 1-based column holding a scenario label (1..5); 0 disables.
  std::size_t scenario_column = 0;
};

/// Whitespace-separated "source target [time ...]" lines; '%' starts a
/// comment line. Records keep file order, then are stably sorted by time.
/// Logs written by write_edge_log carry a '% hrn-edge-log' directive that
/// restores their origin and scenario column. Raw files get origin
/// FirstRecord.
EdgeLog parse_edge_file(const std::filesystem::path& path, const ParseOptions& options = {});
EdgeLog parse_edge_stream(std::istream& in, const ParseOptions& options = {});

struct RelabeledLog {
  EdgeLog log;
  /// original_ids[i] is the original id of dense node i + 1.
  std::vector<NodeId> original_ids;
};

/// Dense relabeling by first appearance (source before target). For Seed
/// origin, original id `seed_id` becomes node 1 (the seed) and keeps that
/// slot even if the log never mentions it. Logged scenario labels are kept.
RelabeledLog relabel(const EdgeLog& log, NodeId seed_id = 1);

/// Records with t_start <= time <= t_end, relabeled densely, with origin
/// FirstRecord. Throws std::invalid_argument on an empty window or
/// t_start > t_end.
RelabeledLog window(const EdgeLog& log, std::int64_t t_start, std::int64_t t_end);

// ---------------------------------------------------------------------------
// Export. CSV numbers use 17 significant digits; output is byte-stable.

std::string format_double(double v);

void write_edge_log(std::ostream& out, const EdgeLog& log);
void write_ccdf_csv(std::ostream& out, const std::vector<CcdfPoint>& points);
void write_limit_pmf_csv(std::ostream& out, const LimitPmf& pmf);
void write_degree_counts_csv(std::ostream& out, const DegreeCounts& counts);
/// Header iteration,alpha,beta,gamma,xi,eta,p,delta_in,delta_out,log_posterior
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

/// Reads back the (m, value) CSV written by write_ccdf_csv.
std::vector<CcdfPoint> read_ccdf_csv(std::istream& in);

nlohmann::json to_json(const HybridParams& params);
nlohmann::json to_json(const std::vector<CcdfPoint>& points);
nlohmann::json to_json(const LimitPmf& pmf);
nlohmann::json to_json(const DegreeCounts& counts);
nlohmann::json to_json(const EstimationResult& result);
HybridParams params_from_json(const nlohmann::json& j);

enum class ExportFormat : std::uint8_t { Csv, Json };

/// Writes the object to `path` in the requested format. Throws
/// std::runtime_error on I/O failure.
void export_to(const std::filesystem::path& path, const std::vector<CcdfPoint>& points,
               ExportFormat format);
void export_to(const std::filesystem::path& path, const LimitPmf& pmf, ExportFormat format);
void export_to(const std::filesystem::path& path, const DegreeCounts& counts, ExportFormat format);
void export_to(const std::filesystem::path& path, const std::vector<TraceRow>& trace,
               ExportFormat format);
void export_to(const std::filesystem::path& path, const EdgeLog& log);

}  // namespace hrn
