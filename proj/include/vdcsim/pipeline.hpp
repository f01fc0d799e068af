#pragma once

// Windowed stream-query pipelines: Fetch -> Window -> Aggregate -> Sink
// graphs, a desk-scale event-time execution engine over replayable streams,
// edge/VDC placement by worst-case window state, and a compiler turning
// VDC-placed recurring operators into workload trace jobs.

#include "vdcsim/cost_models.hpp"
#include "vdcsim/resources.hpp"
#include "vdcsim/trace.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vdcsim {

enum class OperatorKind { fetch, window, aggregate, sink };
enum class AggregateFn { min, max, mean, count };
enum class WindowKind { sliding, landmark };
enum class Placement { unplaced, edge, vdc };

OperatorKind operator_kind_from_name(const std::string& name);
std::string operator_kind_name(OperatorKind k);
AggregateFn aggregate_from_name(const std::string& name);
std::string aggregate_name(AggregateFn fn);
WindowKind window_kind_from_name(const std::string& name);
std::string window_kind_name(WindowKind k);

// Sliding windows trail the tick: contents are (tick - length_s, tick].
// Landmark windows are anchored: contents are [landmark_start_s, tick].
struct WindowSpec {
    WindowKind kind = WindowKind::sliding;
    double length_s = 60.0;
    double landmark_start_s = 0.0;
};

struct OperatorNode {
    std::string id;
    OperatorKind kind = OperatorKind::fetch;
    std::string source; // fetch: stream name; sink: output target name
    std::string field;  // informational: the measured quantity
    WindowSpec window;
    AggregateFn fn = AggregateFn::max;
    double recurrence_s = 0.0;            // aggregate evaluation period
    std::int64_t state_budget_bytes = 0;  // window buffer cap; 0 = unlimited
    Placement placement = Placement::unplaced;
};

struct PipelineGraph {
    std::vector<OperatorNode> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
};

// In-memory size of one buffered record: timestamp, key, value.
inline constexpr std::int64_t stream_record_bytes = 24;

// Structural checks: unique ids, chain typing (fetch feeds windows, windows
// feed exactly one aggregate, aggregates feed sinks), no cycles, every
// non-fetch node reachable from a fetch, positive recurrences and window
// lengths. Returns the violations instead of throwing; empty means valid.
std::vector<std::string> validate_pipeline(const PipelineGraph& graph);

struct StreamRecord {
    double timestamp_s = 0.0;
    std::string key;
    double value = 0.0;
};

struct SinkSeries {
    std::string sink_id;
    std::vector<std::pair<double, double>> ticks; // (tick_s, value)
};

struct ExecutionResult {
    std::vector<SinkSeries> sinks;                          // sink node order
    std::map<std::string, std::int64_t> overflow_evictions; // per window id
};

// Streams keyed by source name, each sorted by timestamp.
using StreamSet = std::map<std::string, std::vector<StreamRecord>>;

// Runs every aggregate at ticks k * recurrence_s up to horizon_s. Empty
// windows emit nothing for min/max/mean and 0 for count. A window over its
// byte budget evicts oldest-first and counts the loss; execution refuses
// graphs with vdc-placed operators (those are compiled, not run here).
ExecutionResult execute(const PipelineGraph& graph, const StreamSet& streams, double horizon_s);

// Tags every operator: fetches stay on the edge; a window (with its
// aggregate and sinks) stays on the edge only if its worst-case state,
// length_s * assumed_rate_hz * record_bytes, fits both the global edge
// budget and its own state_budget_bytes. Landmark windows grow without
// bound and always go to the vdc under a finite budget.
PipelineGraph place(const PipelineGraph& graph, std::int64_t edge_budget_bytes,
                    double assumed_rate_hz, std::int64_t record_bytes = stream_record_bytes);

struct CompileOptions {
    std::map<AggregateFn, std::string> job_type_of = {{AggregateFn::min, "IS"},
                                                      {AggregateFn::max, "IS"},
                                                      {AggregateFn::mean, "EP"},
                                                      {AggregateFn::count, "EP"}};
    double gamma = 1.0;
    double v_max = 50.0;
    double v_min_frac = 0.1;
    double problem_size = 1.0;
    std::int64_t iterations = 1;
    int nodes_min = 1;
    int nodes_max = 4;
    NodeSpec node_spec; // reference hardware for the energy thresholds
    double energy_soft_mult = 2.0;
    double energy_hard_mult = 4.0;
};

// One job per recurrence tick of every vdc-placed aggregate, merged and
// sorted by arrival. Results must land before the next tick: perf soft
// threshold = recurrence, hard = 2x. Energy thresholds are multiples of the
// job's own min-config predicted energy.
WorkloadTrace compile_to_jobs(const PipelineGraph& graph, double horizon_s,
                              const Catalog& catalog, const CompileOptions& opts = {});

// EVERY <n> <unit> COMPUTE <fn> OF <field> OVER LAST <n> <unit> FROM <source>
PipelineGraph parse_query(const std::string& text);

PipelineGraph parse_pipeline(const std::string& json_text);
PipelineGraph load_pipeline(const std::string& path);
std::string pipeline_to_json(const PipelineGraph& graph);

// Stream CSV columns: timestamp_s,key,value. Timestamps must be
// non-decreasing within one file.
std::vector<StreamRecord> parse_stream_csv(const std::string& text, const std::string& origin);
std::vector<StreamRecord> read_stream(const std::string& path);
std::string stream_to_csv(const std::vector<StreamRecord>& records);
std::string sink_series_to_csv(const SinkSeries& series);

// Poisson arrivals per key, lognormal values: the shape of download-speed
// measurements.
struct StreamGenParams {
    double horizon_s = 600.0;
    int keys = 3;
    double rate_per_key_hz = 0.2;
    double lognormal_mu = 2.0;
    double lognormal_sigma = 0.5;
    std::uint64_t seed = 1;
};

std::vector<StreamRecord> generate_stream(const StreamGenParams& params);

} // namespace vdcsim
