#pragma once

// Discrete-event simulation over a workload trace. Arrivals and completions
// trigger mapping invocations; completions bank value into the period ledger.
// The run is RNG-free: identical inputs give byte-identical reports and event
// logs.

#include "vdcsim/cluster.hpp"
#include "vdcsim/cost_models.hpp"
#include "vdcsim/scheduler.hpp"
#include "vdcsim/trace.hpp"
#include "vdcsim/value_model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vdcsim {

struct SimConfig {
    Heuristic heuristic = Heuristic::vptr;
    double w_perf = 0.5;
    double w_energy = 0.5;
    TarWeights tar_weights;
    double vos_period_s = 3600.0;
    std::string trace_label = "trace";
    // Re-audits the whole timeline at every mapping event. Quadratic; meant
    // for tests and debug runs. A full audit always runs once at the horizon.
    bool paranoid_audit = false;
};

struct SimReport {
    std::string trace_label;
    std::string heuristic;
    double power_budget_fraction = 0.0;
    double total_vos = 0.0;
    double normalized_vos = 0.0;
    double perf_value_total = 0.0;
    double energy_value_total = 0.0;
    std::int64_t jobs_completed = 0;
    std::int64_t jobs_zero_value = 0;
    std::int64_t jobs_unmapped = 0;
    double mean_turnaround_s = 0.0;
    double mean_util_core = 0.0;
    double mean_util_mem = 0.0;
    double mean_util_power = 0.0;
    double horizon_s = 0.0;
    std::vector<std::pair<std::int64_t, double>> vos_series; // (period, value)
};

struct SimResult {
    SimReport report;
    std::vector<std::string> events; // NDJSON lines, one per event
};

// Runs the trace to completion on a private copy of the cluster.
SimResult run(const WorkloadTrace& trace, const ClusterState& cluster, const Catalog& catalog,
              const SimConfig& config);

// Cartesian product of runs: traces (outer) x heuristics x budget fractions
// (inner). labels[i] names traces[i] in the report rows.
std::vector<SimReport> sweep(const std::vector<WorkloadTrace>& traces,
                             const std::vector<std::string>& labels, const NodeSpec& node_spec,
                             int node_count, const std::vector<Heuristic>& heuristics,
                             const std::vector<double>& budget_fractions,
                             const Catalog& catalog, const SimConfig& base_config,
                             int parallel = 1);

struct MetricDelta {
    std::string metric;
    double baseline = 0.0;
    double candidate = 0.0;
    double delta_pct = 0.0; // +-infinity when the baseline is zero
};

// Per-metric percentage improvements of candidate over baseline. Both reports
// must describe the same trace and budget.
std::vector<MetricDelta> compare(const SimReport& baseline, const SimReport& candidate);

std::string report_csv_header();
std::string report_csv_row(const SimReport& r);
std::string reports_to_csv(const std::vector<SimReport>& reports);

} // namespace vdcsim
