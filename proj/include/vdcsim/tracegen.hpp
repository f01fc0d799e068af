#pragma once

// Seeded synthetic workload generation. Arrivals follow a two-rate
// piecewise-constant profile (a peak block at the start of the horizon, then a
// quieter tail); per-job fields are sampled from configurable ranges, and the
// iteration counts are rescaled so aggregate min-config demand oversubscribes
// the reference system by a target factor. Soft/hard thresholds are derived
// from each job's own min-config cost, so every job has positive value on an
// idle system.

#include "vdcsim/cost_models.hpp"
#include "vdcsim/resources.hpp"
#include "vdcsim/trace.hpp"

#include <cstdint>
#include <string>

namespace vdcsim {

struct GenParams {
    int job_count = 1000;
    double horizon_s = 180000.0; // 50 h
    double peak_fraction = 0.3;
    double peak_rate_multiplier = 5.0;
    double oversubscription = 2.0;

    // Reference system the demand target is measured against.
    int cluster_nodes = 64;
    NodeSpec node_spec;

    // Sampling ranges. Synthetic defaults, all overridable.
    double gamma_min = 1.0, gamma_max = 8.0;
    double v_max_min = 10.0, v_max_max = 100.0;
    double v_min_frac_min = 0.05, v_min_frac_max = 0.3;
    double size_min = 5.0, size_max = 40.0;
    int iter_min = 4, iter_max = 20;
    int nodes_min_lo = 1, nodes_min_hi = 4;
    int nodes_max_hi = 8;
    double perf_soft_mult_min = 1.2, perf_soft_mult_max = 3.0;
    double perf_hard_mult_min = 1.5, perf_hard_mult_max = 4.0;
    double energy_soft_mult_min = 1.2, energy_soft_mult_max = 3.0;
    double energy_hard_mult_min = 1.5, energy_hard_mult_max = 4.0;

    std::uint64_t seed = 1;

    void validate() const;
};

WorkloadTrace generate(const GenParams& params, const Catalog& catalog);

// CSV with a fixed header matching the TraceRecord field names.
WorkloadTrace read_trace(const std::string& path);
WorkloadTrace parse_trace_csv(const std::string& text, const std::string& origin);
void write_trace(const std::string& path, const WorkloadTrace& trace);
std::string trace_to_csv(const WorkloadTrace& trace);

GenParams parse_gen_params(const std::string& json_text);

} // namespace vdcsim
