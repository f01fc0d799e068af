#ifndef VDCSIM_TRACE_HPP
#define VDCSIM_TRACE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace vdcsim {

// One workload job as stored in a trace CSV. Both value curves share
// v_max and v_min_frac; the four thresholds are per-objective.
struct TraceRecord {
    double arrival_s = 0.0;
    std::string job_name;
    std::string job_type;
    double gamma = 1.0;
    double v_max = 10.0;
    double v_min_frac = 0.1;
    double problem_size = 1.0;
    std::int64_t iterations = 1;
    int nodes_min = 1;
    int nodes_max = 1;
    double perf_soft_s = 0.0;
    double perf_hard_s = 0.0;
    double energy_soft_j = 0.0;
    double energy_hard_j = 0.0;
};

struct WorkloadTrace {
    std::vector<TraceRecord> jobs;

    bool empty() const { return jobs.empty(); }
    std::size_t size() const { return jobs.size(); }
};

// Structural checks that need no catalog: non-negative arrivals sorted
// ascending, unique job names, sane ranges and thresholds.
// Throws validation_error naming the first offending record.
void validate_trace(const WorkloadTrace& trace);

} // namespace vdcsim

#endif
