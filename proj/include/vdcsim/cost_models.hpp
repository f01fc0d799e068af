#ifndef VDCSIM_COST_MODELS_HPP
#define VDCSIM_COST_MODELS_HPP

#include "vdcsim/resources.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vdcsim {

// Closed-form stand-in for an empirically fitted job model: Amdahl split
// plus a log-term communication cost, slowed linearly by power capping.
struct JobTypeProfile {
    std::string name;
    double t_serial_s = 0.0;
    double t_parallel_s = 0.0;
    double comm_coeff_s = 0.0;
    double cap_sensitivity = 0.0;
    double mem_per_unit_gb = 1.0;
    double size_exponent = 1.0;
    bool supports_hybrid = false;

    void validate() const;
};

struct CostEstimate {
    double exec_time_s = 0.0;
    double avg_power_w = 0.0;
    double energy_j = 0.0;
};

double predict_exec_time(const JobTypeProfile& profile, double size, std::int64_t iterations,
                         const ResourceConfig& cfg);

// nodes * (idle + cap * TDP_per_cpu * cpus_used). Throws capacity_error if
// the config asks for more cores than a node has.
double predict_power(const JobTypeProfile& profile, const ResourceConfig& cfg,
                     const NodeSpec& node_spec);

CostEstimate estimate(const JobTypeProfile& profile, double size, std::int64_t iterations,
                      const ResourceConfig& cfg, const NodeSpec& node_spec);

// Admissibility: the config supplies enough total memory for the problem.
bool memory_feasible(const JobTypeProfile& profile, double size, const ResourceConfig& cfg);

// Smallest per-node memory share that memory_feasible accepts for the job
// spread across `nodes` nodes (the plain quotient can land one ulp short).
double mem_share_per_node(const JobTypeProfile& profile, double size, int nodes);

struct Catalog {
    int schema_version = 1;
    std::vector<JobTypeProfile> profiles;

    const JobTypeProfile& find(const std::string& name) const;
};

// Checks the fixed benchmark set: each of the eight names exactly once,
// hybrid flags exactly on LU, BT, SP.
void validate_catalog(const Catalog& catalog);

Catalog builtin_catalog();
Catalog parse_catalog(const std::string& json_text);
Catalog load_catalog(const std::string& path);
std::string catalog_to_json(const Catalog& catalog);

} // namespace vdcsim

#endif
