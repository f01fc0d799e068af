#pragma once

// The mapping heuristic family. All heuristics are pure planning passes over
// the pending queue: they commit reservations into the cluster state and
// return the decisions in commit order. A task whose value is zero for every
// admissible config at the current state is reported dead; the timeline only
// ever gains reservations, so such a task can never become mappable again.

#include "vdcsim/cluster.hpp"
#include "vdcsim/cost_models.hpp"
#include "vdcsim/trace.hpp"
#include "vdcsim/value_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vdcsim {

enum class Heuristic { simple, vptr, vpt, vpt_cpc, vpt_jspc, hybrid };

Heuristic heuristic_from_name(const std::string& name);
std::string heuristic_name(Heuristic h);
const std::vector<double>& default_cap_grid(); // {0.55, 0.70, 0.85, 1.00}

struct TarWeights {
    double w_core = 1.0;
    double w_ram = 1.0;
};

// Total allocated resources: exec time weighted by the share of the whole
// system's cores and RAM the job holds.
double tar(double exec_time_s, double core_fraction, double ram_fraction,
           const TarWeights& weights = TarWeights{});
double vptr_score(double predicted_value, double tar_resource_seconds);

struct PendingTask {
    std::string job_id;
    double arrival_s = 0.0;
    std::string profile_ref;
    double size = 1.0;
    std::int64_t iterations = 1;
    double gamma = 1.0;
    ValueCurve perf_curve;
    ValueCurve energy_curve;
    int min_nodes = 1;
    int max_nodes = 1;
    std::vector<double> allowed_caps;

    void validate() const;
};

PendingTask task_from_record(const TraceRecord& r);

struct MappingDecision {
    std::string job_id;
    ResourceConfig config;
    std::vector<int> node_ids;
    double start_s = 0.0;
    CostEstimate predicted;
    double predicted_value = 0.0;
    double score = 0.0;
};

struct MappingResult {
    std::vector<MappingDecision> decisions;
    // Tasks with zero value under every admissible config at the pre-event
    // state; never mappable again.
    std::vector<std::string> dead;
};

struct SchedContext {
    const Catalog* catalog = nullptr;
    double w_perf = 0.5;
    double w_energy = 0.5;
    TarWeights tar_weights;
};

// Best single-task decision by value / total-allocated-resources, over all
// admissible (node count, cap) configs with positive predicted value.
std::optional<MappingDecision> best_config_vptr(const PendingTask& task,
                                                const ClusterState& state,
                                                const SchedContext& ctx, double now_s);

MappingResult map_batch_vptr(const std::vector<PendingTask>& queue, ClusterState& state,
                             const SchedContext& ctx, double now_s);
MappingResult map_batch_simple(const std::vector<PendingTask>& queue, ClusterState& state,
                               const SchedContext& ctx, double now_s);
MappingResult map_batch_vpt_family(Heuristic variant, const std::vector<PendingTask>& queue,
                                   ClusterState& state, const SchedContext& ctx, double now_s);

// Dispatch on heuristic name.
MappingResult map_batch(Heuristic h, const std::vector<PendingTask>& queue, ClusterState& state,
                        const SchedContext& ctx, double now_s);

} // namespace vdcsim
