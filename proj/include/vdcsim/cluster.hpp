#pragma once

// Cluster reservation timeline. Tracks per-node core/memory occupancy and the
// total power draw against a fixed budget. Reservations are half-open
// [start_s, end_s) intervals pinned to explicit node ids.
//
// Power accounting: the idle draw of every node is always inside the budget,
// whether or not anything runs. A reservation adds only its increment over the
// idle draw of the nodes it holds.

#include "vdcsim/errors.hpp"
#include "vdcsim/resources.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace vdcsim {

struct Reservation {
    std::string job_id;
    std::vector<int> node_ids;
    ResourceConfig config;
    double start_s = 0.0;
    double end_s = 0.0;
    bool is_placeholder = false;
};

struct Utilization {
    double core_fraction = 0.0;
    double mem_fraction = 0.0;
    double power_fraction = 0.0;
};

// Power drawn by an allocation, independent of what runs on it.
double config_power(const ResourceConfig& cfg, const NodeSpec& spec);

class ClusterState {
  public:
    ClusterState(NodeSpec spec, int node_count, double power_budget_fraction);

    const NodeSpec& node_spec() const { return spec_; }
    int node_count() const { return node_count_; }
    double power_budget_fraction() const { return budget_fraction_; }
    double power_budget_w() const { return budget_w_; }
    double idle_draw_w() const { return idle_base_w_; }
    const std::vector<Reservation>& reservations() const { return reservations_; }

    struct Placement {
        double start_s = 0.0;
        std::vector<int> node_ids;
    };

    // Earliest start >= not_before_s at which cfg fits for duration_s under
    // the power budget, with the lowest-index free nodes. nullopt when the
    // request exceeds total capacity and can never fit, or when no start
    // exists at or before give_up_after_s (callers that only care about
    // starts up to some horizon use it to bound the scan).
    std::optional<Placement> find_placement(
        const ResourceConfig& cfg, double power_w, double duration_s, double not_before_s,
        double give_up_after_s = std::numeric_limits<double>::infinity()) const;
    std::optional<double> earliest_feasible_start(
        const ResourceConfig& cfg, double power_w, double duration_s, double not_before_s,
        double give_up_after_s = std::numeric_limits<double>::infinity()) const;

    // Commits a reservation after re-verifying capacity on its exact nodes and
    // window. A conflicting reservation is a consistency_error: callers are
    // expected to reserve only what a placement search returned.
    void reserve(const Reservation& r);

    // Ends job_id's reservation at at_s. at_s <= start removes it entirely;
    // at_s inside the window truncates it. The job must still be active at
    // at_s.
    void release(const std::string& job_id, double at_s);

    // Time-integrated fractions over [t0, t1): busy core share, held memory
    // share, and power draw (idle floor included) over the budget.
    Utilization utilization(double t0, double t1) const;

    double free_cores_at(int node, double t) const;
    double free_mem_at(int node, double t) const;
    double draw_at(double t) const;
    double max_draw(double t0, double t1) const;

    // Re-walks the whole timeline and throws consistency_error if any instant
    // oversubscribes a node or the power budget.
    void audit() const;

    // Drops reservations ending at or before t from the searchable timeline.
    // They stay in the archive for utilization integrals and audits. After
    // prune(t), placement queries must use not_before_s >= t.
    void prune(double t);

    // Copy holding only the still-searchable reservations. Placement queries
    // behave exactly like on the original; the pruned history (and with it
    // utilization integrals over the past) is not carried along. Meant for
    // throwaway what-if planning.
    ClusterState planning_copy() const;

  private:
    // Memory and power are compared in integer micro-units (requests rounded
    // up, capacities rounded down) so occupancy sums are exact and
    // order-independent: a release can never make an already-admitted
    // timeline read as oversubscribed.
    struct NodeEvent {
        double t;
        int node;
        int dcores;
        std::int64_t dmem_u;
    };
    struct PowerEvent {
        double t;
        std::int64_t dpower_u;
    };

    void rebuild();
    double increment_w_of(const Reservation& r) const;
    std::int64_t increment_u_of(const Reservation& r) const;

    NodeSpec spec_;
    int node_count_ = 0;
    double budget_fraction_ = 1.0;
    double budget_w_ = 0.0;
    double idle_base_w_ = 0.0;
    std::int64_t budget_u_ = 0;
    std::int64_t idle_base_u_ = 0;
    std::int64_t mem_cap_u_ = 0;
    double prune_time_ = 0.0;
    std::vector<Reservation> reservations_;
    std::vector<NodeEvent> node_events_;   // active tail only, sorted by (t, insertion order)
    std::vector<PowerEvent> power_events_; // active tail only, sorted by (t, insertion order)
};

// Parses a cluster description. budget_override > 0 replaces the file's
// power_budget_fraction.
ClusterState parse_cluster(const std::string& json_text, double budget_override);
ClusterState load_cluster(const std::string& path, double budget_override);
std::string cluster_to_json(const ClusterState& cs);

} // namespace vdcsim
