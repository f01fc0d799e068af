#include "vdcsim/cluster.hpp"

#include "vdcsim/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vdcsim {

namespace {

constexpr double k_unit = 1e6;

// Requests round up, capacities round down: admission stays conservative.
std::int64_t quant_up(double v) { return static_cast<std::int64_t>(std::ceil(v * k_unit)); }
std::int64_t quant_down(double v) { return static_cast<std::int64_t>(std::floor(v * k_unit)); }

} // namespace

double config_power(const ResourceConfig& cfg, const NodeSpec& spec) {
    int cpus_used = (cfg.cores_per_node + spec.cores_per_cpu - 1) / spec.cores_per_cpu;
    return cfg.nodes *
           (spec.idle_power_w + cfg.power_cap_fraction * spec.tdp_per_cpu_w * cpus_used);
}

ClusterState::ClusterState(NodeSpec spec, int node_count, double power_budget_fraction)
    : spec_(spec), node_count_(node_count), budget_fraction_(power_budget_fraction) {
    spec_.validate();
    if (node_count_ < 1) throw validation_error("cluster needs at least one node");
    if (!(budget_fraction_ > 0.0)) throw validation_error("power budget fraction must be > 0");
    budget_w_ = budget_fraction_ * node_count_ * spec_.tdp_per_node_w();
    idle_base_w_ = node_count_ * spec_.idle_power_w;
    budget_u_ = quant_down(budget_w_);
    idle_base_u_ = quant_up(idle_base_w_);
    mem_cap_u_ = quant_down(spec_.mem_gb);
    if (idle_base_u_ > budget_u_)
        throw validation_error("power budget is below the idle draw of the nodes");
}

double ClusterState::increment_w_of(const Reservation& r) const {
    return std::max(0.0, config_power(r.config, spec_) - r.config.nodes * spec_.idle_power_w);
}

std::int64_t ClusterState::increment_u_of(const Reservation& r) const {
    return quant_up(increment_w_of(r));
}

void ClusterState::rebuild() {
    node_events_.clear();
    power_events_.clear();
    for (const Reservation& r : reservations_) {
        if (!(r.end_s > prune_time_)) continue;
        std::int64_t mem_u = quant_up(r.config.mem_per_node_gb);
        std::int64_t inc_u = increment_u_of(r);
        for (int v : r.node_ids) {
            node_events_.push_back({r.start_s, v, -r.config.cores_per_node, -mem_u});
            node_events_.push_back({r.end_s, v, r.config.cores_per_node, mem_u});
        }
        power_events_.push_back({r.start_s, inc_u});
        power_events_.push_back({r.end_s, -inc_u});
    }
    std::stable_sort(node_events_.begin(), node_events_.end(),
                     [](const NodeEvent& a, const NodeEvent& b) { return a.t < b.t; });
    std::stable_sort(power_events_.begin(), power_events_.end(),
                     [](const PowerEvent& a, const PowerEvent& b) { return a.t < b.t; });
}

void ClusterState::prune(double t) {
    if (t < prune_time_) throw consistency_error("prune time moved backwards");
    prune_time_ = t;
    rebuild();
}

ClusterState ClusterState::planning_copy() const {
    ClusterState c(spec_, node_count_, budget_fraction_);
    c.prune_time_ = prune_time_;
    for (const Reservation& r : reservations_)
        if (r.end_s > prune_time_) c.reservations_.push_back(r);
    c.rebuild();
    return c;
}

std::optional<ClusterState::Placement> ClusterState::find_placement(
    const ResourceConfig& cfg, double power_w, double duration_s, double not_before_s,
    double give_up_after_s) const {
    cfg.validate();
    if (!(duration_s > 0.0)) throw validation_error("placement duration must be > 0");
    if (not_before_s < 0.0) throw validation_error("placement start must be >= 0");
    if (power_w < 0.0) throw validation_error("placement power must be >= 0");
    if (not_before_s < prune_time_)
        throw consistency_error("placement query before the pruned timeline");

    const int need_cores = cfg.cores_per_node;
    const std::int64_t need_mem_u = quant_up(cfg.mem_per_node_gb);
    const std::int64_t inc_u =
        quant_up(std::max(0.0, power_w - cfg.nodes * spec_.idle_power_w));
    const std::int64_t headroom_u = budget_u_ - idle_base_u_;

    // Requests that exceed total capacity never fit, at any time.
    if (cfg.nodes > node_count_) return std::nullopt;
    if (need_cores > spec_.cores_per_node()) return std::nullopt;
    if (need_mem_u > mem_cap_u_) return std::nullopt;
    if (inc_u > headroom_u) return std::nullopt;

    std::vector<int> cores_free(static_cast<std::size_t>(node_count_), spec_.cores_per_node());
    std::vector<std::int64_t> mem_free(static_cast<std::size_t>(node_count_), mem_cap_u_);
    std::int64_t used_u = 0;

    std::size_t ni = 0, pi = 0;
    auto apply_through = [&](double t) {
        while (ni < node_events_.size() && node_events_[ni].t <= t) {
            const NodeEvent& e = node_events_[ni++];
            cores_free[static_cast<std::size_t>(e.node)] += e.dcores;
            mem_free[static_cast<std::size_t>(e.node)] += e.dmem_u;
        }
        while (pi < power_events_.size() && power_events_[pi].t <= t) used_u += power_events_[pi++].dpower_u;
    };
    apply_through(not_before_s);

    std::vector<int> local_cores;
    std::vector<std::int64_t> local_mem;
    std::vector<char> ok(static_cast<std::size_t>(node_count_));
    std::vector<int> touched;

    double candidate = not_before_s;
    for (;;) {
        if (candidate > give_up_after_s) return std::nullopt;
        local_cores = cores_free;
        local_mem = mem_free;
        std::int64_t local_used = used_u;
        int alive = 0;
        for (int v = 0; v < node_count_; ++v) {
            std::size_t u = static_cast<std::size_t>(v);
            ok[u] = local_cores[u] >= need_cores && local_mem[u] >= need_mem_u;
            alive += ok[u] ? 1 : 0;
        }
        bool power_ok = local_used + inc_u <= headroom_u;
        const double window_end = candidate + duration_s;
        std::size_t nj = ni, pj = pi;
        while (power_ok && alive >= cfg.nodes) {
            double t = std::numeric_limits<double>::infinity();
            if (nj < node_events_.size()) t = std::min(t, node_events_[nj].t);
            if (pj < power_events_.size()) t = std::min(t, power_events_[pj].t);
            if (!(t < window_end)) break;
            // All events at one instant act together: a release paired with a
            // start at the same time must not read as a transient violation.
            touched.clear();
            while (nj < node_events_.size() && node_events_[nj].t == t) {
                const NodeEvent& e = node_events_[nj++];
                local_cores[static_cast<std::size_t>(e.node)] += e.dcores;
                local_mem[static_cast<std::size_t>(e.node)] += e.dmem_u;
                touched.push_back(e.node);
            }
            while (pj < power_events_.size() && power_events_[pj].t == t)
                local_used += power_events_[pj++].dpower_u;
            for (int v : touched) {
                std::size_t u = static_cast<std::size_t>(v);
                if (ok[u] && !(local_cores[u] >= need_cores && local_mem[u] >= need_mem_u)) {
                    ok[u] = 0;
                    --alive;
                }
            }
            power_ok = power_ok && local_used + inc_u <= headroom_u;
        }
        if (power_ok && alive >= cfg.nodes) {
            Placement p;
            p.start_s = candidate;
            for (int v = 0; v < node_count_ && static_cast<int>(p.node_ids.size()) < cfg.nodes;
                 ++v)
                if (ok[static_cast<std::size_t>(v)]) p.node_ids.push_back(v);
            return p;
        }
        double next_t = std::numeric_limits<double>::infinity();
        if (ni < node_events_.size()) next_t = std::min(next_t, node_events_[ni].t);
        if (pi < power_events_.size()) next_t = std::min(next_t, power_events_[pi].t);
        if (!std::isfinite(next_t))
            throw consistency_error("placement scan exhausted the timeline without fitting");
        apply_through(next_t);
        candidate = next_t;
    }
}

std::optional<double> ClusterState::earliest_feasible_start(const ResourceConfig& cfg,
                                                            double power_w, double duration_s,
                                                            double not_before_s,
                                                            double give_up_after_s) const {
    auto p = find_placement(cfg, power_w, duration_s, not_before_s, give_up_after_s);
    if (!p) return std::nullopt;
    return p->start_s;
}

void ClusterState::reserve(const Reservation& r) {
    r.config.validate();
    if (r.job_id.empty()) throw validation_error("reservation needs a job_id");
    if (!(r.end_s > r.start_s)) throw validation_error("reservation window is empty");
    if (static_cast<int>(r.node_ids.size()) != r.config.nodes)
        throw validation_error("reservation node list does not match its config");
    std::vector<int> ids = r.node_ids;
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw validation_error("reservation repeats a node");
    if (ids.front() < 0 || ids.back() >= node_count_)
        throw validation_error("reservation names a node outside the cluster");
    if (r.config.cores_per_node > spec_.cores_per_node() ||
        quant_up(r.config.mem_per_node_gb) > mem_cap_u_)
        throw validation_error("reservation exceeds per-node capacity");
    for (const Reservation& existing : reservations_)
        if (existing.job_id == r.job_id)
            throw validation_error("duplicate reservation for job " + r.job_id);
    if (r.start_s < prune_time_)
        throw consistency_error("reservation starts before the pruned timeline");

    // Re-verify on the exact nodes and window; reserving something the search
    // did not return is a scheduler bug.
    const int need_cores = r.config.cores_per_node;
    const std::int64_t need_mem_u = quant_up(r.config.mem_per_node_gb);
    const std::int64_t inc_u = increment_u_of(r);
    const std::int64_t headroom_u = budget_u_ - idle_base_u_;

    std::vector<int> cores_free(static_cast<std::size_t>(node_count_), spec_.cores_per_node());
    std::vector<std::int64_t> mem_free(static_cast<std::size_t>(node_count_), mem_cap_u_);
    std::int64_t used_u = 0;
    std::size_t ni = 0, pi = 0;
    auto apply_through = [&](double t) {
        while (ni < node_events_.size() && node_events_[ni].t <= t) {
            const NodeEvent& e = node_events_[ni++];
            cores_free[static_cast<std::size_t>(e.node)] += e.dcores;
            mem_free[static_cast<std::size_t>(e.node)] += e.dmem_u;
        }
        while (pi < power_events_.size() && power_events_[pi].t <= t) used_u += power_events_[pi++].dpower_u;
    };
    apply_through(r.start_s);
    auto fits = [&]() {
        for (int v : r.node_ids) {
            std::size_t u = static_cast<std::size_t>(v);
            if (cores_free[u] < need_cores || mem_free[u] < need_mem_u) return false;
        }
        return used_u + inc_u <= headroom_u;
    };
    double t = r.start_s;
    for (;;) {
        if (!fits())
            throw consistency_error("reservation for " + r.job_id +
                                    " conflicts with the committed timeline");
        double next_t = std::numeric_limits<double>::infinity();
        if (ni < node_events_.size()) next_t = std::min(next_t, node_events_[ni].t);
        if (pi < power_events_.size()) next_t = std::min(next_t, power_events_[pi].t);
        if (!(next_t < r.end_s)) break;
        apply_through(next_t);
        t = next_t;
    }
    (void)t;
    reservations_.push_back(r);
    rebuild();
}

void ClusterState::release(const std::string& job_id, double at_s) {
    for (std::size_t i = 0; i < reservations_.size(); ++i) {
        Reservation& r = reservations_[i];
        if (r.job_id != job_id || !(r.end_s > at_s)) continue;
        if (at_s <= r.start_s) {
            reservations_.erase(reservations_.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            r.end_s = at_s;
        }
        rebuild();
        return;
    }
    throw validation_error("no active reservation for job " + job_id);
}

Utilization ClusterState::utilization(double t0, double t1) const {
    if (!(t1 > t0)) throw validation_error("utilization window is empty");
    const double dt = t1 - t0;
    double core_s = 0.0, mem_s = 0.0, inc_s = 0.0;
    for (const Reservation& r : reservations_) {
        double overlap = std::min(r.end_s, t1) - std::max(r.start_s, t0);
        if (overlap <= 0.0) continue;
        core_s += overlap * r.config.nodes * r.config.cores_per_node;
        mem_s += overlap * r.config.nodes * r.config.mem_per_node_gb;
        inc_s += overlap * increment_w_of(r);
    }
    Utilization u;
    u.core_fraction = core_s / (static_cast<double>(node_count_) * spec_.cores_per_node() * dt);
    u.mem_fraction = mem_s / (static_cast<double>(node_count_) * spec_.mem_gb * dt);
    u.power_fraction = (idle_base_w_ * dt + inc_s) / (budget_w_ * dt);
    return u;
}

double ClusterState::free_cores_at(int node, double t) const {
    if (node < 0 || node >= node_count_) throw validation_error("node index out of range");
    int used = 0;
    for (const Reservation& r : reservations_) {
        if (!(r.start_s <= t && t < r.end_s)) continue;
        if (std::find(r.node_ids.begin(), r.node_ids.end(), node) != r.node_ids.end())
            used += r.config.cores_per_node;
    }
    return spec_.cores_per_node() - used;
}

double ClusterState::free_mem_at(int node, double t) const {
    if (node < 0 || node >= node_count_) throw validation_error("node index out of range");
    double used = 0.0;
    for (const Reservation& r : reservations_) {
        if (!(r.start_s <= t && t < r.end_s)) continue;
        if (std::find(r.node_ids.begin(), r.node_ids.end(), node) != r.node_ids.end())
            used += r.config.mem_per_node_gb;
    }
    return spec_.mem_gb - used;
}

double ClusterState::draw_at(double t) const {
    std::int64_t used_u = 0;
    for (const Reservation& r : reservations_)
        if (r.start_s <= t && t < r.end_s) used_u += increment_u_of(r);
    return idle_base_w_ + static_cast<double>(used_u) / k_unit;
}

double ClusterState::max_draw(double t0, double t1) const {
    if (!(t1 > t0)) throw validation_error("window is empty");
    std::vector<PowerEvent> evs;
    for (const Reservation& r : reservations_) {
        std::int64_t inc_u = increment_u_of(r);
        evs.push_back({r.start_s, inc_u});
        evs.push_back({r.end_s, -inc_u});
    }
    std::stable_sort(evs.begin(), evs.end(),
                     [](const PowerEvent& a, const PowerEvent& b) { return a.t < b.t; });
    std::int64_t used_u = 0, max_u = 0;
    std::size_t i = 0;
    while (i < evs.size() && evs[i].t <= t0) used_u += evs[i++].dpower_u;
    max_u = used_u;
    while (i < evs.size() && evs[i].t < t1) {
        double t = evs[i].t;
        while (i < evs.size() && evs[i].t == t) used_u += evs[i++].dpower_u;
        max_u = std::max(max_u, used_u);
    }
    return idle_base_w_ + static_cast<double>(max_u) / k_unit;
}

void ClusterState::audit() const {
    struct Ev {
        double t;
        int node;
        int dcores;
        std::int64_t dmem_u;
        std::int64_t dpower_u;
    };
    std::vector<Ev> evs;
    for (const Reservation& r : reservations_) {
        if (r.job_id.empty() || !(r.end_s > r.start_s) ||
            static_cast<int>(r.node_ids.size()) != r.config.nodes)
            throw consistency_error("malformed reservation in timeline");
        std::int64_t mem_u = quant_up(r.config.mem_per_node_gb);
        std::int64_t inc_u = increment_u_of(r);
        bool first = true;
        for (int v : r.node_ids) {
            if (v < 0 || v >= node_count_)
                throw consistency_error("reservation names a node outside the cluster");
            evs.push_back({r.start_s, v, -r.config.cores_per_node, -mem_u, first ? inc_u : 0});
            evs.push_back({r.end_s, v, r.config.cores_per_node, mem_u, first ? -inc_u : 0});
            first = false;
        }
    }
    std::stable_sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) { return a.t < b.t; });
    std::vector<int> cores_free(static_cast<std::size_t>(node_count_), spec_.cores_per_node());
    std::vector<std::int64_t> mem_free(static_cast<std::size_t>(node_count_), mem_cap_u_);
    std::int64_t used_u = 0;
    std::size_t i = 0;
    while (i < evs.size()) {
        double t = evs[i].t;
        while (i < evs.size() && evs[i].t == t) {
            const Ev& e = evs[i++];
            std::size_t u = static_cast<std::size_t>(e.node);
            cores_free[u] += e.dcores;
            mem_free[u] += e.dmem_u;
            used_u += e.dpower_u;
        }
        for (int v = 0; v < node_count_; ++v) {
            std::size_t u = static_cast<std::size_t>(v);
            if (cores_free[u] < 0 || cores_free[u] > spec_.cores_per_node())
                throw consistency_error("node core occupancy out of range");
            if (mem_free[u] < 0 || mem_free[u] > mem_cap_u_)
                throw consistency_error("node memory occupancy out of range");
        }
        if (used_u < 0) throw consistency_error("negative aggregate power increment");
        if (idle_base_u_ + used_u > budget_u_)
            throw consistency_error("power draw exceeds the budget");
    }
}

ClusterState parse_cluster(const std::string& json_text, double budget_override) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad cluster file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("schema_version") ||
        !j["schema_version"].is_number_integer())
        throw validation_error("cluster file is missing schema_version");
    if (j["schema_version"].get<int>() != 1)
        throw validation_error("unsupported cluster schema_version");
    for (const char* key : {"node_count", "power_budget_fraction", "node_spec"})
        if (!j.contains(key))
            throw validation_error(std::string("cluster file is missing ") + key);
    const auto& ns = j["node_spec"];
    NodeSpec spec;
    try {
        spec.cpus_per_node = ns.at("cpus_per_node").get<int>();
        spec.cores_per_cpu = ns.at("cores_per_cpu").get<int>();
        spec.mem_gb = ns.at("mem_gb").get<double>();
        spec.tdp_per_cpu_w = ns.at("tdp_per_cpu_w").get<double>();
        spec.idle_power_w = ns.at("idle_power_w").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad node_spec: ") + e.what());
    }
    int node_count = j["node_count"].get<int>();
    double fraction = j["power_budget_fraction"].get<double>();
    if (budget_override > 0.0) fraction = budget_override;
    return ClusterState(spec, node_count, fraction);
}

ClusterState load_cluster(const std::string& path, double budget_override) {
    return parse_cluster(read_text_file(path), budget_override);
}

std::string cluster_to_json(const ClusterState& cs) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["node_count"] = cs.node_count();
    j["power_budget_fraction"] = cs.power_budget_fraction();
    j["node_spec"] = {{"cpus_per_node", cs.node_spec().cpus_per_node},
                      {"cores_per_cpu", cs.node_spec().cores_per_cpu},
                      {"mem_gb", cs.node_spec().mem_gb},
                      {"tdp_per_cpu_w", cs.node_spec().tdp_per_cpu_w},
                      {"idle_power_w", cs.node_spec().idle_power_w}};
    return j.dump(2) + "\n";
}

} // namespace vdcsim
