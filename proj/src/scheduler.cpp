#include "vdcsim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace vdcsim {

Heuristic heuristic_from_name(const std::string& name) {
    if (name == "simple") return Heuristic::simple;
    if (name == "vptr") return Heuristic::vptr;
    if (name == "vpt") return Heuristic::vpt;
    if (name == "vpt-cpc") return Heuristic::vpt_cpc;
    if (name == "vpt-jspc") return Heuristic::vpt_jspc;
    if (name == "hybrid") return Heuristic::hybrid;
    throw validation_error("unknown heuristic '" + name + "'");
}

std::string heuristic_name(Heuristic h) {
    switch (h) {
        case Heuristic::simple: return "simple";
        case Heuristic::vptr: return "vptr";
        case Heuristic::vpt: return "vpt";
        case Heuristic::vpt_cpc: return "vpt-cpc";
        case Heuristic::vpt_jspc: return "vpt-jspc";
        case Heuristic::hybrid: return "hybrid";
    }
    throw validation_error("unknown heuristic value");
}

const std::vector<double>& default_cap_grid() {
    static const std::vector<double> grid = {0.55, 0.70, 0.85, 1.00};
    return grid;
}

double tar(double exec_time_s, double core_fraction, double ram_fraction,
           const TarWeights& weights) {
    if (!(exec_time_s > 0.0)) throw validation_error("tar: exec time must be > 0");
    if (!(core_fraction > 0.0) || core_fraction > 1.0)
        throw validation_error("tar: core fraction must be in (0,1]");
    if (!(ram_fraction > 0.0) || ram_fraction > 1.0)
        throw validation_error("tar: ram fraction must be in (0,1]");
    return exec_time_s * (weights.w_core * core_fraction + weights.w_ram * ram_fraction);
}

double vptr_score(double predicted_value, double tar_resource_seconds) {
    if (!(tar_resource_seconds > 0.0))
        throw validation_error("vptr_score: tar must be > 0");
    return predicted_value / tar_resource_seconds;
}

void PendingTask::validate() const {
    if (job_id.empty()) throw validation_error("pending task needs a job_id");
    if (arrival_s < 0.0) throw validation_error("task " + job_id + ": arrival must be >= 0");
    if (!(size > 0.0)) throw validation_error("task " + job_id + ": size must be > 0");
    if (iterations < 1) throw validation_error("task " + job_id + ": iterations must be >= 1");
    if (!(gamma > 0.0)) throw validation_error("task " + job_id + ": gamma must be > 0");
    if (min_nodes < 1 || max_nodes < min_nodes)
        throw validation_error("task " + job_id + ": need 1 <= min_nodes <= max_nodes");
    perf_curve.validate();
    energy_curve.validate();
    if (allowed_caps.empty())
        throw validation_error("task " + job_id + ": allowed_caps must be non-empty");
    for (double c : allowed_caps)
        if (!(c > 0.0) || c > 1.0)
            throw validation_error("task " + job_id + ": caps must be in (0,1]");
}

PendingTask task_from_record(const TraceRecord& r) {
    PendingTask t;
    t.job_id = r.job_name;
    t.arrival_s = r.arrival_s;
    t.profile_ref = r.job_type;
    t.size = r.problem_size;
    t.iterations = r.iterations;
    t.gamma = r.gamma;
    t.perf_curve = make_perf_curve(r);
    t.energy_curve = make_energy_curve(r);
    t.min_nodes = r.nodes_min;
    t.max_nodes = r.nodes_max;
    t.allowed_caps = default_cap_grid();
    t.validate();
    return t;
}

namespace {

// One (node count, cap) candidate at its earliest feasible start. Present
// even when the predicted value is zero; absent only when the config is
// inadmissible or can never fit.
struct config_eval {
    ResourceConfig cfg;
    CostEstimate est;
    double start_s = 0.0;
    std::vector<int> node_ids;
    double value = 0.0;
};

std::optional<config_eval> eval_config(const PendingTask& task, const JobTypeProfile& profile,
                                       const ClusterState& state, const SchedContext& ctx,
                                       double now_s, int nodes, double cap, bool bounded_scan) {
    const NodeSpec& spec = state.node_spec();
    if (nodes > state.node_count()) return std::nullopt;
    double share = mem_share_per_node(profile, task.size, nodes);
    if (share > spec.mem_gb) return std::nullopt;
    ResourceConfig cfg;
    cfg.nodes = nodes;
    cfg.cores_per_node = spec.cores_per_node();
    cfg.mem_per_node_gb = share;
    cfg.power_cap_fraction = cap;
    CostEstimate est = estimate(profile, task.size, task.iterations, cfg, spec);
    // Value-aware callers never want a start so late that the performance
    // value is certainly zero; the generous slack keeps the cutoff sound
    // against rounding while sparing a walk over the whole backlog.
    double give_up = bounded_scan ? task.arrival_s + 2.0 * task.perf_curve.th_hard + 1.0
                                  : std::numeric_limits<double>::infinity();
    auto placed = state.find_placement(cfg, est.avg_power_w, est.exec_time_s, now_s, give_up);
    if (!placed) return std::nullopt;
    ValueWeights w{ctx.w_perf, ctx.w_energy, task.gamma};
    TaskOutcome outcome{(placed->start_s - task.arrival_s) + est.exec_time_s, est.energy_j};
    config_eval ev;
    ev.cfg = cfg;
    ev.est = est;
    ev.start_s = placed->start_s;
    ev.node_ids = placed->node_ids;
    ev.value = task_value(w, task.perf_curve, task.energy_curve, outcome);
    return ev;
}

double tar_of(const ClusterState& state, const ResourceConfig& cfg, double exec_time_s,
              const TarWeights& w) {
    const NodeSpec& spec = state.node_spec();
    double core_fraction = (static_cast<double>(cfg.nodes) * cfg.cores_per_node) /
                           (static_cast<double>(state.node_count()) * spec.cores_per_node());
    double ram_fraction = (static_cast<double>(cfg.nodes) * cfg.mem_per_node_gb) /
                          (static_cast<double>(state.node_count()) * spec.mem_gb);
    return tar(exec_time_s, core_fraction, ram_fraction, w);
}

MappingDecision decision_from(const PendingTask& task, const config_eval& ev, double score) {
    MappingDecision d;
    d.job_id = task.job_id;
    d.config = ev.cfg;
    d.node_ids = ev.node_ids;
    d.start_s = ev.start_s;
    d.predicted = ev.est;
    d.predicted_value = ev.value;
    d.score = score;
    return d;
}

// Within one task, ties prefer fewer nodes, then the higher cap.
bool config_beats(double score, int nodes, double cap, const MappingDecision& best) {
    if (score != best.score) return score > best.score;
    if (nodes != best.config.nodes) return nodes < best.config.nodes;
    return cap > best.config.power_cap_fraction;
}

void commit(ClusterState& state, const MappingDecision& d, double now_s) {
    Reservation r;
    r.job_id = d.job_id;
    r.node_ids = d.node_ids;
    r.config = d.config;
    r.start_s = d.start_s;
    r.end_s = d.start_s + d.predicted.exec_time_s;
    r.is_placeholder = d.start_s > now_s;
    state.reserve(r);
}

// Greedy batch loop: repeatedly commit the global best decision. best_fn
// returns a task's best positive-value decision against the current state, or
// none. Tasks with no decision in the first round are dead: the timeline
// only gains reservations, so their value can never come back.
template <typename BestFn>
MappingResult greedy_map(const std::vector<PendingTask>& queue, ClusterState& state,
                         double now_s, BestFn&& best_fn) {
    MappingResult out;
    std::vector<const PendingTask*> alive;
    alive.reserve(queue.size());
    for (const PendingTask& t : queue) alive.push_back(&t);
    bool first_round = true;
    while (!alive.empty()) {
        std::size_t pick = alive.size();
        std::optional<MappingDecision> pick_d;
        for (std::size_t i = 0; i < alive.size(); ++i) {
            std::optional<MappingDecision> d = best_fn(*alive[i], state);
            if (!d) {
                if (first_round) out.dead.push_back(alive[i]->job_id);
                continue;
            }
            bool better = !pick_d || d->score > pick_d->score ||
                          (d->score == pick_d->score &&
                           (alive[i]->arrival_s < alive[pick]->arrival_s ||
                            (alive[i]->arrival_s == alive[pick]->arrival_s &&
                             alive[i]->job_id < alive[pick]->job_id)));
            if (better) {
                pick = i;
                pick_d = std::move(d);
            }
        }
        first_round = false;
        if (!pick_d) break;
        commit(state, *pick_d, now_s);
        out.decisions.push_back(std::move(*pick_d));
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return out;
}

void check_context(const SchedContext& ctx) {
    if (!ctx.catalog) throw validation_error("scheduler context needs a catalog");
}

double max_cap(const PendingTask& t) {
    return *std::max_element(t.allowed_caps.begin(), t.allowed_caps.end());
}

// Best single-task decision by value / exec time at one pinned cap.
std::optional<MappingDecision> best_config_vpt_at(const PendingTask& task,
                                                  const ClusterState& state,
                                                  const SchedContext& ctx, double now_s,
                                                  double cap) {
    const JobTypeProfile& profile = ctx.catalog->find(task.profile_ref);
    std::optional<MappingDecision> best;
    for (int n = task.min_nodes; n <= task.max_nodes; ++n) {
        auto ev = eval_config(task, profile, state, ctx, now_s, n, cap, true);
        if (!ev || !(ev->value > 0.0)) continue;
        double score = ev->value / ev->est.exec_time_s;
        if (!best || config_beats(score, n, cap, *best)) best = decision_from(task, *ev, score);
    }
    return best;
}

// Per-job capping: start from the task's highest cap; when slowing down
// raises predicted value (it frees budget for an earlier start), take the cap
// with the best value gained per watt saved.
std::optional<MappingDecision> best_config_jspc(const PendingTask& task,
                                                const ClusterState& state,
                                                const SchedContext& ctx, double now_s) {
    const JobTypeProfile& profile = ctx.catalog->find(task.profile_ref);
    const NodeSpec& spec = state.node_spec();
    double cap_top = max_cap(task);
    std::vector<double> caps_desc = task.allowed_caps;
    std::sort(caps_desc.begin(), caps_desc.end(), std::greater<double>());
    std::optional<MappingDecision> best;
    for (int n = task.min_nodes; n <= task.max_nodes; ++n) {
        auto base = eval_config(task, profile, state, ctx, now_s, n, cap_top, true);
        double base_value = (base && base->value > 0.0) ? base->value : 0.0;
        ResourceConfig top_cfg;
        top_cfg.nodes = n;
        top_cfg.cores_per_node = spec.cores_per_node();
        top_cfg.mem_per_node_gb = 1.0; // power does not depend on the memory share
        top_cfg.power_cap_fraction = cap_top;
        double top_power = config_power(top_cfg, spec);

        std::optional<config_eval> chosen;
        if (base && base->value > 0.0) chosen = base;
        double best_ratio = 0.0;
        bool improved = false;
        for (double cap : caps_desc) {
            if (cap >= cap_top) continue;
            auto ev = eval_config(task, profile, state, ctx, now_s, n, cap, true);
            if (!ev || !(ev->value > 0.0)) continue;
            double gain = ev->value - base_value;
            if (!(gain > 0.0)) continue;
            double watts_saved = top_power - ev->est.avg_power_w;
            double ratio = gain / watts_saved;
            if (!improved || ratio > best_ratio) {
                improved = true;
                best_ratio = ratio;
                chosen = ev;
            }
        }
        if (!chosen) continue;
        double score = chosen->value / chosen->est.exec_time_s;
        if (!best || config_beats(score, n, chosen->cfg.power_cap_fraction, *best))
            best = decision_from(task, *chosen, score);
    }
    return best;
}

// Common-cap scan: plan the whole batch at each cap on a scratch copy, keep
// the plan earning the most; ties go to the higher (less throttled) cap.
MappingResult map_batch_cpc(const std::vector<PendingTask>& queue, ClusterState& state,
                            const SchedContext& ctx, double now_s) {
    std::vector<double> grid;
    for (const PendingTask& t : queue)
        grid.insert(grid.end(), t.allowed_caps.begin(), t.allowed_caps.end());
    std::sort(grid.begin(), grid.end(), std::greater<double>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    MappingResult best_plan;
    double best_total = 0.0;
    bool have_plan = false;
    std::map<std::string, int> dead_count;
    for (double kappa : grid) {
        ClusterState scratch = state.planning_copy();
        MappingResult plan =
            greedy_map(queue, scratch, now_s,
                       [&](const PendingTask& t, const ClusterState& st) {
                           if (std::find(t.allowed_caps.begin(), t.allowed_caps.end(), kappa) ==
                               t.allowed_caps.end())
                               return std::optional<MappingDecision>{};
                           return best_config_vpt_at(t, st, ctx, now_s, kappa);
                       });
        double total = 0.0;
        for (const MappingDecision& d : plan.decisions) total += d.predicted_value;
        for (const std::string& id : plan.dead) dead_count[id] += 1;
        if (!have_plan || total > best_total) {
            have_plan = true;
            best_total = total;
            best_plan = std::move(plan);
        }
    }
    if (!have_plan) return MappingResult{};
    // Dead only when no cap in the scan could earn anything for the task.
    best_plan.dead.clear();
    for (const auto& [id, count] : dead_count)
        if (count == static_cast<int>(grid.size())) best_plan.dead.push_back(id);
    for (const MappingDecision& d : best_plan.decisions) commit(state, d, now_s);
    return best_plan;
}

double plan_total(const MappingResult& r) {
    double total = 0.0;
    for (const MappingDecision& d : r.decisions) total += d.predicted_value;
    return total;
}

} // namespace

std::optional<MappingDecision> best_config_vptr(const PendingTask& task,
                                                const ClusterState& state,
                                                const SchedContext& ctx, double now_s) {
    check_context(ctx);
    const JobTypeProfile& profile = ctx.catalog->find(task.profile_ref);
    std::optional<MappingDecision> best;
    for (int n = task.min_nodes; n <= task.max_nodes; ++n) {
        for (double cap : task.allowed_caps) {
            auto ev = eval_config(task, profile, state, ctx, now_s, n, cap, true);
            if (!ev || !(ev->value > 0.0)) continue;
            double score =
                vptr_score(ev->value, tar_of(state, ev->cfg, ev->est.exec_time_s, ctx.tar_weights));
            if (!best || config_beats(score, n, cap, *best))
                best = decision_from(task, *ev, score);
        }
    }
    return best;
}

MappingResult map_batch_vptr(const std::vector<PendingTask>& queue, ClusterState& state,
                             const SchedContext& ctx, double now_s) {
    check_context(ctx);
    for (const PendingTask& t : queue) t.validate();
    return greedy_map(queue, state, now_s, [&](const PendingTask& t, const ClusterState& st) {
        return best_config_vptr(t, st, ctx, now_s);
    });
}

MappingResult map_batch_simple(const std::vector<PendingTask>& queue, ClusterState& state,
                               const SchedContext& ctx, double now_s) {
    check_context(ctx);
    for (const PendingTask& t : queue) t.validate();
    std::vector<const PendingTask*> order;
    order.reserve(queue.size());
    for (const PendingTask& t : queue) order.push_back(&t);
    std::sort(order.begin(), order.end(), [](const PendingTask* a, const PendingTask* b) {
        return a->arrival_s != b->arrival_s ? a->arrival_s < b->arrival_s
                                            : a->job_id < b->job_id;
    });
    MappingResult out;
    for (const PendingTask* t : order) {
        const JobTypeProfile& profile = ctx.catalog->find(t->profile_ref);
        auto ev = eval_config(*t, profile, state, ctx, now_s, t->min_nodes, max_cap(*t), false);
        if (!ev) {
            out.dead.push_back(t->job_id);
            continue;
        }
        double score =
            vptr_score(ev->value, tar_of(state, ev->cfg, ev->est.exec_time_s, ctx.tar_weights));
        MappingDecision d = decision_from(*t, *ev, score);
        commit(state, d, now_s);
        out.decisions.push_back(std::move(d));
    }
    return out;
}

MappingResult map_batch_vpt_family(Heuristic variant, const std::vector<PendingTask>& queue,
                                   ClusterState& state, const SchedContext& ctx, double now_s) {
    check_context(ctx);
    if (variant != Heuristic::vpt && variant != Heuristic::vpt_cpc &&
        variant != Heuristic::vpt_jspc && variant != Heuristic::hybrid)
        throw validation_error("map_batch_vpt_family: variant " + heuristic_name(variant) +
                               " is not part of the family");
    for (const PendingTask& t : queue) t.validate();
    switch (variant) {
        case Heuristic::vpt:
            return greedy_map(queue, state, now_s,
                              [&](const PendingTask& t, const ClusterState& st) {
                                  return best_config_vpt_at(t, st, ctx, now_s, max_cap(t));
                              });
        case Heuristic::vpt_cpc:
            return map_batch_cpc(queue, state, ctx, now_s);
        case Heuristic::vpt_jspc:
            return greedy_map(queue, state, now_s,
                              [&](const PendingTask& t, const ClusterState& st) {
                                  return best_config_jspc(t, st, ctx, now_s);
                              });
        default: {
            // hybrid: plan both ways on scratch copies, commit the richer plan
            ClusterState cpc_scratch = state.planning_copy();
            MappingResult cpc = map_batch_cpc(queue, cpc_scratch, ctx, now_s);
            ClusterState jspc_scratch = state.planning_copy();
            MappingResult jspc =
                greedy_map(queue, jspc_scratch, now_s,
                           [&](const PendingTask& t, const ClusterState& st) {
                               return best_config_jspc(t, st, ctx, now_s);
                           });
            MappingResult& winner = plan_total(jspc) > plan_total(cpc) ? jspc : cpc;
            // a task is dead only if neither planning mode can ever serve it
            std::vector<std::string> both;
            std::vector<std::string> cd = cpc.dead, jd = jspc.dead;
            std::sort(cd.begin(), cd.end());
            std::sort(jd.begin(), jd.end());
            std::set_intersection(cd.begin(), cd.end(), jd.begin(), jd.end(),
                                  std::back_inserter(both));
            winner.dead = std::move(both);
            for (const MappingDecision& d : winner.decisions) commit(state, d, now_s);
            return std::move(winner);
        }
    }
}

MappingResult map_batch(Heuristic h, const std::vector<PendingTask>& queue, ClusterState& state,
                        const SchedContext& ctx, double now_s) {
    switch (h) {
        case Heuristic::simple: return map_batch_simple(queue, state, ctx, now_s);
        case Heuristic::vptr: return map_batch_vptr(queue, state, ctx, now_s);
        default: return map_batch_vpt_family(h, queue, state, ctx, now_s);
    }
}

} // namespace vdcsim
