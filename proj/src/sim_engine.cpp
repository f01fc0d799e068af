#include "vdcsim/sim_engine.hpp"

#include "vdcsim/csv.hpp"
#include "vdcsim/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <queue>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace vdcsim {
namespace {

enum class event_kind { arrival, start, completion };

// payload indexes trace.jobs for arrivals and the in-flight table for
// starts and completions.
struct sim_event {
    double t = 0.0;
    std::int64_t seq = 0;
    event_kind kind = event_kind::arrival;
    std::size_t payload = 0;
};

struct event_after {
    bool operator()(const sim_event& a, const sim_event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

struct in_flight {
    std::string job_id;
    std::size_t trace_index = 0;
    double arrival_s = 0.0;
    double start_s = 0.0;
    CostEstimate predicted;
};

nlohmann::ordered_json decision_json(const MappingDecision& d) {
    nlohmann::ordered_json j;
    j["job"] = d.job_id;
    j["nodes"] = d.config.nodes;
    j["cap"] = d.config.power_cap_fraction;
    j["node_ids"] = d.node_ids;
    j["start_s"] = d.start_s;
    j["exec_s"] = d.predicted.exec_time_s;
    j["avg_power_w"] = d.predicted.avg_power_w;
    j["energy_j"] = d.predicted.energy_j;
    j["value"] = d.predicted_value;
    j["score"] = d.score;
    return j;
}

} // namespace

SimResult run(const WorkloadTrace& trace, const ClusterState& cluster, const Catalog& catalog,
              const SimConfig& config) {
    ValueWeights weights{config.w_perf, config.w_energy, 1.0};
    weights.validate();
    if (!(config.vos_period_s > 0.0))
        throw validation_error("sim: vos_period_s must be > 0");

    // Whole-trace validation before any event runs: structure, catalog
    // membership, and per-task invariants.
    validate_trace(trace);
    for (const TraceRecord& r : trace.jobs) {
        catalog.find(r.job_type);
        task_from_record(r).validate();
    }

    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < trace.jobs.size(); ++i) index_of.emplace(trace.jobs[i].job_name, i);

    ClusterState state = cluster;
    SchedContext ctx;
    ctx.catalog = &catalog;
    ctx.w_perf = config.w_perf;
    ctx.w_energy = config.w_energy;
    ctx.tar_weights = config.tar_weights;

    std::priority_queue<sim_event, std::vector<sim_event>, event_after> heap;
    std::int64_t next_seq = 0;
    for (std::size_t i = 0; i < trace.jobs.size(); ++i)
        heap.push(sim_event{trace.jobs[i].arrival_s, next_seq++, event_kind::arrival, i});

    std::vector<PendingTask> pending;
    std::vector<in_flight> flights;
    VosLedger ledger(config.vos_period_s);

    SimResult out;
    out.report.trace_label = config.trace_label;
    out.report.heuristic = heuristic_name(config.heuristic);
    out.report.power_budget_fraction = state.power_budget_fraction();

    std::int64_t log_seq = 0;
    auto emit = [&](nlohmann::ordered_json& j) { out.events.push_back(j.dump()); };
    auto event_header = [&](double t, const char* kind) {
        nlohmann::ordered_json j;
        j["seq"] = log_seq++;
        j["t"] = t;
        j["kind"] = kind;
        return j;
    };

    double turnaround_sum = 0.0;
    double horizon = 0.0;

    while (!heap.empty()) {
        const double t = heap.top().t;
        horizon = t;
        bool mapping_due = false;

        while (!heap.empty() && heap.top().t == t) {
            sim_event e = heap.top();
            heap.pop();
            switch (e.kind) {
            case event_kind::arrival: {
                const TraceRecord& r = trace.jobs[e.payload];
                pending.push_back(task_from_record(r));
                auto j = event_header(t, "arrival");
                j["job"] = r.job_name;
                emit(j);
                mapping_due = true;
                break;
            }
            case event_kind::start: {
                auto j = event_header(t, "start");
                j["job"] = flights[e.payload].job_id;
                emit(j);
                break;
            }
            case event_kind::completion: {
                const in_flight& f = flights[e.payload];
                const TraceRecord& r = trace.jobs[f.trace_index];
                TaskOutcome outcome{(f.start_s - f.arrival_s) + f.predicted.exec_time_s,
                                    f.predicted.energy_j};
                double v_p = eval_curve(make_perf_curve(r), outcome.completion_objective_s);
                double v_e = eval_curve(make_energy_curve(r), outcome.energy_objective_j);
                ValueWeights w{config.w_perf, config.w_energy, r.gamma};
                double value = task_value_from(w, v_p, v_e);
                accumulate_vos(ledger, f.job_id, value, t);
                out.report.jobs_completed += 1;
                turnaround_sum += outcome.completion_objective_s;
                if (value > 0.0) {
                    out.report.perf_value_total += r.gamma * config.w_perf * v_p;
                    out.report.energy_value_total += r.gamma * config.w_energy * v_e;
                }
                auto j = event_header(t, "completion");
                j["job"] = f.job_id;
                j["turnaround_s"] = outcome.completion_objective_s;
                j["energy_j"] = outcome.energy_objective_j;
                j["value"] = value;
                j["v_perf"] = v_p;
                j["v_energy"] = v_e;
                emit(j);
                mapping_due = true;
                break;
            }
            }
        }

        if (!mapping_due) continue;

        state.prune(t);
        if (config.paranoid_audit) state.audit();

        MappingResult mapped = map_batch(config.heuristic, pending, state, ctx, t);

        std::unordered_set<std::string> gone;
        for (const MappingDecision& d : mapped.decisions) {
            gone.insert(d.job_id);
            std::size_t flight_index = flights.size();
            auto it = index_of.find(d.job_id);
            if (it == index_of.end())
                throw consistency_error("sim: decision for unknown job '" + d.job_id + "'");
            flights.push_back(in_flight{d.job_id, it->second, trace.jobs[it->second].arrival_s,
                                        d.start_s, d.predicted});
            heap.push(sim_event{d.start_s, next_seq++, event_kind::start, flight_index});
            heap.push(sim_event{d.start_s + d.predicted.exec_time_s, next_seq++,
                                event_kind::completion, flight_index});
        }
        for (const std::string& id : mapped.dead) gone.insert(id);
        out.report.jobs_zero_value += static_cast<std::int64_t>(mapped.dead.size());
        pending.erase(std::remove_if(pending.begin(), pending.end(),
                                     [&](const PendingTask& p) { return gone.count(p.job_id); }),
                      pending.end());

        auto j = event_header(t, "mapping");
        j["heuristic"] = out.report.heuristic;
        auto arr = nlohmann::ordered_json::array();
        for (const MappingDecision& d : mapped.decisions) arr.push_back(decision_json(d));
        j["mapped"] = std::move(arr);
        j["dead"] = mapped.dead;
        emit(j);
    }

    state.audit();

    out.report.jobs_unmapped = static_cast<std::int64_t>(pending.size());
    std::int64_t classed =
        out.report.jobs_completed + out.report.jobs_zero_value + out.report.jobs_unmapped;
    if (classed != static_cast<std::int64_t>(trace.size()))
        throw consistency_error("sim: terminal classes do not cover the trace");

    out.report.total_vos = ledger.total();
    if (!trace.empty())
        out.report.normalized_vos = normalized_vos(ledger, trace, config.w_perf, config.w_energy);
    if (out.report.jobs_completed > 0)
        out.report.mean_turnaround_s = turnaround_sum / static_cast<double>(out.report.jobs_completed);
    out.report.horizon_s = horizon;
    if (horizon > 0.0) {
        Utilization u = state.utilization(0.0, horizon);
        out.report.mean_util_core = u.core_fraction;
        out.report.mean_util_mem = u.mem_fraction;
        out.report.mean_util_power = u.power_fraction;
    }
    for (const auto& [period, value] : ledger.per_period)
        out.report.vos_series.emplace_back(period, value);

    auto j = event_header(horizon, "horizon");
    emit(j);
    return out;
}

std::vector<SimReport> sweep(const std::vector<WorkloadTrace>& traces,
                             const std::vector<std::string>& labels, const NodeSpec& node_spec,
                             int node_count, const std::vector<Heuristic>& heuristics,
                             const std::vector<double>& budget_fractions, const Catalog& catalog,
                             const SimConfig& base_config, int parallel) {
    if (traces.size() != labels.size())
        throw validation_error("sweep: need one label per trace");
    if (heuristics.empty() || budget_fractions.empty())
        throw validation_error("sweep: need at least one heuristic and one budget");

    struct cell {
        std::size_t trace_index;
        Heuristic heuristic;
        double budget;
    };
    std::vector<cell> cells;
    for (std::size_t ti = 0; ti < traces.size(); ++ti)
        for (Heuristic h : heuristics)
            for (double b : budget_fractions) cells.push_back(cell{ti, h, b});

    std::vector<SimReport> reports(cells.size());
    auto run_cell = [&](std::size_t i) {
        const cell& c = cells[i];
        ClusterState cs(node_spec, node_count, c.budget);
        SimConfig cfg = base_config;
        cfg.heuristic = c.heuristic;
        cfg.trace_label = labels[c.trace_index];
        reports[i] = run(traces[c.trace_index], cs, catalog, cfg).report;
    };

    int workers = std::min<int>(parallel, static_cast<int>(cells.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
        return reports;
    }
    // Cells share nothing and land in preassigned slots, so the report list
    // is independent of scheduling order.
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = cursor.fetch_add(1);
                if (i >= cells.size()) return;
                run_cell(i);
            }
        });
    for (std::thread& th : pool) th.join();
    return reports;
}

std::vector<MetricDelta> compare(const SimReport& baseline, const SimReport& candidate) {
    if (baseline.trace_label != candidate.trace_label)
        throw validation_error("compare: reports describe different traces");
    if (baseline.power_budget_fraction != candidate.power_budget_fraction)
        throw validation_error("compare: reports describe different power budgets");

    auto delta = [](double base, double cand) {
        if (base == 0.0) {
            if (cand == 0.0) return 0.0;
            return cand > 0.0 ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
        }
        return 100.0 * (cand - base) / base;
    };

    std::vector<std::pair<const char*, std::pair<double, double>>> metrics = {
        {"total_vos", {baseline.total_vos, candidate.total_vos}},
        {"normalized_vos", {baseline.normalized_vos, candidate.normalized_vos}},
        {"perf_value_total", {baseline.perf_value_total, candidate.perf_value_total}},
        {"energy_value_total", {baseline.energy_value_total, candidate.energy_value_total}},
        {"jobs_completed",
         {static_cast<double>(baseline.jobs_completed), static_cast<double>(candidate.jobs_completed)}},
        {"jobs_zero_value",
         {static_cast<double>(baseline.jobs_zero_value), static_cast<double>(candidate.jobs_zero_value)}},
        {"jobs_unmapped",
         {static_cast<double>(baseline.jobs_unmapped), static_cast<double>(candidate.jobs_unmapped)}},
        {"mean_turnaround_s", {baseline.mean_turnaround_s, candidate.mean_turnaround_s}},
        {"mean_util_core", {baseline.mean_util_core, candidate.mean_util_core}},
        {"mean_util_mem", {baseline.mean_util_mem, candidate.mean_util_mem}},
        {"mean_util_power", {baseline.mean_util_power, candidate.mean_util_power}},
    };

    std::vector<MetricDelta> out;
    out.reserve(metrics.size());
    for (const auto& [name, pair] : metrics)
        out.push_back(MetricDelta{name, pair.first, pair.second, delta(pair.first, pair.second)});
    return out;
}

std::string report_csv_header() {
    return "trace,heuristic,power_budget_fraction,total_vos,normalized_vos,perf_value_total,"
           "energy_value_total,jobs_completed,jobs_zero_value,jobs_unmapped,mean_turnaround_s,"
           "mean_util_core,mean_util_mem,mean_util_power,vos_series";
}

std::string report_csv_row(const SimReport& r) {
    std::string series;
    for (std::size_t i = 0; i < r.vos_series.size(); ++i) {
        if (i > 0) series += '|';
        series += fmt_int(r.vos_series[i].first);
        series += ':';
        series += fmt_double(r.vos_series[i].second);
    }
    return join_csv({r.trace_label, r.heuristic, fmt_double(r.power_budget_fraction),
                     fmt_double(r.total_vos), fmt_double(r.normalized_vos),
                     fmt_double(r.perf_value_total), fmt_double(r.energy_value_total),
                     fmt_int(r.jobs_completed), fmt_int(r.jobs_zero_value),
                     fmt_int(r.jobs_unmapped), fmt_double(r.mean_turnaround_s),
                     fmt_double(r.mean_util_core), fmt_double(r.mean_util_mem),
                     fmt_double(r.mean_util_power), series});
}

std::string reports_to_csv(const std::vector<SimReport>& reports) {
    std::string out = report_csv_header();
    out += '\n';
    for (const SimReport& r : reports) {
        out += report_csv_row(r);
        out += '\n';
    }
    return out;
}

} // namespace vdcsim
