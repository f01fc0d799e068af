// Acceptance gate: one criterion per section, one PASS/FAIL line each, exit
// code = number of failed criteria. Every oracle here is independent test
// code: own curve/cost/placement arithmetic, own greedy replay, own
// brute-force window rescan, and reservation rebuilds from event logs.
#include "vdcsim/cli.hpp"
#include "vdcsim/cluster.hpp"
#include "vdcsim/cost_models.hpp"
#include "vdcsim/csv.hpp"
#include "vdcsim/pipeline.hpp"
#include "vdcsim/rng.hpp"
#include "vdcsim/scheduler.hpp"
#include "vdcsim/sim_engine.hpp"
#include "vdcsim/tracegen.hpp"
#include "vdcsim/value_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace vdcsim;

namespace {

struct acc_error : std::runtime_error {
    explicit acc_error(const std::string& what) : std::runtime_error(what) {}
};

#define ACC(cond, msg)                                                                        \
    do {                                                                                      \
        if (!(cond)) throw acc_error(std::string(msg) + " [" #cond "]");                      \
    } while (0)

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

bool close_rel(double a, double b, double eps) {
    return std::abs(a - b) <= eps * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// ---- shared independent arithmetic ---------------------------------------

double o_curve(double vmax, double vmin, double soft, double hard, double x) {
    if (x <= soft) return vmax;
    if (x <= hard) return vmax + (x - soft) / (hard - soft) * (vmin - vmax);
    return 0.0;
}

double o_share(const JobTypeProfile& p, double size, int nodes) {
    double need = size * p.mem_per_unit_gb;
    double share = need / nodes;
    while (share * nodes < need)
        share = std::nextafter(share, std::numeric_limits<double>::infinity());
    return share;
}

double o_exec(const JobTypeProfile& p, double size, std::int64_t iter, int nodes, int cores,
              double cap) {
    double work = static_cast<double>(iter) * std::pow(size, p.size_exponent);
    double span = p.t_serial_s + p.t_parallel_s / (static_cast<double>(nodes) * cores) +
                  p.comm_coeff_s * std::log2(static_cast<double>(nodes));
    return work * span * (1.0 + p.cap_sensitivity * (1.0 - cap));
}

double o_power(const NodeSpec& s, int nodes, int cores, double cap) {
    int cpus = (cores + s.cores_per_cpu - 1) / s.cores_per_cpu;
    return nodes * (s.idle_power_w + cap * s.tdp_per_cpu_w * cpus);
}

TraceRecord rec(const std::string& name, double arr, const std::string& type, double size,
                std::int64_t iter, double gamma, double vmax, double vmf, int nmin, int nmax,
                double ps, double ph, double es, double eh) {
    TraceRecord r;
    r.arrival_s = arr;
    r.job_name = name;
    r.job_type = type;
    r.gamma = gamma;
    r.v_max = vmax;
    r.v_min_frac = vmf;
    r.problem_size = size;
    r.iterations = iter;
    r.nodes_min = nmin;
    r.nodes_max = nmax;
    r.perf_soft_s = ps;
    r.perf_hard_s = ph;
    r.energy_soft_j = es;
    r.energy_hard_j = eh;
    return r;
}

// ---- event-log replay: rebuilds the reservation timeline and every value --

struct replay_totals {
    double total = 0.0;
    std::int64_t completions = 0;
    std::int64_t dead = 0;
};

replay_totals replay_verify(const std::vector<std::string>& events, const WorkloadTrace& trace,
                            const Catalog& catalog, const NodeSpec& spec, int node_count,
                            double budget_fraction, double w_p, double w_e, double period_s) {
    std::map<std::string, const TraceRecord*> by_name;
    for (const TraceRecord& r : trace.jobs) by_name[r.job_name] = &r;

    ClusterState rebuilt(spec, node_count, budget_fraction);
    std::map<std::string, double> arrived, started, start_of, end_of;
    std::map<std::int64_t, double> periods;
    replay_totals out;

    double last_t = -std::numeric_limits<double>::infinity();
    std::int64_t expect_seq = 0;
    double horizon = 0.0;
    for (const std::string& line : events) {
        auto j = nlohmann::json::parse(line);
        ACC(j.at("seq").get<std::int64_t>() == expect_seq, "event seq must be the line index");
        ++expect_seq;
        double t = j.at("t").get<double>();
        ACC(t >= last_t, "event times must be monotone");
        last_t = t;
        horizon = t;
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "arrival") {
            std::string job = j.at("job").get<std::string>();
            ACC(by_name.count(job) == 1, "arrival for unknown job");
            arrived[job] = t;
        } else if (kind == "mapping") {
            for (const auto& m : j.at("mapped")) {
                std::string job = m.at("job").get<std::string>();
                ACC(by_name.count(job) == 1, "mapping for unknown job");
                const TraceRecord& r = *by_name[job];
                const JobTypeProfile& p = catalog.find(r.job_type);
                ResourceConfig cfg;
                cfg.nodes = m.at("nodes").get<int>();
                cfg.cores_per_node = spec.cores_per_node();
                cfg.mem_per_node_gb = o_share(p, r.problem_size, cfg.nodes);
                cfg.power_cap_fraction = m.at("cap").get<double>();
                Reservation res;
                res.job_id = job;
                res.node_ids = m.at("node_ids").get<std::vector<int>>();
                res.config = cfg;
                res.start_s = m.at("start_s").get<double>();
                res.end_s = res.start_s + m.at("exec_s").get<double>();
                rebuilt.reserve(res);
                start_of[job] = res.start_s;
                end_of[job] = res.end_s;
            }
            out.dead += static_cast<std::int64_t>(j.at("dead").size());
        } else if (kind == "start") {
            std::string job = j.at("job").get<std::string>();
            ACC(arrived.count(job) == 1, "start before arrival");
            ACC(t >= arrived[job], "start must not precede arrival");
            ACC(t == start_of[job], "start time must match the mapping record");
            started[job] = t;
        } else if (kind == "completion") {
            std::string job = j.at("job").get<std::string>();
            ACC(started.count(job) == 1, "completion before start");
            ACC(t == end_of[job], "completion time must match the mapping record");
            const TraceRecord& r = *by_name[job];
            double v_p = o_curve(r.v_max, r.v_min_frac * r.v_max, r.perf_soft_s, r.perf_hard_s,
                                 j.at("turnaround_s").get<double>());
            double v_e = o_curve(r.v_max, r.v_min_frac * r.v_max, r.energy_soft_j,
                                 r.energy_hard_j, j.at("energy_j").get<double>());
            double v = (v_p == 0.0 || v_e == 0.0) ? 0.0 : r.gamma * (w_p * v_p + w_e * v_e);
            ACC(v == j.at("value").get<double>(), "logged completion value must recompute");
            periods[static_cast<std::int64_t>(std::floor(t / period_s))] += v;
            out.completions += 1;
        } else {
            ACC(kind == "horizon", "unknown event kind");
        }
    }
    rebuilt.audit();
    if (horizon > 0.0)
        ACC(rebuilt.max_draw(0.0, horizon) <= rebuilt.power_budget_w(),
            "rebuilt timeline exceeds the power budget");
    for (const auto& [period, v] : periods) out.total += v;
    return out;
}

// ---- scheduler oracle (own cost, value, placement, and greedy loop) -------

struct OracleRes {
    std::set<int> nodes;
    double s, e;
    double inc;
};

struct OracleState {
    NodeSpec spec;
    int node_count;
    double budget_w;
    std::vector<OracleRes> rs;

    double headroom() const { return budget_w - node_count * spec.idle_power_w; }

    bool window_ok(const std::set<int>& want, double s, double e, double inc) const {
        for (const OracleRes& r : rs) {
            if (r.e <= s || r.s >= e) continue;
            for (int v : want)
                if (r.nodes.count(v)) return false;
        }
        std::vector<double> instants = {s};
        for (const OracleRes& r : rs)
            if (r.s > s && r.s < e) instants.push_back(r.s);
        for (double t : instants) {
            double used = 0.0;
            for (const OracleRes& r : rs)
                if (r.s <= t && t < r.e) used += r.inc;
            if (used + inc > headroom()) return false;
        }
        return true;
    }

    std::optional<std::pair<double, std::vector<int>>> earliest(int n, double dur, double inc,
                                                                double now) const {
        if (n > node_count || inc > headroom()) return std::nullopt;
        std::vector<double> candidates = {now};
        for (const OracleRes& r : rs)
            if (r.e > now) candidates.push_back(r.e);
        std::sort(candidates.begin(), candidates.end());
        for (double c : candidates) {
            std::vector<int> free;
            for (int v = 0; v < node_count && static_cast<int>(free.size()) < n; ++v) {
                bool ok = true;
                for (const OracleRes& r : rs)
                    if (r.nodes.count(v) && r.s < c + dur && r.e > c) ok = false;
                if (ok) free.push_back(v);
            }
            if (static_cast<int>(free.size()) < n) continue;
            std::set<int> want(free.begin(), free.end());
            if (window_ok(want, c, c + dur, inc)) return std::make_pair(c, free);
        }
        return std::nullopt;
    }
};

struct OracleBest {
    bool found = false;
    int nodes = 0;
    double cap = 0.0;
    double start = 0.0;
    double exec = 0.0;
    double power = 0.0;
    double value = 0.0;
    double score = 0.0;
    std::vector<int> node_ids;
};

OracleBest o_best_vptr(const PendingTask& t, const OracleState& st, const Catalog& cat,
                       double now) {
    const JobTypeProfile& p = cat.find(t.profile_ref);
    OracleBest best;
    for (int n = t.min_nodes; n <= t.max_nodes; ++n) {
        if (n > st.node_count) continue;
        double share = o_share(p, t.size, n);
        if (share > st.spec.mem_gb) continue;
        for (double cap : t.allowed_caps) {
            int cores = st.spec.cores_per_node();
            double exec = o_exec(p, t.size, t.iterations, n, cores, cap);
            double power = o_power(st.spec, n, cores, cap);
            double inc = power - n * st.spec.idle_power_w;
            auto placed = st.earliest(n, exec, inc, now);
            if (!placed) continue;
            double turn = placed->first - t.arrival_s + exec;
            double vp = o_curve(t.perf_curve.v_max, t.perf_curve.v_min, t.perf_curve.th_soft,
                                t.perf_curve.th_hard, turn);
            double ve = o_curve(t.energy_curve.v_max, t.energy_curve.v_min,
                                t.energy_curve.th_soft, t.energy_curve.th_hard, exec * power);
            double value = (vp == 0.0 || ve == 0.0) ? 0.0 : t.gamma * (0.5 * vp + 0.5 * ve);
            if (value <= 0.0) continue;
            double cf = (static_cast<double>(n) * cores) /
                        (static_cast<double>(st.node_count) * cores);
            double rf = (static_cast<double>(n) * share) /
                        (static_cast<double>(st.node_count) * st.spec.mem_gb);
            double score = value / (exec * (1.0 * cf + 1.0 * rf));
            bool better = !best.found || score > best.score ||
                          (score == best.score &&
                           (n < best.nodes || (n == best.nodes && cap > best.cap)));
            if (better) {
                best.found = true;
                best.nodes = n;
                best.cap = cap;
                best.start = placed->first;
                best.exec = exec;
                best.power = power;
                best.value = value;
                best.score = score;
                best.node_ids = placed->second;
            }
        }
    }
    return best;
}

// Random instance: up to 4 tasks, node ranges spanning at most 2 counts,
// at most 2 allowed caps.
std::vector<PendingTask> random_instance(std::mt19937_64& rng, const Catalog& cat,
                                         const NodeSpec& spec) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<PendingTask> tasks;
    int count = 1 + static_cast<int>(u01(rng) * 4.0);
    const char* names[] = {"CG", "EP", "FT", "IS", "MG", "LU", "BT", "SP"};
    for (int i = 0; i < count; ++i) {
        double arr = 10.0 * static_cast<int>(u01(rng) * 4.0);
        std::string type = names[static_cast<int>(u01(rng) * 8.0)];
        double size = 1.0 + u01(rng) * 19.0;
        std::int64_t iter = 1 + static_cast<std::int64_t>(u01(rng) * 5.0);
        double gamma = std::pow(2.0, static_cast<int>(u01(rng) * 4.0));
        double vmax = 5.0 + u01(rng) * 95.0;
        double vmf = u01(rng) * 0.5;
        int nmin = 1 + static_cast<int>(u01(rng) * 2.0);
        int nmax = std::min(4, nmin + static_cast<int>(u01(rng) * 2.0));
        const JobTypeProfile& p = cat.find(type);
        double exec_ref = o_exec(p, size, iter, nmin, spec.cores_per_node(), 1.0);
        double power_ref = o_power(spec, nmin, spec.cores_per_node(), 1.0);
        double ps = exec_ref * (0.8 + u01(rng) * 2.2);
        double ph = ps * (1.2 + u01(rng) * 1.8);
        double es = exec_ref * power_ref * (0.8 + u01(rng) * 2.2);
        double eh = es * (1.2 + u01(rng) * 1.8);
        PendingTask task = task_from_record(rec("t" + std::to_string(i), arr, type, size, iter,
                                                gamma, vmax, vmf, nmin, nmax, ps, ph, es, eh));
        double roll = u01(rng);
        if (roll < 0.3)
            task.allowed_caps = {1.0};
        else if (roll < 0.5)
            task.allowed_caps = {0.7};
        else
            task.allowed_caps = {0.7, 1.0};
        tasks.push_back(task);
    }
    std::sort(tasks.begin(), tasks.end(), [](const PendingTask& a, const PendingTask& b) {
        return a.arrival_s != b.arrival_s ? a.arrival_s < b.arrival_s : a.job_id < b.job_id;
    });
    return tasks;
}

// ---- pipeline brute-force oracle ------------------------------------------

std::vector<std::pair<double, double>> brute_ticks(const std::vector<StreamRecord>& recs,
                                                   const WindowSpec& w, AggregateFn fn,
                                                   double recurrence_s, double horizon_s) {
    std::vector<std::pair<double, double>> out;
    for (std::int64_t k = 1; static_cast<double>(k) * recurrence_s <= horizon_s; ++k) {
        double tick = static_cast<double>(k) * recurrence_s;
        std::vector<double> vals;
        for (const StreamRecord& r : recs) {
            bool in = w.kind == WindowKind::sliding
                          ? (r.timestamp_s > tick - w.length_s && r.timestamp_s <= tick)
                          : (r.timestamp_s >= w.landmark_start_s && r.timestamp_s <= tick);
            if (in) vals.push_back(r.value);
        }
        if (fn == AggregateFn::count) {
            out.emplace_back(tick, static_cast<double>(vals.size()));
        } else if (!vals.empty()) {
            double v = 0.0;
            if (fn == AggregateFn::min) v = *std::min_element(vals.begin(), vals.end());
            if (fn == AggregateFn::max) v = *std::max_element(vals.begin(), vals.end());
            if (fn == AggregateFn::mean)
                v = std::accumulate(vals.begin(), vals.end(), 0.0) /
                    static_cast<double>(vals.size());
            out.emplace_back(tick, v);
        }
    }
    return out;
}

// ---- shared workload set for the statistical criteria ---------------------

const std::vector<WorkloadTrace>& fleet_traces() {
    static std::vector<WorkloadTrace> traces = [] {
        Catalog cat = builtin_catalog();
        std::vector<WorkloadTrace> out;
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            GenParams p;
            p.seed = seed;
            out.push_back(generate(p, cat));
        }
        return out;
    }();
    return traces;
}

std::vector<std::string> fleet_labels() {
    std::vector<std::string> labels;
    for (int i = 1; i <= 50; ++i) labels.push_back("trace_" + std::to_string(i));
    return labels;
}

std::string fixture_path(const std::string& name) {
    return std::string(VDCSIM_FIXTURE_DIR) + "/" + name;
}

// ---- criteria --------------------------------------------------------------

std::string c1_value_model() {
    // Curve regions, frozen example: plateau 100, floor 5, knees at 10/20.
    ValueCurve c{100.0, 5.0, 10.0, 20.0};
    ACC(std::abs(eval_curve(c, 0.0) - 100.0) <= 1e-12, "plateau at x=0");
    ACC(std::abs(eval_curve(c, 10.0) - 100.0) <= 1e-12, "plateau holds at the soft knee");
    ACC(std::abs(eval_curve(c, 15.0) - 52.5) <= 1e-12, "midpoint of the decay");
    ACC(std::abs(eval_curve(c, 20.0) - 5.0) <= 1e-12, "floor value at the hard knee");
    ACC(eval_curve(c, std::nextafter(20.0, 1e9)) == 0.0, "zero strictly past the hard knee");
    ACC(eval_curve(c, 1e12) == 0.0, "zero far past the hard knee");

    std::mt19937_64 rng(20260817);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double vmax = 1.0 + u01(rng) * 99.0;
        double vmin = u01(rng) * vmax;
        double soft = 0.5 + u01(rng) * 50.0;
        double hard = soft + u01(rng) * 100.0 + 1e-6;
        ValueCurve k{vmax, vmin, soft, hard};
        for (int s = 0; s < 30; ++s) {
            double x = u01(rng) * hard * 1.5;
            ACC(std::abs(eval_curve(k, x) - o_curve(vmax, vmin, soft, hard, x)) <= 1e-12,
                "curve point disagrees with the reference arithmetic");
        }
    }

    // Zero-propagation is exact, not approximate.
    ValueWeights w{0.4, 0.6, 3.0};
    ACC(task_value_from(w, 0.0, 7.25) == 0.0, "v_p = 0 must zero the task value");
    ACC(task_value_from(w, 5.5, 0.0) == 0.0, "v_e = 0 must zero the task value");
    ACC(task_value_from(w, 0.0, 0.0) == 0.0, "both-zero must stay zero");
    ACC(task_value_from(w, 2.0, 8.0) == 3.0 * (0.4 * 2.0 + 0.6 * 8.0),
        "positive case must be the exact weighted sum");
    TaskOutcome late{1e9, 1.0};
    ACC(task_value(w, c, c, late) == 0.0, "outcome past the hard knee must zero the value");

    // Accumulation order cannot change what the ledger reports.
    std::vector<std::pair<double, double>> entries;
    for (int i = 0; i < 1000; ++i) entries.push_back({u01(rng) * 50.0, u01(rng) * 50000.0});
    auto fill = [&](const std::vector<std::size_t>& order) {
        VosLedger ledger(3600.0);
        for (std::size_t idx : order)
            accumulate_vos(ledger, "job" + std::to_string(idx), entries[idx].first,
                           entries[idx].second);
        return ledger;
    };
    std::vector<std::size_t> order(entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    VosLedger a = fill(order);
    std::shuffle(order.begin(), order.end(), rng);
    VosLedger b = fill(order);
    ACC(a.per_task == b.per_task, "per-task records must be order-independent");
    ACC(a.per_period.size() == b.per_period.size(), "period sets must match");
    for (const auto& [period, v] : a.per_period)
        ACC(close_rel(v, b.per_period.at(period), 1e-12), "period bucket off beyond 1e-12");
    ACC(close_rel(a.total(), b.total(), 1e-12), "ledger totals off beyond 1e-12");

    bool rejected = false;
    try {
        accumulate_vos(a, "job0", 1.0, 0.0);
    } catch (const validation_error&) {
        rejected = true;
    }
    ACC(rejected, "duplicate completion must be rejected");

    return "curve regions exact to 1e-12, zero-propagation exact, 1000-insertion order "
           "independence within 1e-12";
}

std::string c2_greedy_oracle() {
    Catalog cat = builtin_catalog();
    NodeSpec spec;
    SchedContext ctx;
    ctx.catalog = &cat;
    std::mt19937_64 rng(7311);
    std::int64_t steps = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<PendingTask> tasks = random_instance(rng, cat, spec);
        double now = 40.0;
        ClusterState cs(spec, 4, 1.0);
        OracleState ost{spec, 4, cs.power_budget_w(), {}};

        MappingResult res = map_batch_vptr(tasks, cs, ctx, now);

        std::vector<PendingTask> alive = tasks;
        std::vector<std::string> o_dead;
        std::size_t step = 0;
        bool first_round = true;
        for (;;) {
            OracleBest best;
            const PendingTask* who = nullptr;
            std::vector<std::string> none_now;
            for (const PendingTask& t : alive) {
                OracleBest ob = o_best_vptr(t, ost, cat, now);
                if (!ob.found) {
                    none_now.push_back(t.job_id);
                    continue;
                }
                bool better =
                    !who || ob.score > best.score ||
                    (ob.score == best.score &&
                     (t.arrival_s < who->arrival_s ||
                      (t.arrival_s == who->arrival_s && t.job_id < who->job_id)));
                if (better) {
                    best = ob;
                    who = &t;
                }
            }
            if (first_round) {
                o_dead = none_now;
                first_round = false;
            }
            if (!who) break;
            ACC(step < res.decisions.size(), "greedy stopped before the oracle did");
            const MappingDecision& d = res.decisions[step];
            ACC(d.job_id == who->job_id, "committed task differs from the exhaustive max");
            ACC(d.config.nodes == best.nodes, "node count differs from the oracle");
            ACC(d.config.power_cap_fraction == best.cap, "cap differs from the oracle");
            ACC(d.start_s == best.start, "start time differs from the oracle");
            ACC(d.predicted_value == best.value, "predicted value differs from the oracle");
            ACC(d.score == best.score, "score differs from the oracle");
            ACC(d.node_ids == best.node_ids, "node ids differ from the oracle");
            OracleRes r;
            r.nodes = std::set<int>(best.node_ids.begin(), best.node_ids.end());
            r.s = best.start;
            r.e = best.start + best.exec;
            r.inc = best.power - best.nodes * spec.idle_power_w;
            ost.rs.push_back(r);
            std::string id = who->job_id;
            alive.erase(std::remove_if(alive.begin(), alive.end(),
                                       [&](const PendingTask& t) { return t.job_id == id; }),
                        alive.end());
            ++step;
            ++steps;
        }
        ACC(step == res.decisions.size(), "greedy committed more steps than the oracle");
        std::sort(o_dead.begin(), o_dead.end());
        std::vector<std::string> lib_dead = res.dead;
        std::sort(lib_dead.begin(), lib_dead.end());
        ACC(lib_dead == o_dead, "dead sets differ");
        cs.audit();
        ACC(cs.max_draw(0.0, 1e9) <= cs.power_budget_w(), "batch exceeded the power budget");
    }
    return "200 instances, " + std::to_string(steps) +
           " committed steps, every pair equals the exhaustive max";
}

std::string c3_power_safety() {
    // Leg 1: 10 000 randomized reserve / release operations.
    std::mt19937_64 rng(4747);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    ClusterState cs(NodeSpec{}, 6, 0.8);
    std::vector<Reservation> active;
    int next_id = 0;
    std::int64_t rejected = 0;
    const double caps[] = {0.55, 0.7, 0.85, 1.0};
    for (int op = 0; op < 10000; ++op) {
        double roll = u01(rng);
        if (roll < 0.55) {
            ResourceConfig cfg;
            cfg.nodes = 1 + static_cast<int>(u01(rng) * 3);
            cfg.cores_per_node = 1 + static_cast<int>(u01(rng) * 24);
            cfg.mem_per_node_gb = u01(rng) * 120.0;
            cfg.power_cap_fraction = caps[static_cast<int>(u01(rng) * 4)];
            double power = config_power(cfg, cs.node_spec());
            double duration = 1.0 + u01(rng) * 300.0;
            auto p = cs.find_placement(cfg, power, duration, u01(rng) * 2000.0);
            ACC(p.has_value(), "search must eventually place on an unbounded timeline");
            Reservation r;
            r.job_id = "j" + std::to_string(next_id++);
            r.node_ids = p->node_ids;
            r.config = cfg;
            r.start_s = p->start_s;
            r.end_s = p->start_s + duration;
            cs.reserve(r);
            active.push_back(r);
        } else if (roll < 0.8) {
            std::size_t before = cs.reservations().size();
            Reservation r;
            r.job_id = "blind" + std::to_string(next_id++);
            int n = 1 + static_cast<int>(u01(rng) * 6);
            for (int k = 0; k < n; ++k) r.node_ids.push_back(k);
            r.config = ResourceConfig{n, 24, u01(rng) * 125.0, 1.0};
            r.start_s = u01(rng) * 1500.0;
            r.end_s = r.start_s + 1.0 + u01(rng) * 200.0;
            try {
                cs.reserve(r);
                active.push_back(r);
            } catch (const consistency_error&) {
                ++rejected;
                ACC(cs.reservations().size() == before,
                    "rejected reserve must leave the state untouched");
            }
        } else if (!active.empty()) {
            std::size_t pick = static_cast<std::size_t>(u01(rng) * active.size());
            const Reservation r = active[pick];
            double at = r.start_s + (u01(rng) * 2.0 - 0.5) * (r.end_s - r.start_s);
            if (at < r.end_s) {
                cs.release(r.job_id, at);
                active.erase(active.begin() + pick);
            }
        }
        if (op % 500 == 0) {
            cs.audit();
            ACC(cs.max_draw(0.0, 1e9) <= cs.power_budget_w(),
                "draw exceeded the budget mid-sequence");
        }
    }
    cs.audit();
    ACC(cs.max_draw(0.0, 1e9) <= cs.power_budget_w(), "draw exceeded the budget at the end");
    ACC(rejected > 0, "the blind-reserve leg never exercised a rejection");

    // Leg 2: full simulation runs at the three studied budgets, event logs
    // replayed onto a fresh cluster, zero tolerance on the rebuilt draw.
    Catalog cat = builtin_catalog();
    int cells = 0;
    for (std::uint64_t seed : {201, 202, 203}) {
        GenParams p;
        p.job_count = 150;
        p.horizon_s = 6000.0;
        p.cluster_nodes = 16;
        p.seed = seed;
        WorkloadTrace trace = generate(p, cat);
        for (Heuristic h : {Heuristic::simple, Heuristic::vptr, Heuristic::vpt,
                            Heuristic::vpt_cpc, Heuristic::vpt_jspc, Heuristic::hybrid}) {
            for (double budget : {0.55, 0.70, 0.85}) {
                SimConfig config;
                config.heuristic = h;
                config.trace_label = "safety";
                SimResult res = run(trace, ClusterState(NodeSpec{}, 16, budget), cat, config);
                replay_totals rt = replay_verify(res.events, trace, cat, NodeSpec{}, 16,
                                                 budget, 0.5, 0.5, 3600.0);
                ACC(rt.completions == res.report.jobs_completed, "completion count mismatch");
                ACC(rt.completions + res.report.jobs_zero_value + res.report.jobs_unmapped ==
                        static_cast<std::int64_t>(trace.size()),
                    "jobs must be conserved");
                ++cells;
            }
        }
    }
    return "10000 random ops (" + std::to_string(rejected) +
           " rejections, state intact) and " + std::to_string(cells) +
           " replayed runs at 55/70/85%, zero budget violations";
}

std::string c4_directional_improvement() {
    Catalog cat = builtin_catalog();
    const std::vector<WorkloadTrace>& traces = fleet_traces();
    std::vector<SimReport> rows =
        sweep(traces, fleet_labels(), NodeSpec{}, 64, {Heuristic::simple, Heuristic::vptr},
              {0.85}, cat, SimConfig{});
    ACC(rows.size() == 100, "expected 50 traces x 2 heuristics");

    std::vector<double> simple_nvos, vptr_nvos;
    for (std::size_t ti = 0; ti < traces.size(); ++ti) {
        simple_nvos.push_back(rows[ti * 2 + 0].normalized_vos);
        vptr_nvos.push_back(rows[ti * 2 + 1].normalized_vos);
    }
    auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    double ms = mean(simple_nvos);
    double mv = mean(vptr_nvos);
    ACC(mv > ms, "mean normalized value must strictly improve");
    double improvement = 100.0 * (mv - ms) / ms;

    // Paired bootstrap over traces: 95% CI of the percentage improvement.
    Rng boot(424242);
    std::vector<double> stats;
    stats.reserve(10000);
    for (int b = 0; b < 10000; ++b) {
        double ss = 0.0, sv = 0.0;
        for (std::size_t k = 0; k < traces.size(); ++k) {
            auto i = static_cast<std::size_t>(
                boot.uniform_int(0, static_cast<std::int64_t>(traces.size()) - 1));
            ss += simple_nvos[i];
            sv += vptr_nvos[i];
        }
        stats.push_back(100.0 * (sv - ss) / ss);
    }
    std::sort(stats.begin(), stats.end());
    double lo = stats[249];
    double hi = stats[9749];
    ACC(lo > 0.0, "95% bootstrap CI of the improvement must exclude 0");

    return "mean normalized value 0.85-budget: baseline " + fmt(ms, 4) + ", value-driven " +
           fmt(mv, 4) + "; improvement +" + fmt(improvement, 1) + "% (95% CI [" + fmt(lo, 1) +
           "%, " + fmt(hi, 1) + "%], excludes 0; magnitude reported, not asserted)";
}

std::string c5_budget_monotonicity() {
    Catalog cat = builtin_catalog();
    const std::vector<WorkloadTrace>& traces = fleet_traces();
    const std::vector<Heuristic> family = {Heuristic::vpt, Heuristic::vpt_cpc,
                                           Heuristic::vpt_jspc, Heuristic::hybrid};
    const std::vector<double> budgets = {0.55, 0.70, 0.85};
    std::vector<SimReport> rows =
        sweep(traces, fleet_labels(), NodeSpec{}, 64, family, budgets, cat, SimConfig{});
    ACC(rows.size() == 600, "expected 50 traces x 4 heuristics x 3 budgets");

    std::string detail;
    for (std::size_t hi = 0; hi < family.size(); ++hi) {
        double m[3] = {0.0, 0.0, 0.0};
        for (std::size_t ti = 0; ti < traces.size(); ++ti)
            for (std::size_t bi = 0; bi < 3; ++bi)
                m[bi] += rows[(ti * family.size() + hi) * 3 + bi].total_vos / 50.0;
        ACC(m[0] <= m[1] && m[1] <= m[2],
            "mean system value must be non-decreasing as the budget is relaxed");
        if (!detail.empty()) detail += "; ";
        detail += heuristic_name(family[hi]) + " " + fmt(m[0], 0) + " <= " + fmt(m[1], 0) +
                  " <= " + fmt(m[2], 0);
    }
    return "mean system value over 50 traces at 55/70/85%: " + detail;
}

std::string c6_determinism() {
    // Committed golden fixture, byte for byte, through the library.
    WorkloadTrace golden = read_trace(fixture_path("golden3_trace.csv"));
    Catalog gcat = load_catalog(fixture_path("golden3_catalog.json"));
    ClusterState gcs = load_cluster(fixture_path("golden3_cluster.json"), 0.0);
    SimConfig gcfg;
    gcfg.trace_label = "golden3";
    SimResult gres = run(golden, gcs, gcat, gcfg);
    std::string expected = read_text_file(fixture_path("golden3_report.csv"));
    ACC(report_csv_header() + "\n" + report_csv_row(gres.report) + "\n" == expected,
        "golden fixture report must match the committed bytes");

    // And through the command surface, twice.
    auto invoke = [&](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        ACC(code == 0, "cli invocation failed: " + err.str());
        return out.str();
    };
    std::vector<std::string> sim_args = {
        "simulate", "--trace",   fixture_path("golden3_trace.csv"),
        "--catalog", fixture_path("golden3_catalog.json"),
        "--cluster", fixture_path("golden3_cluster.json"),
        "--label",  "golden3"};
    std::string first = invoke(sim_args);
    ACC(first == expected, "cli simulate must reproduce the committed golden bytes");
    ACC(invoke(sim_args) == first, "repeated simulate must be byte-identical");

    std::vector<std::string> json_args = sim_args;
    json_args.insert(json_args.end(), {"--format", "json"});
    ACC(invoke(json_args) == invoke(json_args), "repeated event logs must be byte-identical");

    // Sweep reruns, including a parallel one, must not move a byte.
    Catalog cat = builtin_catalog();
    std::vector<WorkloadTrace> traces;
    std::vector<std::string> labels;
    for (std::uint64_t seed : {61, 62}) {
        GenParams p;
        p.job_count = 40;
        p.horizon_s = 3000.0;
        p.seed = seed;
        traces.push_back(generate(p, cat));
        labels.push_back("t" + std::to_string(seed));
    }
    std::vector<Heuristic> hs = {Heuristic::simple, Heuristic::vptr};
    std::string s1 = reports_to_csv(sweep(traces, labels, NodeSpec{}, 64, hs, {0.7, 1.0}, cat,
                                          SimConfig{}, 1));
    std::string s2 = reports_to_csv(sweep(traces, labels, NodeSpec{}, 64, hs, {0.7, 1.0}, cat,
                                          SimConfig{}, 1));
    std::string s3 = reports_to_csv(sweep(traces, labels, NodeSpec{}, 64, hs, {0.7, 1.0}, cat,
                                          SimConfig{}, 3));
    ACC(s1 == s2, "repeated sweep must be byte-identical");
    ACC(s1 == s3, "sweep bytes must be independent of --parallel");

    return "golden 3-job fixture byte-exact; simulate, event log, and sweep reruns "
           "byte-identical";
}

std::string c7_stream_oracle() {
    Rng rng(550);
    std::int64_t ticks_checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        StreamGenParams sp;
        sp.horizon_s = 300.0 + rng.uniform(0.0, 500.0);
        sp.keys = static_cast<int>(rng.uniform_int(1, 4));
        sp.rate_per_key_hz = rng.uniform(0.05, 0.6);
        sp.lognormal_mu = rng.uniform(1.0, 3.0);
        sp.lognormal_sigma = rng.uniform(0.1, 0.9);
        sp.seed = rng.bits();
        std::vector<StreamRecord> recs = generate_stream(sp);

        WindowSpec w;
        if (rng.uniform01() < 0.5) {
            w.kind = WindowKind::sliding;
            w.length_s = rng.uniform(10.0, 500.0);
        } else {
            w.kind = WindowKind::landmark;
            w.landmark_start_s = rng.uniform(0.0, 200.0);
        }
        auto fn = static_cast<AggregateFn>(rng.uniform_int(0, 3));
        double recurrence = rng.uniform(5.0, 120.0);

        PipelineGraph g;
        OperatorNode f;
        f.id = "f";
        f.kind = OperatorKind::fetch;
        f.source = "s";
        OperatorNode win;
        win.id = "w";
        win.kind = OperatorKind::window;
        win.window = w;
        OperatorNode agg;
        agg.id = "a";
        agg.kind = OperatorKind::aggregate;
        agg.fn = fn;
        agg.recurrence_s = recurrence;
        OperatorNode snk;
        snk.id = "out";
        snk.kind = OperatorKind::sink;
        snk.source = "out";
        g.nodes = {f, win, agg, snk};
        g.edges = {{"f", "w"}, {"w", "a"}, {"a", "out"}};

        StreamSet streams;
        streams["s"] = recs;
        ExecutionResult res = execute(g, streams, sp.horizon_s);
        auto expect = brute_ticks(recs, w, fn, recurrence, sp.horizon_s);
        ACC(res.sinks.size() == 1, "one sink expected");
        const auto& got = res.sinks[0].ticks;
        ACC(got.size() == expect.size(), "tick counts differ from brute force");
        for (std::size_t i = 0; i < got.size(); ++i) {
            ACC(got[i].first == expect[i].first, "tick timestamps differ");
            if (fn == AggregateFn::mean) {
                double denom = std::max(std::abs(expect[i].second), 1e-300);
                ACC(std::abs(got[i].second - expect[i].second) / denom <= 1e-9,
                    "mean differs beyond 1e-9 relative");
            } else {
                ACC(got[i].second == expect[i].second, "min/max/count must be exact");
            }
            ++ticks_checked;
        }
    }

    // Committed fixture queries over the committed synthetic stream.
    std::vector<StreamRecord> recs = read_stream(fixture_path("speedtest_stream.csv"));
    struct Fixture {
        const char* query;
        const char* expected_file;
        double length_s;
        AggregateFn fn;
        double recurrence_s;
    };
    const Fixture fixtures[] = {
        {"EVERY 60 seconds COMPUTE max OF download_speed OVER LAST 3 minutes FROM speedtests",
         "speedtest_q1_max.csv", 180.0, AggregateFn::max, 60.0},
        {"EVERY 5 minutes COMPUTE mean OF download_speed OVER LAST 1 days FROM speedtests",
         "speedtest_q2_mean.csv", 86400.0, AggregateFn::mean, 300.0},
    };
    for (const Fixture& fx : fixtures) {
        std::string expected = read_text_file(fixture_path(fx.expected_file));
        PipelineGraph g = parse_query(fx.query);
        StreamSet streams;
        streams["speedtests"] = recs;
        ExecutionResult res = execute(g, streams, 3600.0);
        ACC(sink_series_to_csv(res.sinks[0]) == expected,
            "engine output must match the committed fixture bytes");
        WindowSpec w;
        w.kind = WindowKind::sliding;
        w.length_s = fx.length_s;
        std::string oracle_csv = "tick_s,value\n";
        for (const auto& [tick, value] : brute_ticks(recs, w, fx.fn, fx.recurrence_s, 3600.0))
            oracle_csv += fmt_double(tick) + "," + fmt_double(value) + "\n";
        ACC(oracle_csv == expected, "brute force must match the committed fixture bytes");
    }

    return "500 randomized streams, " + std::to_string(ticks_checked) +
           " ticks equal to brute force; both fixture queries match the committed bytes";
}

std::string c8_pipeline_round_trip() {
    // Two recurring operators on one graph, both pushed off the edge.
    PipelineGraph g;
    for (int i = 0; i < 2; ++i) {
        std::string sfx = i == 0 ? "1" : "2";
        OperatorNode f;
        f.id = "f" + sfx;
        f.kind = OperatorKind::fetch;
        f.source = "s" + sfx;
        OperatorNode w;
        w.id = "w" + sfx;
        w.kind = OperatorKind::window;
        w.window.kind = WindowKind::sliding;
        w.window.length_s = 600.0;
        OperatorNode a;
        a.id = "a" + sfx;
        a.kind = OperatorKind::aggregate;
        a.fn = i == 0 ? AggregateFn::mean : AggregateFn::max;
        a.recurrence_s = i == 0 ? 300.0 : 420.0;
        OperatorNode s;
        s.id = "out" + sfx;
        s.kind = OperatorKind::sink;
        s.source = "out" + sfx;
        g.nodes.insert(g.nodes.end(), {f, w, a, s});
        g.edges.insert(g.edges.end(),
                       {{f.id, w.id}, {w.id, a.id}, {a.id, s.id}});
    }
    PipelineGraph placed = place(g, 0, 1.0);
    for (const OperatorNode& n : placed.nodes)
        if (n.kind != OperatorKind::fetch)
            ACC(n.placement == Placement::vdc, "zero edge budget must push operators off");

    Catalog cat = builtin_catalog();
    const double horizon = 42000.0;
    WorkloadTrace compiled = compile_to_jobs(placed, horizon, cat);
    validate_trace(compiled);

    // Arithmetically exact job counts: floor(42000/300) and floor(42000/420).
    std::int64_t a1 = 0, a2 = 0;
    for (const TraceRecord& r : compiled.jobs) {
        if (r.job_name.rfind("a1-", 0) == 0) ++a1;
        if (r.job_name.rfind("a2-", 0) == 0) ++a2;
    }
    ACC(a1 == 140, "first operator must compile to exactly 140 jobs");
    ACC(a2 == 100, "second operator must compile to exactly 100 jobs");
    ACC(compiled.size() == 240, "merged trace must hold exactly 240 jobs");
    for (std::size_t i = 1; i < compiled.jobs.size(); ++i)
        ACC(compiled.jobs[i - 1].arrival_s <= compiled.jobs[i].arrival_s,
            "compiled arrivals must be sorted");

    SimConfig config;
    config.trace_label = "compiled";
    SimResult res = run(compiled, ClusterState(NodeSpec{}, 64, 0.85), cat, config);
    replay_totals rt =
        replay_verify(res.events, compiled, cat, NodeSpec{}, 64, 0.85, 0.5, 0.5, 3600.0);
    ACC(rt.completions + res.report.jobs_zero_value + res.report.jobs_unmapped == 240,
        "jobs must be conserved end to end");
    ACC(res.report.jobs_completed == 240, "every recurring job must complete");
    ACC(res.report.jobs_zero_value == 0, "no compiled job should miss its window");
    ACC(res.report.jobs_unmapped == 0, "no compiled job should be left unmapped");
    ACC(rt.total == res.report.total_vos, "replayed total must equal the reported total");
    ACC(res.report.total_vos == 12000.0, "240 plateau completions at v_max 50 each");
    ACC(res.report.normalized_vos == 1.0, "plateau everywhere means a perfect score");

    SimResult again = run(compiled, ClusterState(NodeSpec{}, 64, 0.85), cat, config);
    ACC(report_csv_row(again.report) == report_csv_row(res.report),
        "round-trip rerun must be byte-identical");

    return "2-operator pipeline -> 140 + 100 jobs compiled, all 240 completed on plateau, "
           "replay and rerun clean";
}

struct Criterion {
    const char* id;
    const char* label;
    std::function<std::string()> fn;
    double time_limit_s; // 0 = no stated limit
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"C1", "value-model unit suite", c1_value_model, 1.0},
        {"C2", "greedy vs exhaustive oracle", c2_greedy_oracle, 30.0},
        {"C3", "power-budget safety", c3_power_safety, 0.0},
        {"C4", "directional improvement over the value-blind baseline",
         c4_directional_improvement, 600.0},
        {"C5", "system value monotone in the power budget", c5_budget_monotonicity, 0.0},
        {"C6", "determinism and the golden fixture", c6_determinism, 0.0},
        {"C7", "stream engine vs brute force", c7_stream_oracle, 0.0},
        {"C8", "pipeline-to-simulator round trip", c8_pipeline_round_trip, 0.0},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = c.fn();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ok && c.time_limit_s > 0.0 && dt > c.time_limit_s) {
            ok = false;
            detail = "exceeded the stated time limit of " + fmt(c.time_limit_s, 0) + " s";
        }
        std::cout << c.id << (ok ? " PASS " : " FAIL ") << c.label << " [" << fmt(dt, 2)
                  << " s] - " << detail << "\n";
        if (!ok) ++failures;
    }
    return failures;
}
