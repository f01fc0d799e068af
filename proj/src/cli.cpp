#include "vdcsim/cli.hpp"

#include "vdcsim/cluster.hpp"
#include "vdcsim/cost_models.hpp"
#include "vdcsim/csv.hpp"
#include "vdcsim/errors.hpp"
#include "vdcsim/pipeline.hpp"
#include "vdcsim/scheduler.hpp"
#include "vdcsim/sim_engine.hpp"
#include "vdcsim/tracegen.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace vdcsim {

namespace {

namespace fs = std::filesystem;

std::string stem_of(const std::string& path) {
    std::string s = fs::path(path).stem().string();
    return s.empty() ? path : s;
}

Catalog catalog_from(const std::string& path) {
    return path.empty() ? builtin_catalog() : load_catalog(path);
}

// budget 0 keeps the file's fraction; without a file it means full budget.
ClusterState cluster_from(const std::string& path, double budget) {
    if (!path.empty()) return load_cluster(path, budget);
    return ClusterState(NodeSpec{}, 64, budget > 0.0 ? budget : 1.0);
}

std::vector<Heuristic> heuristics_from(const std::vector<std::string>& names) {
    std::vector<Heuristic> hs;
    hs.reserve(names.size());
    for (const std::string& n : names) hs.push_back(heuristic_from_name(n));
    return hs;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out,
          const std::string& what) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    fs::path p(out_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text_file(out_path, text);
    out << "wrote " << out_path << " (" << what << ")\n";
}

struct GenTraceArgs {
    std::string out;
    std::string catalog;
    int jobs = 1000;
    int count = 1;
    std::uint64_t seed = 1;
    double horizon_s = 180000.0;
    double oversubscription = 2.0;
    int nodes = 64;
};

int cmd_gen_trace(const GenTraceArgs& a, std::ostream& out) {
    Catalog cat = catalog_from(a.catalog);
    GenParams p;
    p.job_count = a.jobs;
    p.horizon_s = a.horizon_s;
    p.oversubscription = a.oversubscription;
    p.cluster_nodes = a.nodes;

    bool single_file = a.count == 1 && a.out.size() > 4 &&
                       a.out.compare(a.out.size() - 4, 4, ".csv") == 0;
    if (!single_file) fs::create_directories(a.out);
    for (int i = 0; i < a.count; ++i) {
        p.seed = a.seed + static_cast<std::uint64_t>(i);
        WorkloadTrace trace = generate(p, cat);
        std::string path =
            single_file ? a.out : a.out + "/trace_" + fmt_int(static_cast<std::int64_t>(p.seed)) +
                                      ".csv";
        write_trace(path, trace);
        out << path << ": jobs=" << trace.size() << " horizon_s=" << fmt_double(p.horizon_s)
            << " oversubscription=" << fmt_double(p.oversubscription) << "\n";
    }
    return 0;
}

struct SimulateArgs {
    std::string trace;
    std::string catalog;
    std::string cluster;
    std::string heuristic = "vptr";
    std::string label;
    std::string format = "csv";
    std::string out;
    double budget = 0.0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    WorkloadTrace trace = read_trace(a.trace);
    Catalog cat = catalog_from(a.catalog);
    ClusterState cluster = cluster_from(a.cluster, a.budget);
    SimConfig config;
    config.heuristic = heuristic_from_name(a.heuristic);
    config.trace_label = a.label.empty() ? stem_of(a.trace) : a.label;
    SimResult result = run(trace, cluster, cat, config);

    if (a.format == "json") {
        std::string text;
        for (const std::string& line : result.events) {
            text += line;
            text += '\n';
        }
        emit(text, a.out, out, fmt_int(static_cast<std::int64_t>(result.events.size())) +
                                   " events");
    } else {
        emit(report_csv_header() + "\n" + report_csv_row(result.report) + "\n", a.out, out,
             "1 report row");
    }
    return 0;
}

struct SweepArgs {
    std::vector<std::string> traces;
    std::vector<std::string> heuristics;
    std::vector<double> budgets;
    std::string catalog;
    std::string cluster;
    std::string out;
    int parallel = 1;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    Catalog cat = catalog_from(a.catalog);
    NodeSpec spec;
    int node_count = 64;
    if (!a.cluster.empty()) {
        ClusterState cs = load_cluster(a.cluster, 0.0);
        spec = cs.node_spec();
        node_count = cs.node_count();
    }
    std::vector<WorkloadTrace> traces;
    std::vector<std::string> labels;
    for (const std::string& path : a.traces) {
        traces.push_back(read_trace(path));
        labels.push_back(stem_of(path));
    }
    std::vector<SimReport> reports = sweep(traces, labels, spec, node_count,
                                           heuristics_from(a.heuristics), a.budgets, cat,
                                           SimConfig{}, a.parallel);
    emit(reports_to_csv(reports), a.out, out,
         fmt_int(static_cast<std::int64_t>(reports.size())) + " report rows");
    return 0;
}

struct CompareArgs {
    std::vector<std::string> traces;
    std::vector<double> budgets = {1.0};
    std::string baseline = "simple";
    std::string candidate = "vptr";
    std::string catalog;
    std::string cluster;
    std::string out;
    int parallel = 1;
};

SimReport mean_report(const std::vector<const SimReport*>& rows, const std::string& heuristic,
                      double budget) {
    SimReport m;
    m.trace_label = "mean";
    m.heuristic = heuristic;
    m.power_budget_fraction = budget;
    double n = static_cast<double>(rows.size());
    for (const SimReport* r : rows) {
        m.total_vos += r->total_vos;
        m.normalized_vos += r->normalized_vos;
        m.perf_value_total += r->perf_value_total;
        m.energy_value_total += r->energy_value_total;
        m.jobs_completed += r->jobs_completed;
        m.jobs_zero_value += r->jobs_zero_value;
        m.jobs_unmapped += r->jobs_unmapped;
        m.mean_turnaround_s += r->mean_turnaround_s;
        m.mean_util_core += r->mean_util_core;
        m.mean_util_mem += r->mean_util_mem;
        m.mean_util_power += r->mean_util_power;
    }
    m.total_vos /= n;
    m.normalized_vos /= n;
    m.perf_value_total /= n;
    m.energy_value_total /= n;
    m.mean_turnaround_s /= n;
    m.mean_util_core /= n;
    m.mean_util_mem /= n;
    m.mean_util_power /= n;
    return m;
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
    Catalog cat = catalog_from(a.catalog);
    NodeSpec spec;
    int node_count = 64;
    if (!a.cluster.empty()) {
        ClusterState cs = load_cluster(a.cluster, 0.0);
        spec = cs.node_spec();
        node_count = cs.node_count();
    }
    std::vector<WorkloadTrace> traces;
    std::vector<std::string> labels;
    for (const std::string& path : a.traces) {
        traces.push_back(read_trace(path));
        labels.push_back(stem_of(path));
    }
    std::vector<Heuristic> pair = heuristics_from({a.baseline, a.candidate});
    std::vector<SimReport> rows = sweep(traces, labels, spec, node_count, pair, a.budgets, cat,
                                        SimConfig{}, a.parallel);

    // Row order is traces (outer) x heuristic x budget (inner).
    std::size_t nb = a.budgets.size();
    auto row_at = [&](std::size_t ti, std::size_t hi, std::size_t bi) -> const SimReport& {
        return rows[(ti * 2 + hi) * nb + bi];
    };

    std::string metrics_csv = "power_budget_fraction,metric,baseline,candidate,delta_pct\n";
    for (std::size_t bi = 0; bi < nb; ++bi) {
        std::vector<const SimReport*> base_rows, cand_rows;
        for (std::size_t ti = 0; ti < traces.size(); ++ti) {
            base_rows.push_back(&row_at(ti, 0, bi));
            cand_rows.push_back(&row_at(ti, 1, bi));
        }
        SimReport bm = mean_report(base_rows, a.baseline, a.budgets[bi]);
        SimReport cm = mean_report(cand_rows, a.candidate, a.budgets[bi]);
        for (const MetricDelta& d : compare(bm, cm)) {
            metrics_csv += join_csv({fmt_double(a.budgets[bi]), d.metric,
                                     fmt_double(d.baseline), fmt_double(d.candidate),
                                     fmt_double(d.delta_pct)});
            metrics_csv += '\n';
        }
    }

    std::string dist_csv = "power_budget_fraction,trace,heuristic,normalized_vos,total_vos\n";
    for (std::size_t bi = 0; bi < nb; ++bi)
        for (std::size_t ti = 0; ti < traces.size(); ++ti)
            for (std::size_t hi = 0; hi < 2; ++hi) {
                const SimReport& r = row_at(ti, hi, bi);
                dist_csv += join_csv({fmt_double(r.power_budget_fraction), r.trace_label,
                                      r.heuristic, fmt_double(r.normalized_vos),
                                      fmt_double(r.total_vos)});
                dist_csv += '\n';
            }

    if (a.out.empty()) {
        out << metrics_csv << "\n" << dist_csv;
    } else {
        fs::create_directories(a.out);
        std::string mp = a.out + "/compare_metrics.csv";
        std::string dp = a.out + "/compare_distribution.csv";
        write_text_file(mp, metrics_csv);
        write_text_file(dp, dist_csv);
        out << "wrote " << mp << "\n";
        out << "wrote " << dp << "\n";
    }
    return 0;
}

struct PipelineArgs {
    std::string pipeline;
    std::string query;
    std::vector<std::string> streams;
    std::string catalog;
    std::string out;
    double horizon_s = 0.0;
    bool horizon_set = false;
    std::int64_t edge_budget_bytes = 0;
    double assumed_rate_hz = 1.0;
    bool placement_requested = false;
};

// Loads from --pipeline or --query and lists every violation on failure.
PipelineGraph load_graph(const PipelineArgs& a, std::ostream& err, bool& ok) {
    ok = false;
    if (a.pipeline.empty() == a.query.empty()) {
        err << "error: give exactly one of --pipeline or --query\n";
        return {};
    }
    PipelineGraph g = a.pipeline.empty() ? parse_query(a.query) : load_pipeline(a.pipeline);
    std::vector<std::string> violations = validate_pipeline(g);
    if (!violations.empty()) {
        err << "invalid pipeline (" << violations.size() << " violation"
            << (violations.size() == 1 ? "" : "s") << "):\n";
        for (const std::string& v : violations) err << "  - " << v << "\n";
        return {};
    }
    ok = true;
    return g;
}

int cmd_pipeline_run(const PipelineArgs& a, std::ostream& out, std::ostream& err) {
    bool ok = false;
    PipelineGraph g = load_graph(a, err, ok);
    if (!ok) return 1;

    std::vector<const OperatorNode*> fetches;
    for (const OperatorNode& n : g.nodes)
        if (n.kind == OperatorKind::fetch) fetches.push_back(&n);

    StreamSet streams;
    for (const std::string& entry : a.streams) {
        std::size_t eq = entry.find('=');
        std::string name, path;
        if (eq == std::string::npos) {
            if (fetches.size() != 1)
                throw validation_error(
                    "stream '" + entry +
                    "' needs a source name (use --stream <source>=<path>) when the pipeline "
                    "has more than one fetch");
            name = fetches[0]->source;
            path = entry;
        } else {
            name = entry.substr(0, eq);
            path = entry.substr(eq + 1);
        }
        streams[name] = read_stream(path);
    }

    double horizon = a.horizon_s;
    if (!a.horizon_set)
        for (const auto& [name, recs] : streams)
            if (!recs.empty()) horizon = std::max(horizon, recs.back().timestamp_s);

    ExecutionResult result = execute(g, streams, horizon);
    for (const auto& [window_id, evicted] : result.overflow_evictions)
        if (evicted > 0)
            err << "warning: window '" << window_id << "' dropped " << evicted
                << " records over its state budget\n";

    if (a.out.empty()) {
        for (const SinkSeries& s : result.sinks)
            out << "# sink " << s.sink_id << "\n" << sink_series_to_csv(s);
    } else {
        fs::create_directories(a.out);
        for (const SinkSeries& s : result.sinks) {
            std::string path = a.out + "/" + s.sink_id + ".csv";
            write_text_file(path, sink_series_to_csv(s));
            out << "wrote " << path << " ("
                << fmt_int(static_cast<std::int64_t>(s.ticks.size())) << " ticks)\n";
        }
    }
    return 0;
}

int cmd_pipeline_compile(const PipelineArgs& a, std::ostream& out, std::ostream& err) {
    bool ok = false;
    PipelineGraph g = load_graph(a, err, ok);
    if (!ok) return 1;

    bool any_unplaced = false;
    for (const OperatorNode& n : g.nodes)
        if (n.kind != OperatorKind::fetch && n.placement == Placement::unplaced)
            any_unplaced = true;
    if (any_unplaced || a.placement_requested)
        g = place(g, a.edge_budget_bytes, a.assumed_rate_hz);

    WorkloadTrace trace = compile_to_jobs(g, a.horizon_s, catalog_from(a.catalog));
    if (trace.empty())
        err << "warning: every operator fits on the edge; compiled trace is empty\n";
    emit(trace_to_csv(trace), a.out, out,
         fmt_int(static_cast<std::int64_t>(trace.size())) + " jobs");
    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Value-driven datacenter workload simulator"};
    app.name("vdcsim");
    app.require_subcommand(1);

    GenTraceArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen-trace", "Generate seeded synthetic traces");
    gen_cmd->add_option("--out", gen.out, "Output directory (or .csv path when --count 1)")
        ->required();
    gen_cmd->add_option("--jobs", gen.jobs, "Jobs per trace")->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--count", gen.count, "Number of traces")
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen.seed, "Seed of the first trace");
    gen_cmd->add_option("--horizon", gen.horizon_s, "Arrival horizon in seconds");
    gen_cmd->add_option("--oversubscription", gen.oversubscription,
                        "Demand-to-capacity target ratio");
    gen_cmd->add_option("--nodes", gen.nodes, "Reference cluster size");
    gen_cmd->add_option("--catalog", gen.catalog, "Job type catalog JSON");

    SimulateArgs sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Run one trace through the simulator");
    sim_cmd->add_option("--trace", sim.trace, "Workload trace CSV")->required();
    sim_cmd->add_option("--catalog", sim.catalog, "Job type catalog JSON");
    sim_cmd->add_option("--cluster", sim.cluster, "Cluster description JSON");
    sim_cmd->add_option("--heuristic", sim.heuristic, "Mapping heuristic");
    sim_cmd->add_option("--budget", sim.budget, "Power budget fraction override");
    sim_cmd->add_option("--label", sim.label, "Trace label in the report");
    sim_cmd->add_option("--format", sim.format, "Output artifact")
        ->check(CLI::IsMember({"csv", "json"}));
    sim_cmd->add_option("--out", sim.out, "Output file (default: stdout)");

    SweepArgs sw;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Cartesian sweep: traces x heuristics x budgets");
    sweep_cmd->add_option("--trace", sw.traces, "Workload trace CSV (repeatable)")->required();
    sweep_cmd->add_option("--heuristic", sw.heuristics, "Mapping heuristic (repeatable)")
        ->required();
    sweep_cmd->add_option("--budget", sw.budgets, "Power budget fraction (repeatable)")
        ->required();
    sweep_cmd->add_option("--catalog", sw.catalog, "Job type catalog JSON");
    sweep_cmd->add_option("--cluster", sw.cluster, "Cluster description JSON");
    sweep_cmd->add_option("--parallel", sw.parallel, "Concurrent runs")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", sw.out, "Output file (default: stdout)");

    CompareArgs cmp;
    CLI::App* cmp_cmd = app.add_subcommand(
        "compare", "Run two heuristics and emit per-metric deltas and distributions");
    cmp_cmd->add_option("--trace", cmp.traces, "Workload trace CSV (repeatable)")->required();
    cmp_cmd->add_option("--baseline", cmp.baseline, "Baseline heuristic");
    cmp_cmd->add_option("--candidate", cmp.candidate, "Candidate heuristic");
    cmp_cmd->add_option("--budget", cmp.budgets, "Power budget fraction (repeatable)");
    cmp_cmd->add_option("--catalog", cmp.catalog, "Job type catalog JSON");
    cmp_cmd->add_option("--cluster", cmp.cluster, "Cluster description JSON");
    cmp_cmd->add_option("--parallel", cmp.parallel, "Concurrent runs")
        ->check(CLI::PositiveNumber);
    cmp_cmd->add_option("--out", cmp.out, "Output directory (default: both CSVs to stdout)");

    PipelineArgs pr;
    PipelineArgs pc;
    CLI::App* pipe_cmd = app.add_subcommand("pipeline", "Stream pipeline tools");
    pipe_cmd->require_subcommand(1);
    CLI::App* run_cmd = pipe_cmd->add_subcommand("run", "Execute a pipeline over stream files");
    run_cmd->add_option("--pipeline", pr.pipeline, "Pipeline JSON file");
    run_cmd->add_option("--query", pr.query, "Inline query text");
    run_cmd->add_option("--stream", pr.streams, "Stream CSV: <path> or <source>=<path>")
        ->required();
    CLI::Option* hz = run_cmd->add_option("--horizon", pr.horizon_s,
                                          "Tick horizon in seconds (default: last record)");
    run_cmd->add_option("--out", pr.out, "Output directory (default: stdout)");

    CLI::App* compile_cmd =
        pipe_cmd->add_subcommand("compile", "Compile vdc-placed operators to a trace");
    compile_cmd->add_option("--pipeline", pc.pipeline, "Pipeline JSON file");
    compile_cmd->add_option("--query", pc.query, "Inline query text");
    compile_cmd->add_option("--horizon", pc.horizon_s, "Job horizon in seconds")->required();
    compile_cmd->add_option("--catalog", pc.catalog, "Job type catalog JSON");
    CLI::Option* eb = compile_cmd->add_option("--edge-budget", pc.edge_budget_bytes,
                                              "Edge state budget in bytes for placement");
    CLI::Option* rt = compile_cmd->add_option("--rate", pc.assumed_rate_hz,
                                              "Assumed stream rate in Hz for placement");
    compile_cmd->add_option("--out", pc.out, "Output trace CSV (default: stdout)");

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (app.got_subcommand(gen_cmd)) return cmd_gen_trace(gen, out);
        if (app.got_subcommand(sim_cmd)) return cmd_simulate(sim, out);
        if (app.got_subcommand(sweep_cmd)) return cmd_sweep(sw, out);
        if (app.got_subcommand(cmp_cmd)) return cmd_compare(cmp, out);
        if (app.got_subcommand(pipe_cmd)) {
            if (pipe_cmd->got_subcommand(run_cmd)) {
                pr.horizon_set = hz->count() > 0;
                return cmd_pipeline_run(pr, out, err);
            }
            pc.placement_requested = eb->count() > 0 || rt->count() > 0;
            return cmd_pipeline_compile(pc, out, err);
        }
    } catch (const consistency_error& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 1;
}

} // namespace vdcsim
