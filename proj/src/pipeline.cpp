#include "vdcsim/pipeline.hpp"

#include "vdcsim/csv.hpp"
#include "vdcsim/errors.hpp"
#include "vdcsim/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace vdcsim {
namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

const OperatorNode* node_by_id(const PipelineGraph& g, const std::string& id) {
    for (const OperatorNode& n : g.nodes)
        if (n.id == id) return &n;
    return nullptr;
}

std::vector<const OperatorNode*> inputs_of(const PipelineGraph& g, const std::string& id) {
    std::vector<const OperatorNode*> in;
    for (const auto& [from, to] : g.edges)
        if (to == id)
            if (const OperatorNode* n = node_by_id(g, from)) in.push_back(n);
    return in;
}

std::vector<const OperatorNode*> outputs_of(const PipelineGraph& g, const std::string& id) {
    std::vector<const OperatorNode*> out;
    for (const auto& [from, to] : g.edges)
        if (from == id)
            if (const OperatorNode* n = node_by_id(g, to)) out.push_back(n);
    return out;
}

void require_valid(const PipelineGraph& graph, const std::string& doing) {
    std::vector<std::string> errs = validate_pipeline(graph);
    if (errs.empty()) return;
    std::string msg = "pipeline: cannot " + doing + ": " + errs.front();
    if (errs.size() > 1)
        msg += " (and " + fmt_int(static_cast<std::int64_t>(errs.size() - 1)) + " more)";
    throw validation_error(msg);
}

} // namespace

OperatorKind operator_kind_from_name(const std::string& name) {
    if (name == "fetch") return OperatorKind::fetch;
    if (name == "window") return OperatorKind::window;
    if (name == "aggregate") return OperatorKind::aggregate;
    if (name == "sink") return OperatorKind::sink;
    throw validation_error("pipeline: unknown operator kind '" + name + "'");
}

std::string operator_kind_name(OperatorKind k) {
    switch (k) {
    case OperatorKind::fetch: return "fetch";
    case OperatorKind::window: return "window";
    case OperatorKind::aggregate: return "aggregate";
    case OperatorKind::sink: return "sink";
    }
    throw validation_error("pipeline: bad operator kind");
}

AggregateFn aggregate_from_name(const std::string& name) {
    if (name == "min") return AggregateFn::min;
    if (name == "max") return AggregateFn::max;
    if (name == "mean") return AggregateFn::mean;
    if (name == "count") return AggregateFn::count;
    throw validation_error("pipeline: unknown aggregate function '" + name + "'");
}

std::string aggregate_name(AggregateFn fn) {
    switch (fn) {
    case AggregateFn::min: return "min";
    case AggregateFn::max: return "max";
    case AggregateFn::mean: return "mean";
    case AggregateFn::count: return "count";
    }
    throw validation_error("pipeline: bad aggregate function");
}

WindowKind window_kind_from_name(const std::string& name) {
    if (name == "sliding") return WindowKind::sliding;
    if (name == "landmark") return WindowKind::landmark;
    throw validation_error("pipeline: unknown window kind '" + name + "'");
}

std::string window_kind_name(WindowKind k) {
    return k == WindowKind::sliding ? "sliding" : "landmark";
}

std::vector<std::string> validate_pipeline(const PipelineGraph& graph) {
    std::vector<std::string> errs;
    std::unordered_set<std::string> ids;
    for (const OperatorNode& n : graph.nodes) {
        if (n.id.empty()) errs.push_back("node with empty id");
        if (!ids.insert(n.id).second) errs.push_back("duplicate node id '" + n.id + "'");
    }
    for (const auto& [from, to] : graph.edges) {
        if (!node_by_id(graph, from))
            errs.push_back("edge from unknown node '" + from + "'");
        if (!node_by_id(graph, to)) errs.push_back("edge to unknown node '" + to + "'");
        if (from == to) errs.push_back("self-edge on '" + from + "'");
    }
    if (!errs.empty()) return errs; // structure below assumes resolvable ids

    for (const OperatorNode& n : graph.nodes) {
        auto in = inputs_of(graph, n.id);
        auto out = outputs_of(graph, n.id);
        switch (n.kind) {
        case OperatorKind::fetch:
            if (!in.empty()) errs.push_back("fetch '" + n.id + "' must have no inputs");
            if (n.source.empty()) errs.push_back("fetch '" + n.id + "' needs a source name");
            break;
        case OperatorKind::window:
            if (in.size() != 1 || in[0]->kind != OperatorKind::fetch)
                errs.push_back("window '" + n.id + "' needs exactly one fetch input");
            if (out.size() != 1 || out[0]->kind != OperatorKind::aggregate)
                errs.push_back("window '" + n.id + "' must feed exactly one aggregate");
            if (n.window.kind == WindowKind::sliding && !(n.window.length_s > 0.0))
                errs.push_back("window '" + n.id + "': length must be > 0");
            if (n.window.kind == WindowKind::landmark && n.window.landmark_start_s < 0.0)
                errs.push_back("window '" + n.id + "': landmark start must be >= 0");
            if (n.state_budget_bytes < 0)
                errs.push_back("window '" + n.id + "': state budget must be >= 0");
            break;
        case OperatorKind::aggregate:
            if (in.size() != 1 || in[0]->kind != OperatorKind::window)
                errs.push_back("aggregate '" + n.id + "' needs exactly one window input");
            if (out.empty())
                errs.push_back("aggregate '" + n.id + "' must feed at least one sink");
            for (const OperatorNode* o : out)
                if (o->kind != OperatorKind::sink)
                    errs.push_back("aggregate '" + n.id + "' may only feed sinks");
            if (!(n.recurrence_s > 0.0))
                errs.push_back("aggregate '" + n.id + "': recurrence must be > 0");
            break;
        case OperatorKind::sink:
            if (!out.empty()) errs.push_back("sink '" + n.id + "' must have no outputs");
            if (in.size() != 1 || in[0]->kind != OperatorKind::aggregate)
                errs.push_back("sink '" + n.id + "' needs exactly one aggregate input");
            break;
        }
    }

    // Cycle check; the chain typing above cannot rule one out on its own
    // when it has already reported violations.
    std::unordered_map<std::string, int> indegree;
    for (const OperatorNode& n : graph.nodes) indegree[n.id] = 0;
    for (const auto& [from, to] : graph.edges) indegree[to] += 1;
    std::vector<std::string> order;
    for (const auto& [id, d] : indegree)
        if (d == 0) order.push_back(id);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (const OperatorNode* o : outputs_of(graph, order[i]))
            if (--indegree[o->id] == 0) order.push_back(o->id);
    if (order.size() != graph.nodes.size()) errs.push_back("graph has a cycle");

    // Reachability from some fetch.
    std::unordered_set<std::string> reach;
    std::vector<std::string> frontier;
    for (const OperatorNode& n : graph.nodes)
        if (n.kind == OperatorKind::fetch) {
            reach.insert(n.id);
            frontier.push_back(n.id);
        }
    while (!frontier.empty()) {
        std::string id = frontier.back();
        frontier.pop_back();
        for (const OperatorNode* o : outputs_of(graph, id))
            if (reach.insert(o->id).second) frontier.push_back(o->id);
    }
    for (const OperatorNode& n : graph.nodes)
        if (n.kind != OperatorKind::fetch && !reach.count(n.id))
            errs.push_back("node '" + n.id + "' is not reachable from any fetch");

    return errs;
}

ExecutionResult execute(const PipelineGraph& graph, const StreamSet& streams,
                        double horizon_s) {
    require_valid(graph, "execute");
    for (const OperatorNode& n : graph.nodes)
        if (n.placement == Placement::vdc)
            throw validation_error("pipeline: operator '" + n.id +
                                   "' is placed on the vdc; compile the pipeline instead");
    for (const auto& [source, recs] : streams)
        for (std::size_t i = 1; i < recs.size(); ++i)
            if (recs[i].timestamp_s < recs[i - 1].timestamp_s)
                throw validation_error("pipeline: stream '" + source +
                                       "' timestamps go backwards at record " +
                                       fmt_int(static_cast<std::int64_t>(i + 1)));

    ExecutionResult result;
    std::unordered_map<std::string, std::vector<std::pair<double, double>>> series_of;

    for (const OperatorNode& agg : graph.nodes) {
        if (agg.kind != OperatorKind::aggregate) continue;
        const OperatorNode& win = *inputs_of(graph, agg.id)[0];
        const OperatorNode& fetch = *inputs_of(graph, win.id)[0];
        auto it = streams.find(fetch.source);
        if (it == streams.end())
            throw validation_error("pipeline: no stream for source '" + fetch.source + "'");
        const std::vector<StreamRecord>& recs = it->second;

        std::deque<std::pair<double, double>> buf; // (timestamp, value)
        std::size_t next = 0;
        std::int64_t evicted = 0;
        std::vector<std::pair<double, double>> out;
        for (std::int64_t k = 1;
             static_cast<double>(k) * agg.recurrence_s <= horizon_s; ++k) {
            double tick = static_cast<double>(k) * agg.recurrence_s;
            while (next < recs.size() && recs[next].timestamp_s <= tick) {
                buf.emplace_back(recs[next].timestamp_s, recs[next].value);
                ++next;
                if (win.state_budget_bytes > 0)
                    while (static_cast<std::int64_t>(buf.size()) * stream_record_bytes >
                           win.state_budget_bytes) {
                        buf.pop_front();
                        ++evicted;
                    }
            }
            if (win.window.kind == WindowKind::sliding) {
                double lo = tick - win.window.length_s;
                while (!buf.empty() && buf.front().first <= lo) buf.pop_front();
            } else {
                while (!buf.empty() && buf.front().first < win.window.landmark_start_s)
                    buf.pop_front();
            }
            switch (agg.fn) {
            case AggregateFn::count:
                out.emplace_back(tick, static_cast<double>(buf.size()));
                break;
            case AggregateFn::min:
            case AggregateFn::max: {
                if (buf.empty()) break;
                double best = buf.front().second;
                for (const auto& [ts, v] : buf)
                    best = agg.fn == AggregateFn::min ? std::min(best, v) : std::max(best, v);
                out.emplace_back(tick, best);
                break;
            }
            case AggregateFn::mean: {
                if (buf.empty()) break;
                double sum = 0.0;
                for (const auto& [ts, v] : buf) sum += v;
                out.emplace_back(tick, sum / static_cast<double>(buf.size()));
                break;
            }
            }
        }
        series_of[agg.id] = std::move(out);
        result.overflow_evictions[win.id] = evicted;
    }

    for (const OperatorNode& n : graph.nodes) {
        if (n.kind != OperatorKind::sink) continue;
        const OperatorNode& agg = *inputs_of(graph, n.id)[0];
        result.sinks.push_back(SinkSeries{n.id, series_of[agg.id]});
    }
    return result;
}

PipelineGraph place(const PipelineGraph& graph, std::int64_t edge_budget_bytes,
                    double assumed_rate_hz, std::int64_t record_bytes) {
    require_valid(graph, "place");
    if (edge_budget_bytes < 0)
        throw validation_error("pipeline: edge budget must be >= 0");
    if (!(assumed_rate_hz > 0.0))
        throw validation_error("pipeline: assumed rate must be > 0");
    if (record_bytes < 1)
        throw validation_error("pipeline: record size must be >= 1");

    PipelineGraph placed = graph;
    std::unordered_map<std::string, Placement> tag;
    for (OperatorNode& n : placed.nodes) {
        if (n.kind == OperatorKind::fetch) {
            n.placement = Placement::edge;
            tag[n.id] = n.placement;
        } else if (n.kind == OperatorKind::window) {
            double worst = n.window.kind == WindowKind::sliding
                               ? n.window.length_s * assumed_rate_hz *
                                     static_cast<double>(record_bytes)
                               : std::numeric_limits<double>::infinity();
            double budget = static_cast<double>(edge_budget_bytes);
            if (n.state_budget_bytes > 0)
                budget = std::min(budget, static_cast<double>(n.state_budget_bytes));
            n.placement = worst <= budget ? Placement::edge : Placement::vdc;
            tag[n.id] = n.placement;
        }
    }
    // Aggregates run where their window's state lives; sinks follow.
    for (OperatorNode& n : placed.nodes)
        if (n.kind == OperatorKind::aggregate) {
            n.placement = tag[inputs_of(placed, n.id)[0]->id];
            tag[n.id] = n.placement;
        }
    for (OperatorNode& n : placed.nodes)
        if (n.kind == OperatorKind::sink) n.placement = tag[inputs_of(placed, n.id)[0]->id];
    return placed;
}

WorkloadTrace compile_to_jobs(const PipelineGraph& graph, double horizon_s,
                              const Catalog& catalog, const CompileOptions& opts) {
    require_valid(graph, "compile");
    if (!(horizon_s >= 0.0))
        throw validation_error("pipeline: horizon must be >= 0");
    if (!(opts.v_max > 0.0) || opts.v_min_frac < 0.0 || opts.v_min_frac > 1.0)
        throw validation_error("pipeline: bad compiled-value options");
    if (opts.nodes_min < 1 || opts.nodes_min > opts.nodes_max)
        throw validation_error("pipeline: bad compiled node range");
    if (!(opts.problem_size > 0.0) || opts.iterations < 1)
        throw validation_error("pipeline: bad compiled problem size");
    if (!(opts.energy_soft_mult > 0.0) || opts.energy_hard_mult < opts.energy_soft_mult)
        throw validation_error("pipeline: bad compiled energy multipliers");
    for (const OperatorNode& n : graph.nodes)
        if (n.kind != OperatorKind::fetch && n.placement == Placement::unplaced)
            throw validation_error("pipeline: operator '" + n.id +
                                   "' is unplaced; run placement before compiling");

    WorkloadTrace trace;
    for (const OperatorNode& agg : graph.nodes) {
        if (agg.kind != OperatorKind::aggregate || agg.placement != Placement::vdc) continue;
        auto ty = opts.job_type_of.find(agg.fn);
        if (ty == opts.job_type_of.end())
            throw validation_error("pipeline: no job type mapped for aggregate function '" +
                                   aggregate_name(agg.fn) + "'");
        const JobTypeProfile& profile = catalog.find(ty->second);

        ResourceConfig min_cfg;
        min_cfg.nodes = opts.nodes_min;
        min_cfg.cores_per_node = opts.node_spec.cores_per_node();
        min_cfg.mem_per_node_gb =
            mem_share_per_node(profile, opts.problem_size, opts.nodes_min);
        min_cfg.power_cap_fraction = 1.0;
        CostEstimate est =
            estimate(profile, opts.problem_size, opts.iterations, min_cfg, opts.node_spec);

        for (std::int64_t k = 1;
             static_cast<double>(k) * agg.recurrence_s <= horizon_s; ++k) {
            TraceRecord r;
            r.arrival_s = static_cast<double>(k) * agg.recurrence_s;
            r.job_name = agg.id + "-" + fmt_int(k);
            r.job_type = ty->second;
            r.gamma = opts.gamma;
            r.v_max = opts.v_max;
            r.v_min_frac = opts.v_min_frac;
            r.problem_size = opts.problem_size;
            r.iterations = opts.iterations;
            r.nodes_min = opts.nodes_min;
            r.nodes_max = opts.nodes_max;
            r.perf_soft_s = agg.recurrence_s;
            r.perf_hard_s = 2.0 * agg.recurrence_s;
            r.energy_soft_j = opts.energy_soft_mult * est.energy_j;
            r.energy_hard_j = opts.energy_hard_mult * est.energy_j;
            trace.jobs.push_back(r);
        }
    }
    std::stable_sort(trace.jobs.begin(), trace.jobs.end(),
                     [](const TraceRecord& a, const TraceRecord& b) {
                         return a.arrival_s < b.arrival_s;
                     });
    return trace;
}

namespace {

double unit_seconds(const std::string& raw) {
    std::string u = lower(raw);
    if (u == "s" || u == "sec" || u == "secs" || u == "second" || u == "seconds") return 1.0;
    if (u == "m" || u == "min" || u == "mins" || u == "minute" || u == "minutes") return 60.0;
    if (u == "h" || u == "hour" || u == "hours") return 3600.0;
    if (u == "d" || u == "day" || u == "days") return 86400.0;
    throw validation_error("query: unknown time unit '" + raw + "'");
}

} // namespace

PipelineGraph parse_query(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> tok;
    for (std::string w; in >> w;) tok.push_back(w);
    std::size_t pos = 0;
    auto take = [&](const char* expected) {
        if (pos >= tok.size())
            throw validation_error(std::string("query: expected ") + expected +
                                   ", got end of input");
        return tok[pos++];
    };
    auto keyword = [&](const char* kw) {
        std::string got = take(kw);
        if (lower(got) != lower(kw))
            throw validation_error(std::string("query: expected ") + kw + ", got '" + got +
                                   "'");
    };
    auto duration = [&](const char* what) {
        std::string num = take(what);
        double n;
        try {
            n = parse_double(num);
        } catch (const validation_error&) {
            throw validation_error(std::string("query: bad ") + what + " '" + num + "'");
        }
        double s = n * unit_seconds(take("time unit"));
        if (!(s > 0.0))
            throw validation_error(std::string("query: ") + what + " must be > 0");
        return s;
    };

    keyword("EVERY");
    double recurrence = duration("period");
    keyword("COMPUTE");
    AggregateFn fn = aggregate_from_name(lower(take("aggregate function")));
    keyword("OF");
    std::string field = take("field");
    keyword("OVER");
    keyword("LAST");
    double length = duration("window length");
    keyword("FROM");
    if (pos >= tok.size()) throw validation_error("query: expected source after FROM");
    std::string source;
    while (pos < tok.size()) {
        if (!source.empty()) source += ' ';
        source += tok[pos++];
    }

    PipelineGraph g;
    OperatorNode f;
    f.id = "fetch";
    f.kind = OperatorKind::fetch;
    f.source = source;
    f.field = field;
    OperatorNode w;
    w.id = "window";
    w.kind = OperatorKind::window;
    w.window.kind = WindowKind::sliding;
    w.window.length_s = length;
    OperatorNode a;
    a.id = aggregate_name(fn);
    a.kind = OperatorKind::aggregate;
    a.fn = fn;
    a.field = field;
    a.recurrence_s = recurrence;
    OperatorNode s;
    s.id = "sink";
    s.kind = OperatorKind::sink;
    s.source = "out";
    g.nodes = {f, w, a, s};
    g.edges = {{"fetch", "window"}, {"window", a.id}, {a.id, "sink"}};
    return g;
}

PipelineGraph parse_pipeline(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("pipeline: invalid JSON: ") + e.what());
    }
    try {
        if (!j.is_object() || !j.contains("schema_version"))
            throw validation_error("pipeline: missing schema_version");
        if (j.at("schema_version").get<int>() != 1)
            throw validation_error("pipeline: unsupported schema_version");
        PipelineGraph g;
        for (const auto& e : j.at("nodes")) {
            OperatorNode n;
            n.id = e.at("id").get<std::string>();
            n.kind = operator_kind_from_name(e.at("kind").get<std::string>());
            if (e.contains("source")) n.source = e.at("source").get<std::string>();
            if (e.contains("target")) n.source = e.at("target").get<std::string>();
            if (e.contains("field")) n.field = e.at("field").get<std::string>();
            if (e.contains("window_kind"))
                n.window.kind = window_kind_from_name(e.at("window_kind").get<std::string>());
            if (e.contains("length_s")) n.window.length_s = e.at("length_s").get<double>();
            if (e.contains("landmark_start_s"))
                n.window.landmark_start_s = e.at("landmark_start_s").get<double>();
            if (e.contains("fn")) n.fn = aggregate_from_name(e.at("fn").get<std::string>());
            if (e.contains("recurrence_s")) n.recurrence_s = e.at("recurrence_s").get<double>();
            if (e.contains("state_budget_bytes"))
                n.state_budget_bytes = e.at("state_budget_bytes").get<std::int64_t>();
            if (e.contains("placement")) {
                std::string p = e.at("placement").get<std::string>();
                if (p == "edge")
                    n.placement = Placement::edge;
                else if (p == "vdc")
                    n.placement = Placement::vdc;
                else
                    throw validation_error("pipeline: unknown placement '" + p + "'");
            }
            g.nodes.push_back(n);
        }
        for (const auto& e : j.at("edges"))
            g.edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("pipeline: bad document: ") + e.what());
    }
}

PipelineGraph load_pipeline(const std::string& path) {
    return parse_pipeline(read_text_file(path));
}

std::string pipeline_to_json(const PipelineGraph& graph) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["nodes"] = nlohmann::ordered_json::array();
    for (const OperatorNode& n : graph.nodes) {
        nlohmann::ordered_json e;
        e["id"] = n.id;
        e["kind"] = operator_kind_name(n.kind);
        switch (n.kind) {
        case OperatorKind::fetch:
            e["source"] = n.source;
            if (!n.field.empty()) e["field"] = n.field;
            break;
        case OperatorKind::window:
            e["window_kind"] = window_kind_name(n.window.kind);
            if (n.window.kind == WindowKind::sliding)
                e["length_s"] = n.window.length_s;
            else
                e["landmark_start_s"] = n.window.landmark_start_s;
            if (n.state_budget_bytes > 0) e["state_budget_bytes"] = n.state_budget_bytes;
            break;
        case OperatorKind::aggregate:
            e["fn"] = aggregate_name(n.fn);
            e["recurrence_s"] = n.recurrence_s;
            if (!n.field.empty()) e["field"] = n.field;
            break;
        case OperatorKind::sink:
            e["target"] = n.source;
            break;
        }
        if (n.placement == Placement::edge) e["placement"] = "edge";
        if (n.placement == Placement::vdc) e["placement"] = "vdc";
        j["nodes"].push_back(e);
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [from, to] : graph.edges)
        j["edges"].push_back(nlohmann::ordered_json::array({from, to}));
    return j.dump(2) + "\n";
}

std::vector<StreamRecord> parse_stream_csv(const std::string& text, const std::string& origin) {
    static const char* cols[3] = {"timestamp_s", "key", "value"};
    CsvTable table = parse_csv(text, origin);
    for (std::size_t c = 0; c < 3; ++c) {
        bool present = false;
        for (const std::string& h : table.header) present = present || h == cols[c];
        if (!present) throw validation_error(origin + ": missing column " + cols[c]);
    }
    if (table.header.size() != 3)
        throw validation_error(origin + ": expected 3 columns, got " +
                               fmt_int(static_cast<std::int64_t>(table.header.size())));
    for (std::size_t c = 0; c < 3; ++c)
        if (table.header[c] != cols[c])
            throw validation_error(origin + ": column " +
                                   fmt_int(static_cast<std::int64_t>(c + 1)) + " must be " +
                                   cols[c] + ", got " + table.header[c]);
    std::vector<StreamRecord> recs;
    recs.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const std::vector<std::string>& row = table.rows[i];
        std::string at = origin + ": row " + fmt_int(static_cast<std::int64_t>(i + 2));
        StreamRecord r;
        try {
            r.timestamp_s = parse_double(row[0]);
        } catch (const validation_error&) {
            throw validation_error(at + ": bad timestamp_s '" + row[0] + "'");
        }
        r.key = row[1];
        try {
            r.value = parse_double(row[2]);
        } catch (const validation_error&) {
            throw validation_error(at + ": bad value '" + row[2] + "'");
        }
        if (r.timestamp_s < 0.0)
            throw validation_error(at + ": timestamp_s must be >= 0");
        if (!recs.empty() && r.timestamp_s < recs.back().timestamp_s)
            throw validation_error(at + ": timestamps must be non-decreasing");
        recs.push_back(std::move(r));
    }
    return recs;
}

std::vector<StreamRecord> read_stream(const std::string& path) {
    return parse_stream_csv(read_text_file(path), path);
}

std::string stream_to_csv(const std::vector<StreamRecord>& records) {
    std::string out = "timestamp_s,key,value\n";
    for (const StreamRecord& r : records) {
        out += join_csv({fmt_double(r.timestamp_s), r.key, fmt_double(r.value)});
        out += '\n';
    }
    return out;
}

std::string sink_series_to_csv(const SinkSeries& series) {
    std::string out = "tick_s,value\n";
    for (const auto& [tick, value] : series.ticks) {
        out += join_csv({fmt_double(tick), fmt_double(value)});
        out += '\n';
    }
    return out;
}

std::vector<StreamRecord> generate_stream(const StreamGenParams& params) {
    if (!(params.horizon_s > 0.0))
        throw validation_error("stream gen: horizon must be > 0");
    if (params.keys < 1) throw validation_error("stream gen: keys must be >= 1");
    if (!(params.rate_per_key_hz > 0.0))
        throw validation_error("stream gen: rate must be > 0");
    if (params.lognormal_sigma < 0.0)
        throw validation_error("stream gen: sigma must be >= 0");

    Rng rng(params.seed);
    std::vector<StreamRecord> all;
    for (int k = 0; k < params.keys; ++k) {
        std::string key = "k" + fmt_int(k);
        double t = 0.0;
        for (;;) {
            t += rng.exponential(params.rate_per_key_hz);
            if (t > params.horizon_s) break;
            all.push_back(
                StreamRecord{t, key, rng.lognormal(params.lognormal_mu, params.lognormal_sigma)});
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const StreamRecord& a, const StreamRecord& b) {
        if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
        return a.key < b.key;
    });
    return all;
}

} // namespace vdcsim
