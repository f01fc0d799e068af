#include "vdcsim/tracegen.hpp"

#include "vdcsim/csv.hpp"
#include "vdcsim/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace vdcsim {

void GenParams::validate() const {
    if (job_count < 0) throw validation_error("job_count must be >= 0");
    if (!(horizon_s > 0.0)) throw validation_error("horizon_s must be > 0");
    if (!(peak_fraction > 0.0) || !(peak_fraction < 1.0))
        throw validation_error("peak_fraction must be in (0,1)");
    if (!(peak_rate_multiplier > 0.0))
        throw validation_error("peak_rate_multiplier must be > 0");
    if (!(oversubscription > 0.0)) throw validation_error("oversubscription must be > 0");
    if (cluster_nodes < 1) throw validation_error("cluster_nodes must be >= 1");
    node_spec.validate();
    auto range = [](double lo, double hi, const char* what) {
        if (!(lo > 0.0) || hi < lo)
            throw validation_error(std::string(what) + " range is invalid");
    };
    range(gamma_min, gamma_max, "gamma");
    range(v_max_min, v_max_max, "v_max");
    if (v_min_frac_min < 0.0 || v_min_frac_max > 1.0 || v_min_frac_max < v_min_frac_min)
        throw validation_error("v_min_frac range is invalid");
    range(size_min, size_max, "problem_size");
    if (iter_min < 1 || iter_max < iter_min) throw validation_error("iterations range is invalid");
    if (nodes_min_lo < 1 || nodes_min_hi < nodes_min_lo || nodes_max_hi < nodes_min_hi)
        throw validation_error("node count ranges are invalid");
    auto mult = [](double lo, double hi, const char* what) {
        if (!(lo >= 1.0) || hi < lo)
            throw validation_error(std::string(what) + " multiplier range is invalid");
    };
    mult(perf_soft_mult_min, perf_soft_mult_max, "perf_soft");
    mult(perf_hard_mult_min, perf_hard_mult_max, "perf_hard");
    mult(energy_soft_mult_min, energy_soft_mult_max, "energy_soft");
    mult(energy_hard_mult_min, energy_hard_mult_max, "energy_hard");
}

void validate_trace(const WorkloadTrace& trace) {
    double last = 0.0;
    std::set<std::string> names;
    for (std::size_t i = 0; i < trace.jobs.size(); ++i) {
        const TraceRecord& r = trace.jobs[i];
        std::string at = "trace row " + fmt_int(static_cast<std::int64_t>(i)) + ": ";
        if (r.arrival_s < 0.0) throw validation_error(at + "negative arrival");
        if (r.arrival_s < last) throw validation_error(at + "arrivals not sorted");
        last = r.arrival_s;
        if (r.job_name.empty()) throw validation_error(at + "empty job_name");
        if (!names.insert(r.job_name).second)
            throw validation_error(at + "duplicate job_name " + r.job_name);
        if (r.job_type.empty()) throw validation_error(at + "empty job_type");
        if (!(r.gamma > 0.0)) throw validation_error(at + "gamma must be > 0");
        if (!(r.v_max > 0.0)) throw validation_error(at + "v_max must be > 0");
        if (r.v_min_frac < 0.0 || r.v_min_frac > 1.0)
            throw validation_error(at + "v_min_frac outside [0,1]");
        if (!(r.problem_size > 0.0)) throw validation_error(at + "problem_size must be > 0");
        if (r.iterations < 1) throw validation_error(at + "iterations must be >= 1");
        if (r.nodes_min < 1 || r.nodes_min > r.nodes_max)
            throw validation_error(at + "node range is invalid");
        if (!(r.perf_soft_s > 0.0) || r.perf_hard_s < r.perf_soft_s)
            throw validation_error(at + "performance thresholds are invalid");
        if (!(r.energy_soft_j > 0.0) || r.energy_hard_j < r.energy_soft_j)
            throw validation_error(at + "energy thresholds are invalid");
    }
}

namespace {

// Min config: fewest nodes, all cores, exactly the memory the job needs.
ResourceConfig min_config_of(const TraceRecord& r, const JobTypeProfile& p,
                             const NodeSpec& spec) {
    ResourceConfig cfg;
    cfg.nodes = r.nodes_min;
    cfg.cores_per_node = spec.cores_per_node();
    cfg.mem_per_node_gb = mem_share_per_node(p, r.problem_size, r.nodes_min);
    cfg.power_cap_fraction = 1.0;
    return cfg;
}

} // namespace

WorkloadTrace generate(const GenParams& params, const Catalog& catalog) {
    params.validate();
    validate_catalog(catalog);
    WorkloadTrace trace;
    if (params.job_count == 0) return trace;

    Rng rng(params.seed);

    // Arrival times by inverse CDF of the two-rate profile, then sorted.
    const double peak_len = params.peak_fraction * params.horizon_s;
    const double tail_len = params.horizon_s - peak_len;
    const double peak_mass = params.peak_rate_multiplier * peak_len;
    const double total_mass = peak_mass + tail_len;
    std::vector<double> arrivals(static_cast<std::size_t>(params.job_count));
    for (double& a : arrivals) {
        double x = rng.uniform01() * total_mass;
        a = x <= peak_mass ? x / params.peak_rate_multiplier : peak_len + (x - peak_mass);
    }
    std::sort(arrivals.begin(), arrivals.end());

    trace.jobs.resize(arrivals.size());
    int name_width = 1;
    for (int n = params.job_count; n >= 10; n /= 10) ++name_width;
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        TraceRecord& r = trace.jobs[i];
        r.arrival_s = arrivals[i];
        std::string num = fmt_int(static_cast<std::int64_t>(i + 1));
        std::size_t pad =
            num.size() >= static_cast<std::size_t>(name_width)
                ? 0
                : static_cast<std::size_t>(name_width) - num.size();
        r.job_name = "j" + std::string(pad, '0') + num;
        const JobTypeProfile& p =
            catalog.profiles[rng.uniform_int(0, static_cast<int>(catalog.profiles.size()) - 1)];
        r.job_type = p.name;
        r.gamma = rng.uniform(params.gamma_min, params.gamma_max);
        r.v_max = rng.uniform(params.v_max_min, params.v_max_max);
        r.v_min_frac = rng.uniform(params.v_min_frac_min, params.v_min_frac_max);
        r.nodes_min = rng.uniform_int(params.nodes_min_lo, params.nodes_min_hi);
        r.nodes_max = rng.uniform_int(r.nodes_min, params.nodes_max_hi);
        r.problem_size = rng.uniform(params.size_min, params.size_max);
        // Keep the min config memory-feasible on the reference node.
        double size_cap = 0.95 * r.nodes_min * params.node_spec.mem_gb / p.mem_per_unit_gb;
        r.problem_size = std::min(r.problem_size, size_cap);
        r.iterations = rng.uniform_int(params.iter_min, params.iter_max);
    }

    // Rescale iteration counts until min-config demand hits the target.
    const double capacity = static_cast<double>(params.cluster_nodes) *
                            params.node_spec.cores_per_node() * params.horizon_s;
    const double target = params.oversubscription * capacity;
    for (int pass = 0; pass < 3; ++pass) {
        double demand = 0.0;
        for (const TraceRecord& r : trace.jobs) {
            const JobTypeProfile& p = catalog.find(r.job_type);
            ResourceConfig cfg = min_config_of(r, p, params.node_spec);
            demand +=
                predict_exec_time(p, r.problem_size, r.iterations, cfg) * r.nodes_min *
                cfg.cores_per_node;
        }
        double scale = target / demand;
        if (scale > 0.95 && scale < 1.05) break;
        for (TraceRecord& r : trace.jobs)
            r.iterations = std::max<std::int64_t>(
                1, static_cast<std::int64_t>(std::llround(r.iterations * scale)));
    }

    // Thresholds from each job's own min-config cost.
    for (TraceRecord& r : trace.jobs) {
        const JobTypeProfile& p = catalog.find(r.job_type);
        ResourceConfig cfg = min_config_of(r, p, params.node_spec);
        CostEstimate est = estimate(p, r.problem_size, r.iterations, cfg, params.node_spec);
        r.perf_soft_s =
            est.exec_time_s * rng.uniform(params.perf_soft_mult_min, params.perf_soft_mult_max);
        r.perf_hard_s =
            r.perf_soft_s * rng.uniform(params.perf_hard_mult_min, params.perf_hard_mult_max);
        r.energy_soft_j =
            est.energy_j * rng.uniform(params.energy_soft_mult_min, params.energy_soft_mult_max);
        r.energy_hard_j =
            r.energy_soft_j * rng.uniform(params.energy_hard_mult_min, params.energy_hard_mult_max);
        if (est.exec_time_s > r.perf_soft_s || est.energy_j > r.energy_soft_j)
            throw consistency_error("generated job " + r.job_name +
                                    " is not achievable at its min config");
    }

    validate_trace(trace);
    return trace;
}

namespace {

const char* const k_trace_header[] = {"arrival_s",   "job_name",   "job_type",      "gamma",
                                      "v_max",       "v_min_frac", "problem_size",  "iterations",
                                      "nodes_min",   "nodes_max",  "perf_soft_s",   "perf_hard_s",
                                      "energy_soft_j", "energy_hard_j"};
constexpr std::size_t k_trace_cols = sizeof(k_trace_header) / sizeof(k_trace_header[0]);

} // namespace

WorkloadTrace parse_trace_csv(const std::string& text, const std::string& origin) {
    CsvTable table = parse_csv(text, origin);
    for (std::size_t c = 0; c < k_trace_cols; ++c) {
        bool present = false;
        for (const std::string& h : table.header) present = present || h == k_trace_header[c];
        if (!present)
            throw validation_error(origin + ": missing column " + k_trace_header[c]);
    }
    if (table.header.size() != k_trace_cols)
        throw validation_error(origin + ": expected " + fmt_int(k_trace_cols) +
                               " columns, got " +
                               fmt_int(static_cast<std::int64_t>(table.header.size())));
    for (std::size_t c = 0; c < k_trace_cols; ++c)
        if (table.header[c] != k_trace_header[c])
            throw validation_error(origin + ": column " +
                                   fmt_int(static_cast<std::int64_t>(c + 1)) + " must be " +
                                   k_trace_header[c] + ", got " + table.header[c]);
    WorkloadTrace trace;
    trace.jobs.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const std::vector<std::string>& row = table.rows[i];
        // Header is row 1 in the file.
        std::string at = origin + ": row " + fmt_int(static_cast<std::int64_t>(i + 2));
        auto num = [&](std::size_t c) {
            try {
                return parse_double(row[c]);
            } catch (const validation_error&) {
                throw validation_error(at + ": bad " + k_trace_header[c] + " '" + row[c] + "'");
            }
        };
        auto integer = [&](std::size_t c) {
            try {
                return parse_int(row[c]);
            } catch (const validation_error&) {
                throw validation_error(at + ": bad " + k_trace_header[c] + " '" + row[c] + "'");
            }
        };
        TraceRecord r;
        r.arrival_s = num(0);
        r.job_name = row[1];
        r.job_type = row[2];
        r.gamma = num(3);
        r.v_max = num(4);
        r.v_min_frac = num(5);
        r.problem_size = num(6);
        r.iterations = integer(7);
        r.nodes_min = static_cast<int>(integer(8));
        r.nodes_max = static_cast<int>(integer(9));
        r.perf_soft_s = num(10);
        r.perf_hard_s = num(11);
        r.energy_soft_j = num(12);
        r.energy_hard_j = num(13);
        trace.jobs.push_back(std::move(r));
    }
    validate_trace(trace);
    return trace;
}

WorkloadTrace read_trace(const std::string& path) {
    return parse_trace_csv(read_text_file(path), path);
}

std::string trace_to_csv(const WorkloadTrace& trace) {
    std::string out;
    {
        std::vector<std::string> hdr(k_trace_header, k_trace_header + k_trace_cols);
        out += join_csv(hdr);
        out += '\n';
    }
    for (const TraceRecord& r : trace.jobs) {
        std::vector<std::string> row = {fmt_double(r.arrival_s),
                                        r.job_name,
                                        r.job_type,
                                        fmt_double(r.gamma),
                                        fmt_double(r.v_max),
                                        fmt_double(r.v_min_frac),
                                        fmt_double(r.problem_size),
                                        fmt_int(r.iterations),
                                        fmt_int(r.nodes_min),
                                        fmt_int(r.nodes_max),
                                        fmt_double(r.perf_soft_s),
                                        fmt_double(r.perf_hard_s),
                                        fmt_double(r.energy_soft_j),
                                        fmt_double(r.energy_hard_j)};
        out += join_csv(row);
        out += '\n';
    }
    return out;
}

void write_trace(const std::string& path, const WorkloadTrace& trace) {
    write_text_file(path, trace_to_csv(trace));
}

GenParams parse_gen_params(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad generation parameters: ") + e.what());
    }
    if (!j.is_object()) throw validation_error("generation parameters must be a JSON object");
    GenParams gp;
    auto get_int = [&](const char* key, auto& field) {
        if (j.contains(key)) {
            field = j[key].template get<std::remove_reference_t<decltype(field)>>();
            j.erase(key);
        }
    };
    get_int("job_count", gp.job_count);
    get_int("horizon_s", gp.horizon_s);
    get_int("peak_fraction", gp.peak_fraction);
    get_int("peak_rate_multiplier", gp.peak_rate_multiplier);
    get_int("oversubscription", gp.oversubscription);
    get_int("cluster_nodes", gp.cluster_nodes);
    get_int("gamma_min", gp.gamma_min);
    get_int("gamma_max", gp.gamma_max);
    get_int("v_max_min", gp.v_max_min);
    get_int("v_max_max", gp.v_max_max);
    get_int("v_min_frac_min", gp.v_min_frac_min);
    get_int("v_min_frac_max", gp.v_min_frac_max);
    get_int("size_min", gp.size_min);
    get_int("size_max", gp.size_max);
    get_int("iter_min", gp.iter_min);
    get_int("iter_max", gp.iter_max);
    get_int("nodes_min_lo", gp.nodes_min_lo);
    get_int("nodes_min_hi", gp.nodes_min_hi);
    get_int("nodes_max_hi", gp.nodes_max_hi);
    get_int("perf_soft_mult_min", gp.perf_soft_mult_min);
    get_int("perf_soft_mult_max", gp.perf_soft_mult_max);
    get_int("perf_hard_mult_min", gp.perf_hard_mult_min);
    get_int("perf_hard_mult_max", gp.perf_hard_mult_max);
    get_int("energy_soft_mult_min", gp.energy_soft_mult_min);
    get_int("energy_soft_mult_max", gp.energy_soft_mult_max);
    get_int("energy_hard_mult_min", gp.energy_hard_mult_min);
    get_int("energy_hard_mult_max", gp.energy_hard_mult_max);
    get_int("seed", gp.seed);
    if (!j.empty())
        throw validation_error("unknown generation parameter: " + j.begin().key());
    try {
        gp.validate();
    } catch (const validation_error& e) {
        throw validation_error(std::string("generation parameters: ") + e.what());
    }
    return gp;
}

} // namespace vdcsim
