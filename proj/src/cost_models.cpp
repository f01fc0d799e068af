#include "vdcsim/cost_models.hpp"

#include "vdcsim/cluster.hpp"
#include "vdcsim/csv.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <set>

namespace vdcsim {

void JobTypeProfile::validate() const {
    static const std::set<std::string> known = {"CG", "EP", "FT", "IS", "MG", "LU", "BT", "SP"};
    if (!known.count(name))
        throw validation_error("profile: unknown benchmark name '" + name + "'");
    if (t_serial_s < 0.0 || t_parallel_s < 0.0 || comm_coeff_s < 0.0)
        throw validation_error("profile " + name + ": time coefficients must be >= 0");
    if (cap_sensitivity < 0.0)
        throw validation_error("profile " + name + ": cap_sensitivity must be >= 0");
    if (!(size_exponent > 0.0))
        throw validation_error("profile " + name + ": size_exponent must be > 0");
    if (!(mem_per_unit_gb > 0.0))
        throw validation_error("profile " + name + ": mem_per_unit_gb must be > 0");
}

double predict_exec_time(const JobTypeProfile& profile, double size, std::int64_t iterations,
                         const ResourceConfig& cfg) {
    cfg.validate();
    if (!(size > 0.0))
        throw validation_error("predict_exec_time: size must be > 0");
    if (iterations < 1)
        throw validation_error("predict_exec_time: iterations must be >= 1");
    double work = static_cast<double>(iterations) * std::pow(size, profile.size_exponent);
    double span = profile.t_serial_s +
                  profile.t_parallel_s / (static_cast<double>(cfg.nodes) * cfg.cores_per_node) +
                  profile.comm_coeff_s * std::log2(static_cast<double>(cfg.nodes));
    double cap_factor = 1.0 + profile.cap_sensitivity * (1.0 - cfg.power_cap_fraction);
    return work * span * cap_factor;
}

double predict_power(const JobTypeProfile& profile, const ResourceConfig& cfg,
                     const NodeSpec& node_spec) {
    (void)profile; // the power model depends on the allocation, not the code
    cfg.validate();
    node_spec.validate();
    if (cfg.cores_per_node > node_spec.cores_per_node())
        throw capacity_error("predict_power: " + fmt_int(cfg.cores_per_node) +
                             " cores requested on a " + fmt_int(node_spec.cores_per_node()) +
                             "-core node");
    // Shares the cluster's definition so planning and admission agree bitwise.
    return config_power(cfg, node_spec);
}

CostEstimate estimate(const JobTypeProfile& profile, double size, std::int64_t iterations,
                      const ResourceConfig& cfg, const NodeSpec& node_spec) {
    CostEstimate e;
    e.exec_time_s = predict_exec_time(profile, size, iterations, cfg);
    e.avg_power_w = predict_power(profile, cfg, node_spec);
    e.energy_j = e.avg_power_w * e.exec_time_s;
    return e;
}

bool memory_feasible(const JobTypeProfile& profile, double size, const ResourceConfig& cfg) {
    return size * profile.mem_per_unit_gb <= cfg.nodes * cfg.mem_per_node_gb;
}

double mem_share_per_node(const JobTypeProfile& profile, double size, int nodes) {
    if (nodes < 1) throw validation_error("mem_share_per_node: nodes must be >= 1");
    double need = size * profile.mem_per_unit_gb;
    double share = need / nodes;
    while (share * nodes < need)
        share = std::nextafter(share, std::numeric_limits<double>::infinity());
    return share;
}

const JobTypeProfile& Catalog::find(const std::string& name) const {
    for (const auto& p : profiles)
        if (p.name == name) return p;
    throw validation_error("catalog: no profile named '" + name + "'");
}

void validate_catalog(const Catalog& catalog) {
    static const std::set<std::string> expected = {"CG", "EP", "FT", "IS", "MG", "LU", "BT", "SP"};
    static const std::set<std::string> hybrid_expected = {"LU", "BT", "SP"};
    std::set<std::string> seen, hybrids;
    for (const auto& p : catalog.profiles) {
        p.validate();
        if (!seen.insert(p.name).second)
            throw validation_error("catalog: duplicate profile '" + p.name + "'");
        if (p.supports_hybrid) hybrids.insert(p.name);
    }
    if (seen != expected)
        throw validation_error("catalog: must contain each benchmark exactly once");
    if (hybrids != hybrid_expected)
        throw validation_error("catalog: hybrid-capable set must be exactly LU, BT, SP");
}

Catalog builtin_catalog() {
    Catalog c;
    c.schema_version = 1;
    c.profiles = {
        // name, serial, parallel, comm, cap_sens, mem/unit, size_exp, hybrid
        {"CG", 8.0, 1200.0, 3.0, 1.0, 1.0, 1.0, false},
        {"EP", 2.0, 2400.0, 0.0, 1.2, 0.25, 1.0, false},
        {"FT", 10.0, 1800.0, 5.0, 1.1, 2.0, 1.0, false},
        {"IS", 4.0, 600.0, 2.0, 0.8, 1.5, 1.0, false},
        {"MG", 6.0, 900.0, 3.0, 0.9, 1.75, 1.0, false},
        {"LU", 15.0, 2000.0, 2.5, 1.3, 1.25, 1.0, true},
        {"BT", 12.0, 1800.0, 2.0, 1.2, 1.5, 1.0, true},
        {"SP", 10.0, 1600.0, 2.2, 1.1, 1.25, 1.0, true},
    };
    validate_catalog(c);
    return c;
}

Catalog parse_catalog(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("catalog: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("schema_version"))
        throw validation_error("catalog: missing schema_version");
    Catalog c;
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != 1)
        throw validation_error("catalog: unsupported schema_version " +
                               fmt_int(c.schema_version));
    if (!j.contains("profiles") || !j.at("profiles").is_array())
        throw validation_error("catalog: missing profiles array");
    try {
        for (const auto& e : j.at("profiles")) {
            JobTypeProfile p;
            p.name = e.at("name").get<std::string>();
            p.t_serial_s = e.at("t_serial_s").get<double>();
            p.t_parallel_s = e.at("t_parallel_s").get<double>();
            p.comm_coeff_s = e.at("comm_coeff_s").get<double>();
            p.cap_sensitivity = e.at("cap_sensitivity").get<double>();
            p.mem_per_unit_gb = e.at("mem_per_unit_gb").get<double>();
            p.size_exponent = e.at("size_exponent").get<double>();
            p.supports_hybrid = e.at("supports_hybrid").get<bool>();
            c.profiles.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("catalog: bad profile entry: ") + e.what());
    }
    validate_catalog(c);
    return c;
}

Catalog load_catalog(const std::string& path) {
    return parse_catalog(read_text_file(path));
}

std::string catalog_to_json(const Catalog& catalog) {
    nlohmann::json j;
    j["schema_version"] = catalog.schema_version;
    j["profiles"] = nlohmann::json::array();
    for (const auto& p : catalog.profiles) {
        j["profiles"].push_back({{"name", p.name},
                                 {"t_serial_s", p.t_serial_s},
                                 {"t_parallel_s", p.t_parallel_s},
                                 {"comm_coeff_s", p.comm_coeff_s},
                                 {"cap_sensitivity", p.cap_sensitivity},
                                 {"mem_per_unit_gb", p.mem_per_unit_gb},
                                 {"size_exponent", p.size_exponent},
                                 {"supports_hybrid", p.supports_hybrid}});
    }
    return j.dump(2) + "\n";
}

} // namespace vdcsim
