#ifndef VDCSIM_RESOURCES_HPP
#define VDCSIM_RESOURCES_HPP

#include "vdcsim/errors.hpp"

namespace vdcsim {

// Hardware description of one node class; the cluster is homogeneous.
struct NodeSpec {
    int cpus_per_node = 2;
    int cores_per_cpu = 12;
    double mem_gb = 125.0;
    double tdp_per_cpu_w = 115.0;
    double idle_power_w = 50.0;

    int cores_per_node() const { return cpus_per_node * cores_per_cpu; }
    double tdp_per_node_w() const { return cpus_per_node * tdp_per_cpu_w; }

    void validate() const {
        if (cpus_per_node < 1 || cores_per_cpu < 1)
            throw validation_error("node spec: cpu/core counts must be >= 1");
        if (mem_gb <= 0.0)
            throw validation_error("node spec: mem_gb must be > 0");
        if (tdp_per_cpu_w <= 0.0)
            throw validation_error("node spec: tdp_per_cpu_w must be > 0");
        if (idle_power_w < 0.0)
            throw validation_error("node spec: idle_power_w must be >= 0");
    }
};

// One candidate allocation: whole nodes, a per-node memory share, and a
// power cap applied to every allocated CPU.
struct ResourceConfig {
    int nodes = 1;
    int cores_per_node = 24;
    double mem_per_node_gb = 0.0;
    double power_cap_fraction = 1.0;

    void validate() const {
        if (nodes < 1)
            throw validation_error("config: nodes must be >= 1");
        if (cores_per_node < 1)
            throw validation_error("config: cores_per_node must be >= 1");
        if (mem_per_node_gb < 0.0)
            throw validation_error("config: mem_per_node_gb must be >= 0");
        if (power_cap_fraction <= 0.0 || power_cap_fraction > 1.0)
            throw validation_error("config: power_cap_fraction must be in (0, 1]");
    }
};

} // namespace vdcsim

#endif
