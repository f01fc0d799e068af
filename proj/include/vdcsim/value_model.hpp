#ifndef VDCSIM_VALUE_MODEL_HPP
#define VDCSIM_VALUE_MODEL_HPP

#include "vdcsim/errors.hpp"
#include "vdcsim/trace.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace vdcsim {

// Piecewise-linear soft/hard threshold curve: full value up to th_soft,
// linear decay to v_min at th_hard, zero strictly beyond th_hard.
struct ValueCurve {
    double v_max = 1.0;
    double v_min = 0.0;
    double th_soft = 1.0;
    double th_hard = 1.0;

    void validate() const {
        if (!(v_min >= 0.0) || !(v_min <= v_max))
            throw validation_error("value curve: need 0 <= v_min <= v_max");
        if (!(th_soft > 0.0) || !(th_soft <= th_hard))
            throw validation_error("value curve: need 0 < th_soft <= th_hard");
    }
};

// Objective mix for one task. w_p + w_e must equal 1; gamma is the task's
// relative importance.
struct ValueWeights {
    double w_p = 0.5;
    double w_e = 0.5;
    double gamma = 1.0;

    void validate() const {
        if (w_p < 0.0 || w_e < 0.0)
            throw validation_error("value weights: w_p and w_e must be >= 0");
        double sum = w_p + w_e;
        if (sum < 1.0 - 1e-9 || sum > 1.0 + 1e-9)
            throw validation_error("value weights: w_p + w_e must equal 1");
        if (gamma < 0.0)
            throw validation_error("value weights: gamma must be >= 0");
    }
};

// What actually happened to a completed task, in objective units.
struct TaskOutcome {
    double completion_objective_s = 0.0; // turnaround
    double energy_objective_j = 0.0;
};

double eval_curve(const ValueCurve& c, double x);

// gamma * (w_p*v_p + w_e*v_e), with exact zero if either side is zero.
double task_value_from(const ValueWeights& w, double v_p, double v_e);
double task_value(const ValueWeights& w, const ValueCurve& perf, const ValueCurve& energy,
                  const TaskOutcome& outcome);

// Earned value bucketed into fixed periods by completion time.
struct VosLedger {
    explicit VosLedger(double period_length_s_) : period_length_s(period_length_s_) {
        if (!(period_length_s > 0.0))
            throw validation_error("ledger: period length must be > 0");
    }

    double period_length_s;
    std::map<std::int64_t, double> per_period;
    std::map<std::string, double> per_task;

    double total() const {
        double t = 0.0;
        for (const auto& [period, v] : per_period) t += v;
        return t;
    }
};

// Records one completion. A job may complete exactly once; a second
// accumulation for the same id throws and leaves the ledger untouched.
void accumulate_vos(VosLedger& ledger, const std::string& job_id, double value,
                    double completion_time_s);

// Earned total divided by the trace's maximum achievable total
// sum_j gamma_j * (w_p * v_max_j + w_e * v_max_j). Empty trace is an error.
double normalized_vos(const VosLedger& ledger, const WorkloadTrace& trace, double w_p, double w_e);

ValueCurve make_perf_curve(const TraceRecord& r);
ValueCurve make_energy_curve(const TraceRecord& r);

} // namespace vdcsim

#endif
