#include "vdcsim/value_model.hpp"

#include <cmath>

namespace vdcsim {

double eval_curve(const ValueCurve& c, double x) {
    if (x <= c.th_soft) return c.v_max;
    if (x <= c.th_hard)
        return c.v_max + (x - c.th_soft) / (c.th_hard - c.th_soft) * (c.v_min - c.v_max);
    return 0.0;
}

double task_value_from(const ValueWeights& w, double v_p, double v_e) {
    if (v_p == 0.0 || v_e == 0.0) return 0.0;
    return w.gamma * (w.w_p * v_p + w.w_e * v_e);
}

double task_value(const ValueWeights& w, const ValueCurve& perf, const ValueCurve& energy,
                  const TaskOutcome& outcome) {
    return task_value_from(w, eval_curve(perf, outcome.completion_objective_s),
                           eval_curve(energy, outcome.energy_objective_j));
}

void accumulate_vos(VosLedger& ledger, const std::string& job_id, double value,
                    double completion_time_s) {
    if (value < 0.0)
        throw validation_error("ledger: value must be >= 0 (job " + job_id + ")");
    if (completion_time_s < 0.0)
        throw validation_error("ledger: completion time must be >= 0 (job " + job_id + ")");
    if (ledger.per_task.count(job_id))
        throw validation_error("ledger: duplicate completion for job " + job_id);
    auto period = static_cast<std::int64_t>(std::floor(completion_time_s / ledger.period_length_s));
    ledger.per_task.emplace(job_id, value);
    ledger.per_period[period] += value;
}

double normalized_vos(const VosLedger& ledger, const WorkloadTrace& trace, double w_p,
                      double w_e) {
    if (trace.empty())
        throw validation_error("normalized vos: empty trace has no attainable value");
    double max_total = 0.0;
    for (const TraceRecord& r : trace.jobs)
        max_total += r.gamma * (w_p * r.v_max + w_e * r.v_max);
    if (!(max_total > 0.0))
        throw validation_error("normalized vos: trace maximum value is not positive");
    return ledger.total() / max_total;
}

ValueCurve make_perf_curve(const TraceRecord& r) {
    ValueCurve c{r.v_max, r.v_max * r.v_min_frac, r.perf_soft_s, r.perf_hard_s};
    c.validate();
    return c;
}

ValueCurve make_energy_curve(const TraceRecord& r) {
    ValueCurve c{r.v_max, r.v_max * r.v_min_frac, r.energy_soft_j, r.energy_hard_j};
    c.validate();
    return c;
}

} // namespace vdcsim
