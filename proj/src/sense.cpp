#include <algorithm>
#include <cmath>

#include "ptmsa/analysis.hpp"
#include "ptmsa/errors.hpp"

namespace ptmsa {

std::optional<double> find_crossing(const std::vector<double>& time, const std::vector<double>& values, double level,
                                    bool rising, double t_from) {
    for (std::size_t i = 1; i < time.size() && i < values.size(); ++i) {
        if (time[i] < t_from) continue;
        const double a = values[i - 1] - level;
        const double b = values[i] - level;
        const bool crosses = rising ? (a < 0.0 && b >= 0.0) : (a > 0.0 && b <= 0.0);
        if (!crosses) continue;
        const double t = time[i - 1] + (time[i] - time[i - 1]) * a / (a - b);
        if (t >= t_from) return t;
    }
    return std::nullopt;
}

SenseMetrics extract_metrics(const TransientResult& result, const StimulusSchedule& schedule, TopologyKind kind) {
    if (result.time.empty()) throw InvalidParams("empty transient result");
    SenseMetrics m;
    m.events = result.events;
    const double vdd = schedule.vdd;
    const auto& out = result.column("v(" + schedule.output_node + ")");
    m.v_out_final = out.back();
    if (m.v_out_final > 0.9 * vdd) m.outcome = LogicOutcome::High;
    else if (m.v_out_final < 0.1 * vdd) m.outcome = LogicOutcome::Low;

    // Cycle-average power delivered by the supply rails (trapezoidal rule).
    double energy = 0.0;
    for (const auto& supply : schedule.supplies) {
        const auto& v = result.column("v(" + supply.node + ")");
        const auto& j = result.column("i(" + supply.source + ")");
        for (std::size_t i = 1; i < result.time.size(); ++i) {
            const double p0 = -v[i - 1] * j[i - 1];
            const double p1 = -v[i] * j[i];
            energy += 0.5 * (p0 + p1) * (result.time[i] - result.time[i - 1]);
        }
    }
    const double span = result.time.back() - result.time.front();
    m.sensing_power = span > 0.0 ? energy / span : 0.0;

    const auto& reset = result.column("v(" + schedule.reset_node + ")");
    const auto t_reset = find_crossing(result.time, reset, 0.5 * vdd, !schedule.reset_falls);
    if (!t_reset) {
        m.note = "reset signal never crosses 50%";
        return m;
    }
    const bool lrs_rises = expected_outcome(kind, CellState::Lrs) == LogicOutcome::High;
    const auto t_out = find_crossing(result.time, out, 0.5 * vdd, lrs_rises, *t_reset);
    if (!t_out) {
        m.note = "output never crosses 50%";
        return m;
    }
    m.delay = *t_out - *t_reset;
    m.pdp = *m.delay * m.sensing_power;
    return m;
}

SenseRun run_sense(TopologyKind kind, CellState cell, const TopologyParams& params,
                   const std::optional<StimulusSchedule>& schedule) {
    if (!is_sense_amplifier(kind)) throw InvalidParams(std::string(to_string(kind)) + " is not a sense amplifier");
    Topology t = build_topology(kind, params);
    if (schedule) {
        schedule->validate();
        t.schedule = *schedule;
    }
    t.schedule.apply(t.circuit, cell);
    const Simulator sim(t.circuit);
    SenseRun run;
    run.waveform = sim.run_transient(t.schedule.t_cycle);
    run.metrics = extract_metrics(run.waveform, t.schedule, kind);
    return run;
}

}  // namespace ptmsa
