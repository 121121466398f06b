#include "ptmsa/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ptmsa/errors.hpp"

namespace ptmsa {

SweepResult dc_sweep_hysteretic(const Circuit& circuit, std::string_view source, double lo, double hi, int n_points,
                                std::string_view probe) {
    if (n_points < 3) throw InvalidParams("a sweep needs at least 3 points");
    if (!(hi > lo)) throw InvalidParams("sweep requires hi > lo");
    Simulator sim(circuit);

    SweepResult r;
    r.source = std::string(source);
    if (!probe.empty()) {
        if (!circuit.find(probe)) throw InvalidParams("no probe element '" + std::string(probe) + "'");
        r.probe = std::string(probe);
    } else {
        r.probe = sim.ptm_names().empty() ? r.source : sim.ptm_names().front();
    }
    for (int i = 0; i < n_points; ++i) r.axis.push_back(lo + (hi - lo) * i / (n_points - 1));
    r.up_current.resize(n_points);
    r.down_current.resize(n_points);

    SystemState state = sim.initial_state();
    auto solve_at = [&](int i, bool up) {
        const double value = r.axis[i];
        sim.set_source_value(source, value);
        std::vector<PtmEvent> events;
        try {
            state = sim.solve_dc(state, &events);
        } catch (const NoConsistentState& e) {
            throw NoConsistentState(std::string(e.what()) + " (sweep value " + std::to_string(value) + ")");
        }
        for (const auto& ev : events) r.transitions.push_back({value, up, ev.element, ev.from, ev.to});
        (up ? r.up_current : r.down_current)[i] = sim.element_current(state, r.probe);
    };
    for (int i = 0; i < n_points; ++i) solve_at(i, true);
    for (int i = n_points - 1; i >= 0; --i) solve_at(i, false);
    return r;
}

namespace {

// Smallest x in [lo, hi] with pred(x) true, for pred monotone false -> true.
TransitionValue bisect(double lo, double hi, double tol, const auto& pred) {
    if (!pred(hi)) return {};
    if (pred(lo)) return {lo, 0.0};
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid)) hi = mid; else lo = mid;
    }
    return {0.5 * (lo + hi), hi - lo};
}

}  // namespace

TransitionVoltages find_transition_voltages(const FinFETParams& fet, const PTMParams& ptm, double vdd, double tol) {
    if (!(tol > 0.0)) throw InvalidParams("tolerance must be > 0");
    if (!(vdd > 0.0)) throw InvalidParams("V_DD must be > 0");
    fet.validate();
    ptm.validate();
    // Both polarities are evaluated in n-type orientation; magnitudes are equal.
    FinFETParams n = fet;
    n.polarity = Polarity::N;

    TransitionVoltages t;
    t.v_gs_imt = bisect(0.0, vdd, tol, [&](double vg) {
        return hyperfet_branch_solve(n, ptm, PtmState::Insulating, vg, vdd, 0.0).v_internal >= ptm.v_c_imt;
    });
    // The metallic branch keeps its state while the current exceeds I_C-MIT.
    t.v_gs_mit = bisect(0.0, vdd, tol, [&](double vg) {
        return hyperfet_branch_solve(n, ptm, PtmState::Metallic, vg, vdd, 0.0).i_branch > ptm.i_c_mit;
    });
    t.v_ds_imt = bisect(0.0, vdd, tol, [&](double vd) {
        return hyperfet_branch_solve(n, ptm, PtmState::Insulating, vdd, vd, 0.0).v_internal >= ptm.v_c_imt;
    });
    return t;
}

MirrorWindow mirror_window(const FinFETParams& mirror, double i_lrs, double i_hrs, double vdd, double tol) {
    if (!(i_hrs > 0.0 && i_lrs >= i_hrs)) throw InvalidParams("require I_LRS >= I_HRS > 0");
    mirror.validate();
    const double lrs = diode_vgs(mirror, i_lrs, vdd, tol);
    const double hrs = diode_vgs(mirror, i_hrs, vdd, tol);
    if (mirror.polarity == Polarity::N) return {lrs, hrs};
    return {vdd - lrs, vdd - hrs};
}

}  // namespace ptmsa
