#include <doctest.h>

#include <cmath>

#include "ptmsa/analysis.hpp"
#include "ptmsa/errors.hpp"

using namespace ptmsa;

namespace {

TransientResult synthetic(double t_reset, double t_out, bool out_rises, double supply_power) {
    TransientResult r;
    r.columns = {"v(rst)", "v(y)", "v(vdd)", "i(VDD)"};
    r.data.resize(4);
    for (int i = 0; i <= 500; ++i) {
        const double t = i * 1e-12;
        r.time.push_back(t);
        const double rst = t < t_reset - 1e-12 ? 0.8 : (t > t_reset + 1e-12 ? 0.0 : 0.4 - 0.4 * (t - t_reset) / 1e-12);
        double y = t < t_out - 1e-12 ? 0.0 : (t > t_out + 1e-12 ? 0.8 : 0.4 + 0.4 * (t - t_out) / 1e-12);
        if (!out_rises) y = 0.8 - y;
        r.data[0].push_back(rst);
        r.data[1].push_back(y);
        r.data[2].push_back(0.8);
        r.data[3].push_back(-supply_power / 0.8);
    }
    return r;
}

StimulusSchedule synthetic_schedule() {
    StimulusSchedule s = default_schedule(TopologyKind::HpCsa);
    s.reset_node = "rst";
    s.supplies = {{"VDD", "vdd"}};
    return s;
}

}  // namespace

TEST_CASE("crossings are interpolated") {
    const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> v{0.0, 0.2, 0.6, 1.0};
    CHECK(*find_crossing(t, v, 0.4, true) == doctest::Approx(1.5));
    CHECK_FALSE(find_crossing(t, v, 0.4, false).has_value());
    CHECK_FALSE(find_crossing(t, v, 0.4, true, 2.5).has_value());
}

TEST_CASE("metrics from synthetic traces") {
    const auto m = extract_metrics(synthetic(100e-12, 110e-12, false, 50e-6), synthetic_schedule(), TopologyKind::HpCsa);
    REQUIRE(m.delay.has_value());
    CHECK(*m.delay == doctest::Approx(10e-12).epsilon(1e-9));
    CHECK(m.sensing_power == doctest::Approx(50e-6).epsilon(1e-12));
    CHECK(*m.pdp == *m.delay * m.sensing_power);
    CHECK(*m.pdp == doctest::Approx(500e-6 * 1e-12).epsilon(1e-9));
    CHECK(m.outcome == LogicOutcome::Low);
}

TEST_CASE("an output that never moves has no delay") {
    const auto m = extract_metrics(synthetic(100e-12, 1.0, false, 1e-6), synthetic_schedule(), TopologyKind::HpCsa);
    CHECK_FALSE(m.delay.has_value());
    CHECK_FALSE(m.pdp.has_value());
    CHECK(m.outcome == LogicOutcome::High);
    CHECK_FALSE(m.note.empty());
}

TEST_CASE("bulk PTM hysteresis follows the two-resistor algebra") {
    const auto t = build_topology(TopologyKind::BulkPtmFixture);
    const int n = 81;
    const auto r = dc_sweep_hysteretic(t.circuit, "VSRC", 0.0, 0.8, n);
    const double step = 0.8 / (n - 1);
    const PTMParams ptm;
    const double rs = 6.6e3;
    REQUIRE(r.transitions.size() == 2);
    CHECK(r.transitions[0].up);
    CHECK(r.transitions[0].to == PtmState::Metallic);
    const double v_imt = ptm.v_c_imt * (ptm.r_ins() + rs) / ptm.r_ins();
    CHECK(r.transitions[0].value >= v_imt);
    CHECK(r.transitions[0].value < v_imt + step);
    CHECK_FALSE(r.transitions[1].up);
    const double v_mit = ptm.i_c_mit * (ptm.r_met() + rs);
    CHECK(r.transitions[1].value <= v_mit);
    CHECK(r.transitions[1].value > v_mit - step);

    // Branch resistances from the two traces at a bias inside the loop.
    const int i = 20;   // 0.2 V
    const double r_ins = (r.axis[i] - r.up_current[i] * rs) / r.up_current[i];
    const double r_met = (r.axis[i] - r.down_current[i] * rs) / r.down_current[i];
    CHECK(r_ins / r_met == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("hyper-FET gate sweep is hysteretic in both polarities") {
    for (Polarity pol : {Polarity::N, Polarity::P}) {
        INFO("polarity ", to_string(pol));
        TopologyParams p;
        p.fixture_polarity = pol;
        const auto t = build_topology(TopologyKind::HyperFetFixture, p);
        const bool n = pol == Polarity::N;
        const auto r = dc_sweep_hysteretic(t.circuit, "VG", 0.0, 0.8, 161, "PTM1");
        // The p-type device starts fully on at V_G = 0, so its first point switches at once.
        std::vector<SweepTransition> loop;
        for (const auto& tr : r.transitions) {
            if (!(tr.up && tr.value == 0.0)) loop.push_back(tr);
        }
        REQUIRE(loop.size() == 2);
        double imt = 0.0, mit = 0.0;
        for (const auto& tr : loop) (tr.to == PtmState::Metallic ? imt : mit) = n ? tr.value : 0.8 - tr.value;
        CHECK(mit < imt - 0.01);

        const double on = std::abs(n ? r.up_current.back() : r.up_current.front());
        const double off = std::abs(n ? r.up_current.front() : r.up_current.back());
        CHECK(on / off >= 1e4);
        // Traces coincide outside the loop and differ inside it.
        CHECK(r.up_current.front() == doctest::Approx(r.down_current.front()));
        CHECK(r.up_current.back() == doctest::Approx(r.down_current.back()));
        const double mid_gs = 0.5 * (imt + mit);
        const auto k = static_cast<std::size_t>(std::lround((n ? mid_gs : 0.8 - mid_gs) / 0.8 * 160));
        const auto& metallic = n ? r.down_current : r.up_current;
        const auto& insulating = n ? r.up_current : r.down_current;
        CHECK(std::abs(metallic[k]) > 10.0 * std::abs(insulating[k]));
    }
}

TEST_CASE("transition voltages agree with the fixture sweep") {
    const FinFETParams fet;
    const PTMParams ptm;
    const auto tv = find_transition_voltages(fet, ptm, 0.8, 1e-6);
    REQUIRE(tv.v_gs_imt.reachable());
    REQUIRE(tv.v_gs_mit.reachable());
    REQUIRE(tv.v_ds_imt.reachable());
    CHECK(*tv.v_gs_mit.value < *tv.v_gs_imt.value);
    CHECK(tv.v_gs_imt.bracket <= 1e-6);

    const auto r = dc_sweep_hysteretic(build_topology(TopologyKind::HyperFetFixture).circuit, "VG", 0.0, 0.8, 801);
    for (const auto& tr : r.transitions) {
        const double expected = tr.to == PtmState::Metallic ? *tv.v_gs_imt.value : *tv.v_gs_mit.value;
        if (tr.up) CHECK(tr.value == doctest::Approx(expected).epsilon(0.002 / expected));
        else CHECK(tr.value == doctest::Approx(expected).epsilon(0.002 / expected));
    }

    FinFETParams p = fet;
    p.polarity = Polarity::P;
    const auto tp = find_transition_voltages(p, ptm, 0.8, 1e-6);
    CHECK(*tp.v_gs_imt.value == doctest::Approx(*tv.v_gs_imt.value).epsilon(1e-9));
}

TEST_CASE("unreachable transitions are reported, not thrown") {
    PTMParams ptm;
    ptm.v_c_imt = 0.79;
    const auto tv = find_transition_voltages(FinFETParams{}, ptm, 0.8, 1e-6);
    CHECK_FALSE(tv.v_gs_imt.reachable());
}

TEST_CASE("the hyper-FET threshold sits inside the mirror window") {
    const TopologyParams p;
    FinFETParams host = p.pfet;
    host.n_fin = 6;
    const auto tv = find_transition_voltages(host, p.ptm, p.vdd, 1e-6);
    const double hrs = diode_vgs(host, p.i_hrs, p.vdd);
    const double lrs = diode_vgs(host, p.i_lrs, p.vdd);
    CHECK(hrs < *tv.v_gs_imt.value);
    CHECK(*tv.v_gs_imt.value < lrs);
}

TEST_CASE("mirror window trends with V_th") {
    FinFETParams n;
    n.n_fin = 2;
    FinFETParams p{Polarity::P};
    p.n_fin = 2;
    double n_prev = -1.0, p_prev = 2.0;
    double size_min = 1.0, size_max = 0.0;
    for (int i = 0; i <= 8; ++i) {
        n.delta_v_th = p.delta_v_th = -0.1 + 0.025 * i;
        const auto wn = mirror_window(n, 40e-6, 5e-6, 0.8, 1e-9);
        const auto wp = mirror_window(p, 40e-6, 5e-6, 0.8, 1e-9);
        CHECK(wn.center() > n_prev);
        CHECK(wp.center() < p_prev);
        n_prev = wn.center();
        p_prev = wp.center();
        size_min = std::min(size_min, wn.size());
        size_max = std::max(size_max, wn.size());
    }
    CHECK((size_max - size_min) / size_min < 0.1);

    FinFETParams six = n;
    six.delta_v_th = 0.0;
    six.n_fin = 6;
    n.delta_v_th = 0.0;
    CHECK(mirror_window(six, 40e-6, 5e-6, 0.8, 1e-9).center() < mirror_window(n, 40e-6, 5e-6, 0.8, 1e-9).center());
    CHECK_THROWS_AS(mirror_window(n, 5e-6, 40e-6, 0.8, 1e-9), InvalidParams);
}

TEST_CASE("sensing truth table") {
    for (TopologyKind k : kSenseAmplifiers) {
        for (CellState c : {CellState::Lrs, CellState::Hrs}) {
            const auto m = run_sense(k, c, TopologyParams{}).metrics;
            INFO(to_string(k), " ", to_string(c), " ", m.note);
            CHECK(m.outcome == expected_outcome(k, c));
            if (is_proposed(k)) {
                bool imt = false;
                for (const auto& e : m.events) imt = imt || e.to == PtmState::Metallic;
                CHECK(imt == (c == CellState::Lrs));
            }
            if (c == CellState::Lrs) {
                REQUIRE(m.delay.has_value());
                CHECK(*m.delay > 0.0);
                CHECK(*m.pdp == *m.delay * m.sensing_power);
            }
        }
    }
}

TEST_CASE("T1 and T2 variants still sense") {
    for (TopologyKind k : {TopologyKind::HpCsa, TopologyKind::HnCsa}) {
        TopologyParams p;
        p.t1 = true;
        p.t2 = true;
        for (CellState c : {CellState::Lrs, CellState::Hrs}) {
            INFO(to_string(k), " ", to_string(c));
            CHECK(run_sense(k, c, p).metrics.outcome == expected_outcome(k, c));
        }
    }
}

TEST_CASE("trapezoidal integration gives the same outcomes") {
    TopologyParams p;
    p.options.integration_method = IntegrationMethod::Trapezoidal;
    for (CellState c : {CellState::Lrs, CellState::Hrs}) {
        CHECK(run_sense(TopologyKind::HpCsa, c, p).metrics.outcome == expected_outcome(TopologyKind::HpCsa, c));
    }
}

TEST_CASE("run_sense rejects fixtures") {
    CHECK_THROWS_AS(run_sense(TopologyKind::BulkPtmFixture, CellState::Lrs, TopologyParams{}), InvalidParams);
}
