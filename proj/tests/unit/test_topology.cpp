#include <doctest.h>

#include <algorithm>
#include <cctype>

#include "ptmsa/errors.hpp"
#include "ptmsa/topology.hpp"

using namespace ptmsa;

namespace {

std::vector<std::string> swap_letters(std::vector<std::string> labels) {
    for (auto& l : labels) {
        if (l.size() < 2 || !std::isdigit(static_cast<unsigned char>(l[1]))) continue;
        if (l.front() == 'P') l.front() = 'N';
        else if (l.front() == 'N') l.front() = 'P';
    }
    std::sort(labels.begin(), labels.end());
    return labels;
}

bool has(const std::vector<std::string>& v, const std::string& x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

TEST_CASE("topology names round-trip") {
    for (TopologyKind k : kAllTopologies) CHECK(parse_topology_kind(to_string(k)) == k);
    CHECK(parse_topology_kind("hp-csa") == TopologyKind::HpCsa);
    CHECK_THROWS_AS(parse_topology_kind("hp-xyz"), InvalidParams);
}

TEST_CASE("expected outcomes") {
    for (TopologyKind k : kSenseAmplifiers) {
        const bool rises = is_hyper_nmos(k);
        CHECK(expected_outcome(k, CellState::Lrs) == (rises ? LogicOutcome::High : LogicOutcome::Low));
        CHECK(expected_outcome(k, CellState::Hrs) == (rises ? LogicOutcome::Low : LogicOutcome::High));
    }
}

TEST_CASE("kind predicates") {
    CHECK(is_sense_amplifier(TopologyKind::ConvVsa));
    CHECK_FALSE(is_sense_amplifier(TopologyKind::BulkPtmFixture));
    CHECK(is_current_sense(TopologyKind::HnCsa));
    CHECK_FALSE(is_current_sense(TopologyKind::HpVsa));
    CHECK(is_proposed(TopologyKind::HpVsa));
    CHECK_FALSE(is_proposed(TopologyKind::ConvCsa));
}

TEST_CASE("Hyper-NMOS circuits are the letter-swapped complement") {
    const auto hp = device_set(build_topology(TopologyKind::HpCsa).circuit);
    const auto hn = device_set(build_topology(TopologyKind::HnCsa).circuit);
    CHECK(swap_letters(hp) == hn);
    CHECK(has(hp, "P1"));
    CHECK(has(hp, "P2"));
    CHECK(has(hp, "PTM1"));
    CHECK(has(hp, "C_X"));
}

TEST_CASE("VSA variants replace the mirror with a gate source") {
    const auto t = build_topology(TopologyKind::HpVsa);
    CHECK(t.circuit.find("VCELL") != nullptr);
    CHECK(t.circuit.find("MP1") == nullptr);
    CHECK(t.schedule.cell_kind == CellStimulus::Voltage);
}

TEST_CASE("T1 and T2 options add devices") {
    TopologyParams p;
    p.t1 = true;
    p.t2 = true;
    const auto labels = device_set(build_topology(TopologyKind::HpCsa, p).circuit);
    CHECK(has(labels, "T1"));
    CHECK(has(labels, "T2"));
    CHECK_FALSE(has(device_set(build_topology(TopologyKind::HpCsa).circuit), "T1"));
}

TEST_CASE("fixtures") {
    const auto bulk = build_topology(TopologyKind::BulkPtmFixture);
    CHECK(bulk.circuit.get<Resistor>("RS").ohms == 6.6e3);
    CHECK(bulk.circuit.find("PTM1") != nullptr);
    TopologyParams p;
    p.fixture_polarity = Polarity::P;
    const auto hf = build_topology(TopologyKind::HyperFetFixture, p);
    CHECK(hf.circuit.get<Fet>("MH1").params.polarity == Polarity::P);
    CHECK(hf.circuit.get<Fet>("MH1").params.n_fin == 1);
}

TEST_CASE("dotted overrides") {
    TopologyParams p;
    p.set("ptm.v_c_imt", "0.35");
    p.set("fins.P2", "4");
    p.set("vth_shift.P1", "-10m");
    p.set("nfet.k", "120u");
    p.set("fet.lambda_clm", "0.05");
    p.set("options.method", "trap");
    p.set("vdd", "0.9");
    p.set("t1", "true");
    CHECK(p.ptm.v_c_imt == 0.35);
    CHECK(p.fins_for("P2", 6) == 4);
    CHECK(p.fins_for("P3", 2) == 2);
    CHECK(p.vth_shift.at("P1") == doctest::Approx(-0.01));
    CHECK(p.nfet.k == doctest::Approx(120e-6));
    CHECK(p.nfet.lambda_clm == 0.05);
    CHECK(p.pfet.lambda_clm == 0.05);
    CHECK(p.options.integration_method == IntegrationMethod::Trapezoidal);
    CHECK(p.vdd == 0.9);
    CHECK(p.t1);

    const auto t = build_topology(TopologyKind::HpCsa, p);
    CHECK(t.circuit.get<Fet>("MP2").params.n_fin == 4);
    CHECK(t.circuit.get<Fet>("MP1").params.delta_v_th == doctest::Approx(-0.01));
    CHECK(t.circuit.get<Ptm>("PTM1").params.v_c_imt == 0.35);

    CHECK_THROWS_AS(p.set("ptm.nope", "1"), InvalidParams);
    CHECK_THROWS_AS(p.set("nope", "1"), InvalidParams);
    CHECK_THROWS_AS(p.set("vdd", "abc"), InvalidParams);
    CHECK_THROWS_AS(p.set("fins.P2", "2.5"), InvalidParams);
    CHECK_THROWS_AS(p.set("options.method", "gear"), InvalidParams);
}

TEST_CASE("parameter validation") {
    TopologyParams p;
    p.i_hrs = 200e-6;   // above I_LRS
    CHECK_THROWS_AS(build_topology(TopologyKind::HpCsa, p), InvalidParams);
    p = {};
    p.v_lrs = 0.3;
    CHECK_THROWS_AS(build_topology(TopologyKind::HpCsa, p), InvalidParams);
    CHECK_NOTHROW(build_topology(TopologyKind::HpVsa, p));
}

TEST_CASE("VSA gate levels come from the mirror") {
    const TopologyParams p;
    const auto [hp_lrs, hp_hrs] = vsa_gate_levels(TopologyKind::HpVsa, p);
    const auto [hn_lrs, hn_hrs] = vsa_gate_levels(TopologyKind::HnVsa, p);
    // More cell current pulls the PMOS mirror gate further from V_DD.
    CHECK(hp_lrs < hp_hrs);
    CHECK(hn_lrs > hn_hrs);
    CHECK(hp_lrs == doctest::Approx(p.vdd - hn_lrs).epsilon(1e-9));

    TopologyParams shifted = p;
    shifted.vth_shift["P1"] = 0.02;
    CHECK(vsa_gate_levels(TopologyKind::HpVsa, shifted).first < hp_lrs);
}

TEST_CASE("schedules are ordered and drive the cell") {
    for (TopologyKind k : kSenseAmplifiers) {
        const auto t = build_topology(k);
        CHECK_NOTHROW(t.schedule.validate());
        CHECK(t.schedule.signals.contains(t.schedule.reset_signal));
        CHECK_FALSE(t.schedule.supplies.empty());

        Circuit lrs = t.circuit;
        Circuit hrs = t.circuit;
        t.schedule.apply(lrs, CellState::Lrs);
        t.schedule.apply(hrs, CellState::Hrs);
        CHECK_FALSE(structurally_equal(lrs, hrs));
    }
    const auto hp = default_schedule(TopologyKind::HpCsa);
    CHECK(hp.reset_falls);
    CHECK_FALSE(default_schedule(TopologyKind::HnCsa).reset_falls);
    CHECK(hp.signals.at(hp.reset_signal).value(0.0) == 0.8);
    CHECK(hp.signals.at(hp.reset_signal).value(hp.t_latch) == 0.0);
}

TEST_CASE("a schedule out of order is rejected") {
    auto s = default_schedule(TopologyKind::HpCsa);
    s.t_latch = s.t_reset_end - 1e-12;
    CHECK_THROWS_AS(s.validate(), InvalidParams);
}
