#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ptmsa/errors.hpp"
#include "ptmsa/montecarlo.hpp"

using namespace ptmsa;

namespace {

McConfig config(int n) {
    McConfig c;
    c.n_samples = n;
    c.master_seed = 7;
    return c;
}

const std::vector<VariedDevice> kDevices{{"P1", 1, 0.288}, {"P2", 4, 0.288}};

}  // namespace

TEST_CASE("family names round-trip") {
    for (McFamily f : {McFamily::VcImt, McFamily::LPtm, McFamily::Vth}) CHECK(parse_mc_family(to_string(f)) == f);
    CHECK_THROWS_AS(parse_mc_family("vdd"), InvalidParams);
}

TEST_CASE("V_th sigma scales with fins") {
    const auto d = sample_parameters(config(1), PTMParams{}, kDevices, 0);
    REQUIRE(d.v_th.size() == 2);
    CHECK(d.v_th[0].sigma == doctest::Approx(0.035 * 0.288).epsilon(1e-12));
    CHECK(d.v_th[0].sigma == doctest::Approx(0.01008).epsilon(1e-9));
    CHECK(d.v_th[1].sigma == doctest::Approx(d.v_th[0].sigma / 2.0).epsilon(1e-12));
    CHECK(d.v_th[0].label == "P1");
    CHECK(d.v_th[0].nominal == 0.288);
}

TEST_CASE("draws are a pure function of seed and index") {
    const auto c = config(100);
    const auto a = sample_parameters(c, PTMParams{}, kDevices, 42);
    const auto b = sample_parameters(c, PTMParams{}, kDevices, 42);
    CHECK(a.v_c_imt == b.v_c_imt);
    CHECK(a.l_ptm_factor == b.l_ptm_factor);
    CHECK(a.v_th[1].v_th == b.v_th[1].v_th);
    CHECK(a.v_c_imt != sample_parameters(c, PTMParams{}, kDevices, 43).v_c_imt);
    auto other = c;
    other.master_seed = 8;
    CHECK(a.v_c_imt != sample_parameters(other, PTMParams{}, kDevices, 42).v_c_imt);
    CHECK(sample_seed(7, 42) == sample_seed(7, 42));
    CHECK(sample_seed(7, 42) != sample_seed(42, 7));
    CHECK_THROWS_AS(sample_parameters(c, PTMParams{}, kDevices, 100), InvalidParams);
}

TEST_CASE("draws are truncated at 3 sigma and centered") {
    const int n = 5000;
    const auto c = config(n);
    const PTMParams ptm;
    double sum_vc = 0.0, sum_l = 0.0, sum_vth = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto d = sample_parameters(c, ptm, kDevices, i);
        const double s_vc = c.sigma_v_c_imt * ptm.v_c_imt;
        CHECK(std::abs(d.v_c_imt - ptm.v_c_imt) <= 3.0 * s_vc * (1.0 + 1e-12));
        CHECK(std::abs(d.l_ptm_factor - 1.0) <= 3.0 * c.sigma_l_ptm * (1.0 + 1e-12));
        for (const auto& v : d.v_th) CHECK(std::abs(v.v_th - v.nominal) <= 3.0 * v.sigma * (1.0 + 1e-12));
        sum_vc += d.v_c_imt;
        sum_l += d.l_ptm_factor;
        sum_vth += d.v_th[0].v_th;
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum_vc / n - ptm.v_c_imt) < 4.0 * c.sigma_v_c_imt * ptm.v_c_imt / root_n);
    CHECK(std::abs(sum_l / n - 1.0) < 4.0 * c.sigma_l_ptm / root_n);
    CHECK(std::abs(sum_vth / n - 0.288) < 4.0 * 0.01008 / root_n);
}

TEST_CASE("one-at-a-time mode holds the other families at nominal") {
    auto c = config(10);
    c.mode = McMode::OneAtATime;
    c.family = McFamily::LPtm;
    const PTMParams ptm;
    const auto d = sample_parameters(c, ptm, kDevices, 3);
    CHECK(d.v_c_imt == ptm.v_c_imt);
    for (const auto& v : d.v_th) CHECK(v.v_th == v.nominal);
    // Same stream position as the all-at-once draw.
    CHECK(d.l_ptm_factor == sample_parameters(config(10), ptm, kDevices, 3).l_ptm_factor);
}

TEST_CASE("apply_draw shifts V_th and scales the PTM") {
    ParameterDraw d;
    d.v_c_imt = 0.34;
    d.l_ptm_factor = 1.02;
    d.v_th = {{"P1", 0.2, 0.21, 0.007}};
    TopologyParams p;
    p.vth_shift["P1"] = 0.01;
    const auto q = apply_draw(p, d);
    CHECK(q.ptm.v_c_imt == 0.34);
    CHECK(q.ptm.r_ins() == doctest::Approx(1.02 * p.ptm.r_ins()).epsilon(1e-12));
    CHECK(q.vth_shift.at("P1") == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("varied devices") {
    const auto hp = varied_devices(TopologyKind::HpCsa, TopologyParams{});
    REQUIRE(hp.size() == 2);
    CHECK(hp[0].label == "P1");
    CHECK(hp[1].label == "P2");
    const auto hn = varied_devices(TopologyKind::HnVsa, TopologyParams{});
    REQUIRE(hn.size() == 2);
    CHECK(hn[0].label == "N1");
    CHECK(hn[0].n_fin == 6);
    const auto conv = varied_devices(TopologyKind::ConvCsa, TopologyParams{});
    CHECK(conv.size() > 2);
    CHECK(std::is_sorted(conv.begin(), conv.end(), [](const auto& a, const auto& b) { return a.label < b.label; }));
    CHECK_THROWS_AS(varied_devices(TopologyKind::BulkPtmFixture, TopologyParams{}), InvalidParams);
}

TEST_CASE("zero sigma reproduces the nominal run") {
    auto c = config(1);
    c.sigma_v_c_imt = c.sigma_l_ptm = c.sigma_vth = 0.0;
    const auto s = run_mc(TopologyKind::HpCsa, c);
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].ok());
    const auto nominal = run_sense(TopologyKind::HpCsa, CellState::Lrs, TopologyParams{}).metrics;
    CHECK(*s[0].lrs->delay == *nominal.delay);
    CHECK(s[0].lrs->sensing_power == nominal.sensing_power);
    CHECK(s[0].hrs_outcome == expected_outcome(TopologyKind::HpCsa, CellState::Hrs));
}

TEST_CASE("results do not depend on the worker count") {
    auto c = config(24);
    const auto one = run_mc(TopologyKind::HnCsa, c);
    c.workers = 4;
    const auto four = run_mc(TopologyKind::HnCsa, c);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].error == four[i].error);
        CHECK(one[i].draw.v_c_imt == four[i].draw.v_c_imt);
        REQUIRE(one[i].lrs.has_value() == four[i].lrs.has_value());
        if (one[i].lrs) CHECK(one[i].lrs->pdp == four[i].lrs->pdp);
    }
}

TEST_CASE("summary statistics") {
    const auto m = summarize_metric({10.0, 20.0});
    CHECK(m.mean == 15.0);
    CHECK(m.worst == 20.0);
    CHECK(m.std == doctest::Approx(std::sqrt(50.0)));
    CHECK(summarize_metric({3.0}).std == 0.0);

    const auto h = freedman_diaconis({1, 2, 2, 3, 3, 3, 4, 4, 5, 9});
    CHECK(h.edges.size() == h.counts.size() + 1);
    CHECK(std::accumulate(h.counts.begin(), h.counts.end(), 0) == 10);
    CHECK(h.edges.front() == 1.0);
    CHECK(h.edges.back() == 9.0);
    const auto flat = freedman_diaconis({2.0, 2.0, 2.0});
    CHECK(flat.counts == std::vector<int>{3});
    CHECK_THROWS_AS(freedman_diaconis({}), InvalidParams);
}

TEST_CASE("summaries skip failed samples") {
    std::vector<McSample> samples(3);
    for (int i = 0; i < 3; ++i) {
        SenseMetrics m;
        m.delay = 10e-12 * (i + 1);
        m.sensing_power = 1e-6;
        m.pdp = *m.delay * m.sensing_power;
        samples[i].lrs = m;
    }
    samples[2].error = "hrs: outcome low, expected high";
    const auto s = summarize(samples);
    CHECK(s.n_samples == 3);
    CHECK(s.n_failed == 1);
    CHECK(s.delay.mean == doctest::Approx(15e-12));
    CHECK(std::accumulate(s.delay.histogram.counts.begin(), s.delay.histogram.counts.end(), 0) == 2);

    for (auto& x : samples) x.error = "lrs: no crossing";
    CHECK_THROWS_AS(summarize(samples), AllSamplesFailed);
}

TEST_CASE("invalid configurations") {
    auto c = config(0);
    CHECK_THROWS_AS(c.validate(), InvalidParams);
    c = config(1);
    c.sigma_l_ptm = 0.4;
    CHECK_THROWS_AS(c.validate(), InvalidParams);
    c = config(1);
    c.workers = 0;
    CHECK_THROWS_AS(run_mc(TopologyKind::HpCsa, c), InvalidParams);
}
