#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ptmsa/errors.hpp"
#include "ptmsa/formats.hpp"
#include "ptmsa/netlist.hpp"

using namespace ptmsa;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("CSV fields are quoted only when needed") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(csv_field("") == "");
}

TEST_CASE("CSV tables use CRLF and reject ragged rows") {
    CHECK(csv_table({"a", "b"}, {{"1", "x,y"}}) == "a,b\r\n1,\"x,y\"\r\n");
    CHECK_THROWS_AS(csv_table({"a", "b"}, {{"1"}}), InvalidParams);
}

TEST_CASE("waveform CSV keeps full precision") {
    TransientResult r;
    r.columns = {"v(a)"};
    r.time = {0.0, 1.0 / 3.0 * 1e-12};
    r.data = {{0.1, 2.0 / 3.0}};
    const std::string csv = waveform_csv(r);
    CHECK(csv.rfind("time_s,v(a)\r\n", 0) == 0);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::getline(in, line);
    line.pop_back();   // CR
    const auto comma = line.find(',');
    CHECK(*parse_number(line.substr(0, comma)) == r.time[1]);
    CHECK(*parse_number(line.substr(comma + 1)) == r.data[0][1]);
}

TEST_CASE("sweep CSV columns") {
    SweepResult s;
    s.source = "VG";
    s.probe = "PTM1";
    s.axis = {0.0, 0.5};
    s.up_current = {1e-9, 2e-6};
    s.down_current = {1e-9, 3e-5};
    CHECK(sweep_csv(s).rfind("VG,i_up(PTM1),i_down(PTM1)\r\n0,1e-09,1e-09\r\n", 0) == 0);
}

TEST_CASE("sense JSON carries the schema header and nulls for a missing delay") {
    SenseMetrics m;
    m.outcome = LogicOutcome::High;
    m.sensing_power = 2e-6;
    m.note = "no crossing";
    const Json j = sense_json(TopologyKind::HpCsa, CellState::Lrs, m);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["kind"] == "sense");
    CHECK(j["topology"] == "hp-csa");
    CHECK(j["expected_outcome"] == "low");
    CHECK(j["delay_s"].is_null());
    CHECK(j["pdp_j"].is_null());
    CHECK(j.begin().key() == "schema_version");
}

TEST_CASE("transition JSON marks unreachable values") {
    TransitionVoltages t;
    t.v_gs_imt.value = 0.41;
    t.v_gs_imt.bracket = 1e-7;
    const Json j = transitions_json(t, FinFETParams{}, 0.8);
    CHECK(j["v_gs_imt"]["value"] == 0.41);
    CHECK(j["v_gs_imt"]["reachable"] == true);
    CHECK(j["v_gs_mit"]["value"].is_null());
    CHECK(j["v_gs_mit"]["reachable"] == false);
}

TEST_CASE("MC summary JSON") {
    McSummary s;
    s.n_samples = 2;
    s.delay = summarize_metric({1.0, 3.0});
    s.power = s.pdp = s.delay;
    McConfig c;
    Json j = mc_summary_json(TopologyKind::ConvVsa, c, s);
    CHECK(j["mode"] == "all-at-once");
    CHECK_FALSE(j.contains("family"));
    CHECK(j["delay_s"]["mean"] == 2.0);
    CHECK(j["delay_s"]["histogram"]["counts"].size() + 1 == j["delay_s"]["histogram"]["edges"].size());
    c.mode = McMode::OneAtATime;
    c.family = McFamily::VcImt;
    j = mc_summary_json(TopologyKind::ConvVsa, c, s);
    CHECK(j["family"] == "v_c_imt");
}

TEST_CASE("MC sample CSV") {
    McSample s;
    s.draw.index = 4;
    s.draw.v_c_imt = 0.33;
    s.draw.v_th = {{"P1", 0.2, 0.21, 0.007}};
    s.error = "lrs: bad, worse";
    const std::string csv = mc_samples_csv({s});
    CHECK(csv.rfind("index,v_c_imt,l_ptm_factor,vth(P1),lrs_outcome,hrs_outcome,delay_s,power_w,pdp_j,error\r\n", 0) ==
          0);
    CHECK(csv.find("4,0.33,1,0.21,,,,,,\"lrs: bad, worse\"\r\n") != std::string::npos);
}

TEST_CASE("atomic writes replace the target and leave no temporary") {
    const fs::path dir = fs::temp_directory_path() / "ptmsa_formats_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path f = dir / "out.csv";
    write_file_atomic(f, "first");
    write_file_atomic(f, "second");
    CHECK(slurp(f) == "second");
    CHECK_FALSE(fs::exists(dir / "out.csv.tmp"));
    CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "x.csv", "x"), InvalidParams);
    fs::remove_all(dir);
}
