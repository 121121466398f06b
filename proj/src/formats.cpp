#include "ptmsa/formats.hpp"

#include <fstream>
#include <system_error>

#include "ptmsa/errors.hpp"
#include "ptmsa/netlist.hpp"

namespace ptmsa {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json transition_json(const TransitionValue& t) {
    Json j;
    j["value"] = optional_number(t.value);
    j["bracket"] = t.bracket;
    j["reachable"] = t.reachable();
    return j;
}

Json events_json(const std::vector<PtmEvent>& events) {
    Json list = Json::array();
    for (const auto& e : events) {
        list.push_back({{"time_s", e.time},
                        {"element", e.element},
                        {"from", to_string(e.from)},
                        {"to", to_string(e.to)},
                        {"v_ptm", e.v_ptm},
                        {"i_ptm", e.i_ptm}});
    }
    return list;
}

Json metric_json(const MetricSummary& m) {
    return {{"mean", m.mean},
            {"std", m.std},
            {"worst", m.worst},
            {"histogram", {{"edges", m.histogram.edges}, {"counts", m.histogram.counts}}}};
}

Json header(std::string_view kind) { return {{"schema_version", kSchemaVersion}, {"kind", kind}}; }

}  // namespace

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_table(const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cells[i]);
        }
        out += "\r\n";
    };
    line(columns);
    for (const auto& r : rows) {
        if (r.size() != columns.size()) throw InvalidParams("CSV row width does not match the header");
        line(r);
    }
    return out;
}

std::string waveform_csv(const TransientResult& result) {
    std::vector<std::string> columns{"time_s"};
    columns.insert(columns.end(), result.columns.begin(), result.columns.end());
    std::vector<std::vector<std::string>> rows;
    rows.reserve(result.time.size());
    for (std::size_t i = 0; i < result.time.size(); ++i) {
        std::vector<std::string> r{format_number(result.time[i])};
        for (const auto& col : result.data) r.push_back(format_number(col[i]));
        rows.push_back(std::move(r));
    }
    return csv_table(columns, rows);
}

std::string sweep_csv(const SweepResult& sweep) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < sweep.axis.size(); ++i) {
        rows.push_back({format_number(sweep.axis[i]), format_number(sweep.up_current[i]),
                        format_number(sweep.down_current[i])});
    }
    return csv_table({sweep.source, "i_up(" + sweep.probe + ")", "i_down(" + sweep.probe + ")"}, rows);
}

std::string study_csv(const StudyTable& table) { return csv_table(table.columns, table.rows); }

std::string mc_samples_csv(const std::vector<McSample>& samples) {
    std::vector<std::string> columns{"index", "v_c_imt", "l_ptm_factor"};
    if (!samples.empty()) {
        for (const auto& d : samples.front().draw.v_th) columns.push_back("vth(" + d.label + ")");
    }
    for (const char* c : {"lrs_outcome", "hrs_outcome", "delay_s", "power_w", "pdp_j", "error"}) columns.emplace_back(c);

    std::vector<std::vector<std::string>> rows;
    for (const auto& s : samples) {
        std::vector<std::string> r{std::to_string(s.draw.index), format_number(s.draw.v_c_imt),
                                   format_number(s.draw.l_ptm_factor)};
        for (const auto& d : s.draw.v_th) r.push_back(format_number(d.v_th));
        r.emplace_back(s.lrs ? to_string(s.lrs->outcome) : "");
        r.emplace_back(s.lrs ? to_string(s.hrs_outcome) : "");
        const bool timed = s.lrs && s.lrs->delay;
        r.push_back(timed ? format_number(*s.lrs->delay) : "");
        r.push_back(s.lrs ? format_number(s.lrs->sensing_power) : "");
        r.push_back(timed ? format_number(*s.lrs->pdp) : "");
        r.push_back(s.error);
        rows.push_back(std::move(r));
    }
    return csv_table(columns, rows);
}

Json dc_json(const Simulator& sim, const SystemState& state, const std::vector<PtmEvent>& events) {
    Json j = header("dc");
    Json nodes = Json::object();
    for (std::size_t i = 0; i < sim.node_names().size(); ++i) nodes[sim.node_names()[i]] = state.node_voltages[i];
    Json currents = Json::object();
    for (const auto& name : sim.source_names()) currents[name] = sim.element_current(state, name);
    Json ptms = Json::object();
    for (std::size_t k = 0; k < sim.ptm_names().size(); ++k) {
        ptms[sim.ptm_names()[k]] = {{"state", to_string(state.ptm_states[k])},
                                    {"v", sim.ptm_voltage(state, k)},
                                    {"i", sim.ptm_current(state, k)}};
    }
    j["nodes"] = std::move(nodes);
    j["source_currents"] = std::move(currents);
    j["ptms"] = std::move(ptms);
    j["events"] = events_json(events);
    return j;
}

Json sense_json(TopologyKind kind, CellState cell, const SenseMetrics& m) {
    Json j = header("sense");
    j["topology"] = to_string(kind);
    j["cell"] = to_string(cell);
    j["logic_outcome"] = to_string(m.outcome);
    j["expected_outcome"] = to_string(expected_outcome(kind, cell));
    j["v_out_final"] = m.v_out_final;
    j["delay_s"] = optional_number(m.delay);
    j["sensing_power_w"] = m.sensing_power;
    j["pdp_j"] = optional_number(m.pdp);
    j["note"] = m.note;
    j["events"] = events_json(m.events);
    return j;
}

Json transitions_json(const TransitionVoltages& t, const FinFETParams& fet, double vdd) {
    Json j = header("transitions");
    j["polarity"] = to_string(fet.polarity);
    j["n_fin"] = fet.n_fin;
    j["delta_v_th"] = fet.delta_v_th;
    j["vdd"] = vdd;
    j["v_gs_imt"] = transition_json(t.v_gs_imt);
    j["v_gs_mit"] = transition_json(t.v_gs_mit);
    j["v_ds_imt"] = transition_json(t.v_ds_imt);
    return j;
}

Json window_json(const MirrorWindow& w, const FinFETParams& mirror, double i_lrs, double i_hrs) {
    Json j = header("window");
    j["polarity"] = to_string(mirror.polarity);
    j["n_fin"] = mirror.n_fin;
    j["delta_v_th"] = mirror.delta_v_th;
    j["i_lrs"] = i_lrs;
    j["i_hrs"] = i_hrs;
    j["v_lrs"] = w.v_gs_lrs;
    j["v_hrs"] = w.v_gs_hrs;
    j["center"] = w.center();
    j["size"] = w.size();
    return j;
}

Json mc_summary_json(TopologyKind kind, const McConfig& config, const McSummary& s) {
    Json j = header("mc");
    j["topology"] = to_string(kind);
    j["master_seed"] = config.master_seed;
    j["mode"] = config.mode == McMode::AllAtOnce ? "all-at-once" : "one-at-a-time";
    if (config.mode == McMode::OneAtATime) j["family"] = to_string(config.family);
    j["n_samples"] = s.n_samples;
    j["n_failed"] = s.n_failed;
    j["delay_s"] = metric_json(s.delay);
    j["power_w"] = metric_json(s.power);
    j["pdp_j"] = metric_json(s.pdp);
    return j;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidParams("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw InvalidParams("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InvalidParams("cannot replace '" + path.string() + "'");
    }
}

}  // namespace ptmsa
