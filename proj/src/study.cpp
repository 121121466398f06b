#include <array>
#include <cmath>
#include <utility>

#include "ptmsa/analysis.hpp"
#include "ptmsa/errors.hpp"
#include "ptmsa/netlist.hpp"

namespace ptmsa {

namespace {

constexpr std::array<std::pair<StudyKind, std::string_view>, 5> kStudyNames{{
    {StudyKind::WindowVsDvth, "window-vs-dvth"},
    {StudyKind::ImtVsDvth, "imt-vs-dvth"},
    {StudyKind::MitVsDvth, "mit-vs-dvth"},
    {StudyKind::VdsImtVsDvth, "vds-imt-vs-dvth"},
    {StudyKind::ImtVsRhoIns, "imt-vs-rhoins"},
}};

std::string cell(const TransitionValue& t) { return t.value ? format_number(*t.value) : std::string(); }

void check_axis(const std::vector<double>& axis) {
    if (axis.empty()) throw InvalidParams("study axis is empty");
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (!std::isfinite(axis[i])) throw InvalidParams("study axis has a non-finite value");
        if (i > 0 && !(axis[i] > axis[i - 1])) throw InvalidParams("study axis must be strictly increasing");
    }
}

}  // namespace

std::string_view to_string(StudyKind kind) {
    for (const auto& [k, name] : kStudyNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

StudyKind parse_study_kind(std::string_view name) {
    for (const auto& [k, n] : kStudyNames) {
        if (n == name) return k;
    }
    throw InvalidParams("unknown study '" + std::string(name) + "'");
}

StudyTable sweep_study(const StudySpec& spec) {
    check_axis(spec.axis);
    if (spec.n_fins.empty()) throw InvalidParams("study needs at least one fin count");
    for (int n : spec.n_fins) {
        if (n < 1) throw InvalidParams("fin counts must be >= 1");
    }
    if (!(spec.tol > 0.0)) throw InvalidParams("tolerance must be > 0");
    if (spec.kind == StudyKind::ImtVsRhoIns && !(spec.axis.front() > 0.0)) {
        throw InvalidParams("rho_ins factors must be > 0");
    }

    StudyTable t;
    const bool window = spec.kind == StudyKind::WindowVsDvth;
    const std::string axis_name = spec.kind == StudyKind::ImtVsRhoIns ? "rho_ins_factor" : "delta_vth";
    if (window) {
        t.columns = {axis_name, "n_fin", "polarity", "v_lrs", "v_hrs", "center", "size", "error"};
    } else {
        const char* value = spec.kind == StudyKind::MitVsDvth    ? "v_gs_mit"
                            : spec.kind == StudyKind::VdsImtVsDvth ? "v_ds_imt"
                                                                   : "v_gs_imt";
        t.columns = {axis_name, "n_fin", "polarity", value, "bracket", "error"};
    }

    for (double x : spec.axis) {
        for (int n_fin : spec.n_fins) {
            FinFETParams fet = spec.fet;
            fet.polarity = spec.polarity;
            fet.n_fin = n_fin;
            PTMParams ptm = spec.ptm;
            if (spec.kind == StudyKind::ImtVsRhoIns) {
                // The critical IMT current stays fixed, so V_C_IMT follows R_INS.
                ptm.rho_ins *= x;
                ptm.v_c_imt *= x;
            } else {
                fet.delta_v_th = x;
            }

            std::vector<std::string> row{format_number(x), std::to_string(n_fin), std::string(to_string(spec.polarity))};
            try {
                if (window) {
                    const MirrorWindow w = mirror_window(fet, spec.i_lrs, spec.i_hrs, spec.vdd, spec.tol);
                    for (double v : {w.v_gs_lrs, w.v_gs_hrs, w.center(), w.size()}) row.push_back(format_number(v));
                    row.emplace_back();
                } else {
                    const TransitionVoltages tv = find_transition_voltages(fet, ptm, spec.vdd, spec.tol);
                    const TransitionValue& v = spec.kind == StudyKind::MitVsDvth      ? tv.v_gs_mit
                                               : spec.kind == StudyKind::VdsImtVsDvth ? tv.v_ds_imt
                                                                                      : tv.v_gs_imt;
                    row.push_back(cell(v));
                    row.push_back(v.value ? format_number(v.bracket) : std::string());
                    row.emplace_back(v.value ? "" : "NotReachable");
                }
            } catch (const Error& e) {
                row.resize(3);
                row.resize(t.columns.size() - 1);
                row.emplace_back(e.what());
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

}  // namespace ptmsa
