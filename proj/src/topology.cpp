#include "ptmsa/topology.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ptmsa/errors.hpp"
#include "ptmsa/netlist.hpp"

namespace ptmsa {

namespace {

constexpr std::pair<TopologyKind, std::string_view> kNames[] = {
    {TopologyKind::ConvVsa, "conv-vsa"}, {TopologyKind::ConvCsa, "conv-csa"},
    {TopologyKind::HpCsa, "hp-csa"},     {TopologyKind::HpVsa, "hp-vsa"},
    {TopologyKind::HnCsa, "hn-csa"},     {TopologyKind::HnVsa, "hn-vsa"},
    {TopologyKind::BulkPtmFixture, "bulk-ptm-fixture"}, {TopologyKind::HyperFetFixture, "hyperfet-fixture"},
};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

double to_number(std::string_view key, std::string_view value) {
    const auto v = parse_number(value);
    if (!v) throw InvalidParams("value '" + std::string(value) + "' for '" + std::string(key) + "' is not a number");
    return *v;
}

bool to_flag(std::string_view key, std::string_view value) {
    const std::string v = lower(value);
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw InvalidParams("value '" + std::string(value) + "' for '" + std::string(key) + "' is not a boolean");
}

void set_fet_field(FinFETParams& p, std::string_view field, std::string_view key, std::string_view value) {
    if (field == "v_th") p.v_th = to_number(key, value);
    else if (field == "delta_v_th") p.delta_v_th = to_number(key, value);
    else if (field == "k") p.k = to_number(key, value);
    else if (field == "n_ss") p.n_ss = to_number(key, value);
    else if (field == "phi_t") p.phi_t = to_number(key, value);
    else if (field == "alpha_sat") p.alpha_sat = to_number(key, value);
    else if (field == "lambda_clm") p.lambda_clm = to_number(key, value);
    else throw InvalidParams("unknown transistor parameter '" + std::string(key) + "'");
}

void set_ptm_field(PTMParams& p, std::string_view field, std::string_view key, std::string_view value) {
    if (field == "rho_ins") p.rho_ins = to_number(key, value);
    else if (field == "rho_met") p.rho_met = to_number(key, value);
    else if (field == "length") p.length = to_number(key, value);
    else if (field == "area") p.area = to_number(key, value);
    else if (field == "v_c_imt") p.v_c_imt = to_number(key, value);
    else if (field == "i_c_mit") p.i_c_mit = to_number(key, value);
    else throw InvalidParams("unknown PTM parameter '" + std::string(key) + "'");
}

void set_option_field(SolverOptions& o, std::string_view field, std::string_view key, std::string_view value) {
    if (field == "method") {
        const std::string m = lower(value);
        if (m == "be") o.integration_method = IntegrationMethod::BackwardEuler;
        else if (m == "trap") o.integration_method = IntegrationMethod::Trapezoidal;
        else throw InvalidParams("integration method must be be or trap");
    } else if (field == "adaptive") {
        o.adaptive = to_flag(key, value);
    } else if (field == "abstol_current") {
        o.abstol_current = to_number(key, value);
    } else if (field == "reltol") {
        o.reltol = to_number(key, value);
    } else if (field == "vntol") {
        o.vntol = to_number(key, value);
    } else if (field == "max_newton_iters") {
        o.max_newton_iters = static_cast<int>(to_number(key, value));
    } else if (field == "max_state_resolution_iters") {
        o.max_state_resolution_iters = static_cast<int>(to_number(key, value));
    } else if (field == "dt_initial") {
        o.dt_initial = to_number(key, value);
    } else if (field == "dt_min") {
        o.dt_min = to_number(key, value);
    } else if (field == "dt_max") {
        o.dt_max = to_number(key, value);
    } else if (field == "lte_tol") {
        o.lte_tol = to_number(key, value);
    } else if (field == "gmin") {
        o.gmin = to_number(key, value);
    } else {
        throw InvalidParams("unknown solver option '" + std::string(key) + "'");
    }
}

SourceWaveform step(double before, double after, double t, double edge) {
    return SourceWaveform::pwl({{0.0, before}, {t, before}, {t + edge, after}});
}

// Builds one topology; labels are the schematic names, elements get SPICE cards.
class Builder {
public:
    Builder(const TopologyParams& params, Circuit& c) : p_(params), c_(c) {}

    void fet(const std::string& label, Polarity pol, const std::string& d, const std::string& g, const std::string& s,
             int default_fins) {
        FinFETParams f = pol == Polarity::N ? p_.nfet : p_.pfet;
        f.polarity = pol;
        f.n_fin = p_.fins_for(label, default_fins);
        if (auto it = p_.vth_shift.find(label); it != p_.vth_shift.end()) f.delta_v_th += it->second;
        c_.add(Fet{"M" + label, d, g, s, f});
    }
    void ptm(const std::string& name, const std::string& a, const std::string& b) { c_.add(Ptm{name, a, b, p_.ptm}); }
    void cap(const std::string& name, const std::string& a, double farads) { c_.add(Capacitor{name, a, "0", farads}); }
    void vdc(const std::string& name, const std::string& node, double v) {
        c_.add(VoltageSource{name, node, "0", SourceWaveform::dc(v)});
    }

private:
    const TopologyParams& p_;
    Circuit& c_;
};

// Hyper-PMOS sense amplifiers: X is discharged by N1 during reset and charged
// through the Hyper-PMOS (P2 + PTM1) when the PTM is metallic.
void build_hyper_pmos(Builder& b, const TopologyParams& p, bool current_sense, Circuit& c) {
    b.vdc("VDD", "vdd", p.vdd);
    if (current_sense) {
        c.add(CurrentSource{"ICELL", "g", "0", SourceWaveform::dc(0.0)});
        b.fet("P1", Polarity::P, "g", "g", "vdd", 6);
    } else {
        b.vdc("VCELL", "g", p.vdd);
    }
    b.ptm("PTM1", "vdd", "s");
    b.fet("P2", Polarity::P, p.t2 ? "t" : "x", "g", "s", 6);
    if (p.t1) b.fet("T1", Polarity::P, p.t2 ? "t" : "x", "g", "s", 2);
    if (p.t2) b.fet("T2", Polarity::P, "x", "0", "t", 2);
    b.fet("P3", Polarity::P, "x", "y", "vdd", 2);
    b.fet("P4", Polarity::P, "y", "x", "vdd", 2);
    b.fet("N3", Polarity::N, "y", "x", "0", 2);
    b.fet("N1", Polarity::N, "x", "d_en", "0", 2);
    b.fet("N2", Polarity::N, "x", "l_en", "0", 2);
    b.cap("C_X", "x", p.c_x);
    b.cap("C_Y", "y", p.c_y);
    b.vdc("VD_EN", "d_en", p.vdd);
    b.vdc("VL_EN", "l_en", 0.0);
}

// Complement of build_hyper_pmos: devices swap polarity and letters (P <-> N),
// rails swap, and C_EN (active low) precharges X.
void build_hyper_nmos(Builder& b, const TopologyParams& p, bool current_sense, Circuit& c) {
    b.vdc("VDD", "vdd", p.vdd);
    if (current_sense) {
        c.add(CurrentSource{"ICELL", "vdd", "g", SourceWaveform::dc(0.0)});
        b.fet("N1", Polarity::N, "g", "g", "0", 6);
    } else {
        b.vdc("VCELL", "g", 0.0);
    }
    b.ptm("PTM1", "0", "s");
    b.fet("N2", Polarity::N, p.t2 ? "t" : "x", "g", "s", 6);
    if (p.t1) b.fet("T1", Polarity::N, p.t2 ? "t" : "x", "g", "s", 2);
    if (p.t2) b.fet("T2", Polarity::N, "x", "vdd", "t", 2);
    b.fet("N3", Polarity::N, "x", "y", "0", 2);
    b.fet("N4", Polarity::N, "y", "x", "0", 2);
    b.fet("P3", Polarity::P, "y", "x", "vdd", 2);
    b.fet("P1", Polarity::P, "x", "c_en", "vdd", 2);
    b.fet("P2", Polarity::P, "x", "l_en", "vdd", 2);
    b.cap("C_X", "x", p.c_x);
    b.cap("C_Y", "y", p.c_y);
    b.vdc("VC_EN", "c_en", 0.0);
    b.vdc("VL_EN", "l_en", p.vdd);
}

// Bitline precharged to V_PRE, discharged through the access device and the
// cell resistor, compared against V_REF by a tail-biased differential pair.
void build_conv_vsa(Builder& b, const TopologyParams& p, Circuit& c) {
    b.vdc("VDD", "vdd", p.vdd);
    b.vdc("VPRE", "vpre", p.v_pre);
    b.vdc("VREF", "vref", p.v_pre * p.v_ref_fraction);
    b.vdc("VBIAS", "vb", p.v_bias);
    b.fet("NPRE", Polarity::N, "bl", "pre", "vpre", 6);
    c.add(Capacitor{"C_BL", "bl", "0", p.c_bl});
    b.fet("NACC", Polarity::N, "bl", "wl", "c", 6);
    c.add(Resistor{"RCELL", "c", "0", p.v_pre / p.i_lrs});
    b.fet("N1", Polarity::N, "d1", "vref", "tail", 2);
    b.fet("N2", Polarity::N, "o", "bl", "tail", 2);
    b.fet("N3", Polarity::N, "tail", "vb", "0", 2);
    b.fet("P1", Polarity::P, "d1", "d1", "vdd", 2);
    b.fet("P2", Polarity::P, "o", "d1", "vdd", 2);
    b.fet("N4", Polarity::N, "o", "pre", "0", 2);
    b.fet("P3", Polarity::P, "y", "o", "vdd", 2);
    b.fet("N5", Polarity::N, "y", "o", "0", 2);
    b.cap("C_X", "o", p.c_x);
    b.cap("C_Y", "y", p.c_y);
    b.vdc("VPRE_EN", "pre", p.vdd);
    b.vdc("VWL", "wl", 0.0);
}

// Cell and reference currents are mirrored into NMOS diodes whose voltages
// drive a differential pair; a reset device holds the pair output low.
void build_conv_csa(Builder& b, const TopologyParams& p, Circuit& c) {
    b.vdc("VDD", "vdd", p.vdd);
    b.vdc("VBIAS", "vb", p.v_bias);
    c.add(CurrentSource{"ICELL", "gc", "0", SourceWaveform::dc(0.0)});
    c.add(CurrentSource{"IREF", "gr", "0", SourceWaveform::dc(p.i_ref.value_or(0.5 * (p.i_lrs + p.i_hrs)))});
    b.fet("P1", Polarity::P, "gc", "gc", "vdd", 6);
    b.fet("P2", Polarity::P, "ia", "gc", "vdd", 6);
    b.fet("N1", Polarity::N, "ia", "ia", "0", 6);
    b.fet("P3", Polarity::P, "gr", "gr", "vdd", 6);
    b.fet("P4", Polarity::P, "ib", "gr", "vdd", 6);
    b.fet("N2", Polarity::N, "ib", "ib", "0", 6);
    b.fet("N3", Polarity::N, "d1", "ia", "tail", 2);
    b.fet("N4", Polarity::N, "o", "ib", "tail", 2);
    b.fet("N5", Polarity::N, "tail", "vb", "0", 2);
    b.fet("P5", Polarity::P, "d1", "d1", "vdd", 2);
    b.fet("P6", Polarity::P, "o", "d1", "vdd", 2);
    b.fet("N6", Polarity::N, "o", "rst", "0", 2);
    b.fet("P7", Polarity::P, "y", "o", "vdd", 2);
    b.fet("N7", Polarity::N, "y", "o", "0", 2);
    b.cap("C_X", "o", p.c_x);
    b.cap("C_Y", "y", p.c_y);
    b.vdc("VRST", "rst", p.vdd);
}

}  // namespace

std::string_view to_string(TopologyKind kind) {
    for (const auto& [k, name] : kNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

TopologyKind parse_topology_kind(std::string_view name) {
    const std::string n = lower(name);
    for (const auto& [k, text] : kNames) {
        if (text == n) return k;
    }
    throw InvalidParams("unknown topology '" + std::string(name) + "'");
}

bool is_sense_amplifier(TopologyKind kind) {
    return kind != TopologyKind::BulkPtmFixture && kind != TopologyKind::HyperFetFixture;
}

bool is_current_sense(TopologyKind kind) {
    return kind == TopologyKind::ConvCsa || kind == TopologyKind::HpCsa || kind == TopologyKind::HnCsa;
}

bool is_proposed(TopologyKind kind) {
    return kind == TopologyKind::HpCsa || kind == TopologyKind::HpVsa || is_hyper_nmos(kind);
}

bool is_hyper_nmos(TopologyKind kind) { return kind == TopologyKind::HnCsa || kind == TopologyKind::HnVsa; }

std::string_view to_string(CellState s) { return s == CellState::Lrs ? "lrs" : "hrs"; }

std::string_view to_string(LogicOutcome o) {
    switch (o) {
        case LogicOutcome::High: return "high";
        case LogicOutcome::Low: return "low";
        default: return "indeterminate";
    }
}

LogicOutcome expected_outcome(TopologyKind kind, CellState cell) {
    if (!is_sense_amplifier(kind)) throw InvalidParams("not a sense amplifier topology");
    const bool lrs_high = is_hyper_nmos(kind);
    const bool high = cell == CellState::Lrs ? lrs_high : !lrs_high;
    return high ? LogicOutcome::High : LogicOutcome::Low;
}

int TopologyParams::fins_for(std::string_view label, int fallback) const {
    const auto it = fins.find(std::string(label));
    return it == fins.end() ? fallback : it->second;
}

void TopologyParams::set(std::string_view key, std::string_view value) {
    const std::string k = lower(key);
    const auto dot = k.find('.');
    const std::string head = k.substr(0, dot);
    const std::string field = dot == std::string::npos ? "" : k.substr(dot + 1);

    if (dot != std::string::npos) {
        if (head == "nfet") return set_fet_field(nfet, field, key, value);
        if (head == "pfet") return set_fet_field(pfet, field, key, value);
        if (head == "fet") {
            set_fet_field(nfet, field, key, value);
            return set_fet_field(pfet, field, key, value);
        }
        if (head == "ptm") return set_ptm_field(ptm, field, key, value);
        if (head == "options") return set_option_field(options, field, key, value);
        // Device labels keep their schematic case.
        const std::string label(key.substr(dot + 1));
        if (head == "fins") {
            const double n = to_number(key, value);
            if (n != std::floor(n) || n < 1) throw InvalidParams("fin count for '" + label + "' must be a positive integer");
            fins[label] = static_cast<int>(n);
            return;
        }
        if (head == "vth_shift") {
            vth_shift[label] = to_number(key, value);
            return;
        }
        throw InvalidParams("unknown parameter '" + std::string(key) + "'");
    }

    if (k == "vdd") vdd = to_number(key, value);
    else if (k == "c_x") c_x = to_number(key, value);
    else if (k == "c_y") c_y = to_number(key, value);
    else if (k == "c_bl") c_bl = to_number(key, value);
    else if (k == "t1") t1 = to_flag(key, value);
    else if (k == "t2") t2 = to_flag(key, value);
    else if (k == "i_lrs") i_lrs = to_number(key, value);
    else if (k == "i_hrs") i_hrs = to_number(key, value);
    else if (k == "i_ref") i_ref = to_number(key, value);
    else if (k == "v_lrs") v_lrs = to_number(key, value);
    else if (k == "v_hrs") v_hrs = to_number(key, value);
    else if (k == "v_pre") v_pre = to_number(key, value);
    else if (k == "v_ref_fraction") v_ref_fraction = to_number(key, value);
    else if (k == "v_bias") v_bias = to_number(key, value);
    else if (k == "v_latch") v_latch = to_number(key, value);
    else if (k == "series_resistance") series_resistance = to_number(key, value);
    else if (k == "fixture_polarity") {
        const std::string v = lower(value);
        if (v == "n") fixture_polarity = Polarity::N;
        else if (v == "p") fixture_polarity = Polarity::P;
        else throw InvalidParams("fixture_polarity must be n or p");
    } else {
        throw InvalidParams("unknown parameter '" + std::string(key) + "'");
    }
}

void TopologyParams::validate(TopologyKind kind) const {
    if (!(vdd > 0.0)) throw InvalidParams("V_DD must be > 0");
    nfet.validate();
    pfet.validate();
    ptm.validate();
    options.validate();
    for (const auto& [label, n] : fins) {
        if (n < 1) throw InvalidParams("fin count for '" + label + "' must be >= 1");
    }
    if (!(c_x >= 0.0) || !(c_y >= 0.0) || !(c_bl >= 0.0)) throw InvalidParams("capacitances must be >= 0");
    if (!is_sense_amplifier(kind)) {
        if (kind == TopologyKind::BulkPtmFixture && !(series_resistance > 0.0))
            throw InvalidParams("series_resistance must be > 0");
        return;
    }
    if (!(i_lrs > i_hrs && i_hrs > 0.0)) throw InvalidParams("require I_LRS > I_HRS > 0");
    if (i_ref && !(*i_ref > 0.0)) throw InvalidParams("I_REF must be > 0");
    for (const auto& v : {v_lrs, v_hrs}) {
        if (v && !(*v >= 0.0 && *v <= vdd)) throw InvalidParams("V_LRS/V_HRS must lie within [0, V_DD]");
    }
    if ((v_lrs || v_hrs) && (is_current_sense(kind) || kind == TopologyKind::ConvVsa))
        throw InvalidParams("V_LRS/V_HRS only apply to hp-vsa and hn-vsa; " + std::string(to_string(kind)) +
                            " takes a cell current");
    if (!(v_pre > 0.0 && v_pre <= vdd)) throw InvalidParams("V_PRE must lie within (0, V_DD]");
    if (!(v_ref_fraction > 0.0 && v_ref_fraction < 1.0)) throw InvalidParams("v_ref_fraction must lie in (0, 1)");
    if (!(v_bias > 0.0 && v_bias <= vdd)) throw InvalidParams("V_BIAS must lie within (0, V_DD]");
    if (!(v_latch >= 0.0 && v_latch <= vdd)) throw InvalidParams("v_latch must lie within [0, V_DD]");
}

std::pair<double, double> vsa_gate_levels(TopologyKind kind, const TopologyParams& p) {
    const bool nmos = is_hyper_nmos(kind);
    FinFETParams mirror = nmos ? p.nfet : p.pfet;
    const char* label = nmos ? "N1" : "P1";
    mirror.n_fin = p.fins_for(label, 6);
    if (auto it = p.vth_shift.find(label); it != p.vth_shift.end()) mirror.delta_v_th += it->second;
    auto level = [&](double current) {
        const double vgs = diode_vgs(mirror, current, p.vdd);
        return nmos ? vgs : p.vdd - vgs;
    };
    return {p.v_lrs.value_or(level(p.i_lrs)), p.v_hrs.value_or(level(p.i_hrs))};
}

void StimulusSchedule::validate() const {
    if (!(t_edge > 0.0)) throw InvalidParams("edge time must be > 0");
    if (!(t_edge <= t_reset_end && t_reset_end + t_edge <= t_latch && t_latch + t_edge <= t_cycle))
        throw InvalidParams("schedule edges must be ordered within the cycle");
    if (!signals.contains(reset_signal)) throw InvalidParams("reset signal is not a scheduled source");
    for (const auto& [name, wave] : signals) {
        const auto& pts = wave.points();
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (!(pts[i].t >= pts[i - 1].t)) throw InvalidParams("signal '" + name + "' edges are not ordered");
        }
    }
}

void StimulusSchedule::apply(Circuit& circuit, CellState cell) const {
    for (const auto& [name, wave] : signals) {
        Element* e = circuit.find(name);
        if (!e) throw InvalidParams("schedule signal '" + name + "' has no source in the circuit");
        if (auto* v = std::get_if<VoltageSource>(e)) {
            v->wave = wave;
        } else if (auto* i = std::get_if<CurrentSource>(e)) {
            i->wave = wave;
        } else {
            throw InvalidParams("schedule signal '" + name + "' is not a source");
        }
    }
    const double level = cell == CellState::Lrs ? cell_lrs : cell_hrs;
    switch (cell_kind) {
        case CellStimulus::Current:
            circuit.get<CurrentSource>(cell_element).wave = step(cell_off, level, 0.0, t_edge);
            break;
        case CellStimulus::Voltage:
            circuit.get<VoltageSource>(cell_element).wave = step(cell_off, level, 0.0, t_edge);
            break;
        case CellStimulus::Resistor:
            circuit.get<Resistor>(cell_element).ohms = level;
            break;
    }
}

StimulusSchedule default_schedule(TopologyKind kind, double vdd, double v_latch) {
    if (!is_sense_amplifier(kind)) throw InvalidParams("no stimulus schedule for " + std::string(to_string(kind)));
    StimulusSchedule s;
    const double t_r = s.t_reset_end;
    const double t_l = s.t_latch;
    const double e = s.t_edge;
    s.vdd = vdd;
    s.supplies = {{"VDD", "vdd"}};
    switch (kind) {
        case TopologyKind::HpCsa:
        case TopologyKind::HpVsa:
            s.signals["VD_EN"] = step(vdd, 0.0, t_r, e);
            s.signals["VL_EN"] = step(0.0, v_latch, t_l, e);
            s.reset_signal = "VD_EN";
            s.reset_node = "d_en";
            s.reset_falls = true;
            break;
        case TopologyKind::HnCsa:
        case TopologyKind::HnVsa:
            s.signals["VC_EN"] = step(0.0, vdd, t_r, e);
            s.signals["VL_EN"] = step(vdd, vdd - v_latch, t_l, e);
            s.reset_signal = "VC_EN";
            s.reset_node = "c_en";
            s.reset_falls = false;
            break;
        case TopologyKind::ConvVsa:
            s.signals["VPRE_EN"] = step(vdd, 0.0, t_r, e);
            s.signals["VWL"] = SourceWaveform::pwl({{0.0, 0.0}, {t_r, 0.0}, {t_r + e, vdd}, {t_l, vdd}, {t_l + e, 0.0}});
            s.reset_signal = "VPRE_EN";
            s.reset_node = "pre";
            s.reset_falls = true;
            s.supplies.push_back({"VPRE", "vpre"});
            break;
        case TopologyKind::ConvCsa:
            s.signals["VRST"] = step(vdd, 0.0, t_r, e);
            s.reset_signal = "VRST";
            s.reset_node = "rst";
            s.reset_falls = true;
            break;
        default:
            break;
    }
    if (kind == TopologyKind::HpVsa || kind == TopologyKind::HnVsa) {
        s.cell_kind = CellStimulus::Voltage;
        s.cell_element = "VCELL";
        s.cell_off = kind == TopologyKind::HpVsa ? vdd : 0.0;
    } else if (kind == TopologyKind::ConvVsa) {
        s.cell_kind = CellStimulus::Resistor;
        s.cell_element = "RCELL";
    } else {
        s.cell_kind = CellStimulus::Current;
        s.cell_element = "ICELL";
    }
    return s;
}

Topology build_topology(TopologyKind kind, const TopologyParams& params) {
    params.validate(kind);
    Topology t;
    t.kind = kind;
    Circuit& c = t.circuit;
    c.vdd = params.vdd;
    c.options = params.options;
    Builder b(params, c);

    switch (kind) {
        case TopologyKind::HpCsa: build_hyper_pmos(b, params, true, c); break;
        case TopologyKind::HpVsa: build_hyper_pmos(b, params, false, c); break;
        case TopologyKind::HnCsa: build_hyper_nmos(b, params, true, c); break;
        case TopologyKind::HnVsa: build_hyper_nmos(b, params, false, c); break;
        case TopologyKind::ConvVsa: build_conv_vsa(b, params, c); break;
        case TopologyKind::ConvCsa: build_conv_csa(b, params, c); break;
        case TopologyKind::BulkPtmFixture:
            b.vdc("VSRC", "in", 0.0);
            c.add(Resistor{"RS", "in", "p", params.series_resistance});
            b.ptm("PTM1", "p", "0");
            return t;
        case TopologyKind::HyperFetFixture:
            if (params.fixture_polarity == Polarity::N) {
                b.vdc("VD", "d", params.vdd);
                b.vdc("VG", "g", 0.0);
                b.fet("H1", Polarity::N, "d", "g", "s", params.fins_for("H1", 1));
                b.ptm("PTM1", "s", "0");
            } else {
                b.vdc("VS", "vs", params.vdd);
                b.vdc("VG", "g", params.vdd);
                b.vdc("VD", "d", 0.0);
                b.ptm("PTM1", "vs", "s");
                b.fet("H1", Polarity::P, "d", "g", "s", params.fins_for("H1", 1));
            }
            return t;
    }

    t.schedule = default_schedule(kind, params.vdd, params.v_latch);
    auto& s = t.schedule;
    switch (s.cell_kind) {
        case CellStimulus::Current:
            s.cell_lrs = params.i_lrs;
            s.cell_hrs = params.i_hrs;
            break;
        case CellStimulus::Voltage: {
            const auto [lrs, hrs] = vsa_gate_levels(kind, params);
            s.cell_lrs = lrs;
            s.cell_hrs = hrs;
            break;
        }
        case CellStimulus::Resistor:
            s.cell_lrs = params.v_pre / params.i_lrs;
            s.cell_hrs = params.v_pre / params.i_hrs;
            break;
    }
    s.validate();
    s.apply(c, CellState::Lrs);
    c.validate();
    return t;
}

std::string device_label(const Element& e) {
    const std::string& name = element_name(e);
    if (std::holds_alternative<Fet>(e) && name.size() > 1 && (name[0] == 'M' || name[0] == 'm')) return name.substr(1);
    return name;
}

std::vector<std::string> device_set(const Circuit& circuit) {
    std::vector<std::string> labels;
    for (const auto& e : circuit.elements()) {
        if (std::holds_alternative<VoltageSource>(e) || std::holds_alternative<CurrentSource>(e)) continue;
        labels.push_back(device_label(e));
    }
    std::sort(labels.begin(), labels.end());
    return labels;
}

}  // namespace ptmsa
