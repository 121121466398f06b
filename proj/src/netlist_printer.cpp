#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <sstream>

#include "ptmsa/netlist.hpp"

namespace ptmsa {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string waveform(const SourceWaveform& w) {
    if (!w.is_pwl()) return "DC " + format_number(w.dc_value());
    std::string out = "PWL(";
    for (std::size_t i = 0; i < w.points().size(); ++i) {
        if (i) out += ' ';
        out += format_number(w.points()[i].t) + ' ' + format_number(w.points()[i].v);
    }
    return out + ")";
}

struct LineWriter {
    std::string operator()(const Resistor& x) const {
        return x.name + ' ' + x.a + ' ' + x.b + ' ' + format_number(x.ohms);
    }
    std::string operator()(const Capacitor& x) const {
        return x.name + ' ' + x.a + ' ' + x.b + ' ' + format_number(x.farads);
    }
    std::string operator()(const VoltageSource& x) const {
        return x.name + ' ' + x.pos + ' ' + x.neg + ' ' + waveform(x.wave);
    }
    std::string operator()(const CurrentSource& x) const {
        return x.name + ' ' + x.pos + ' ' + x.neg + ' ' + waveform(x.wave);
    }
    std::string operator()(const Fet& x) const {
        const auto& p = x.params;
        std::string out = x.name + ' ' + x.drain + ' ' + x.gate + ' ' + x.source;
        out += " TYPE=" + std::string(to_string(p.polarity));
        out += " VTH=" + format_number(p.v_th);
        out += " NFIN=" + std::to_string(p.n_fin);
        out += " DVTH=" + format_number(p.delta_v_th);
        out += " K=" + format_number(p.k);
        out += " NSS=" + format_number(p.n_ss);
        out += " PHIT=" + format_number(p.phi_t);
        out += " ALPHA=" + format_number(p.alpha_sat);
        out += " LAMBDA=" + format_number(p.lambda_clm);
        return out;
    }
    std::string operator()(const Ptm& x) const {
        const auto& p = x.params;
        std::string out = x.name + ' ' + x.a + ' ' + x.b;
        out += " RHOINS=" + format_number(p.rho_ins);
        out += " RHOMET=" + format_number(p.rho_met);
        out += " L=" + format_number(p.length);
        out += " AREA=" + format_number(p.area);
        out += " VIMT=" + format_number(p.v_c_imt);
        out += " IMIT=" + format_number(p.i_c_mit);
        out += " STATE=" + std::string(to_string(x.initial_state));
        return out;
    }
};

std::string options_line(const Circuit& c) {
    const Circuit defaults;
    const SolverOptions& d = defaults.options;
    const SolverOptions& o = c.options;
    std::string out;
    auto add = [&](const char* key, double value, double fallback) {
        if (value != fallback) out += std::string(" ") + key + "=" + format_number(value);
    };
    add("vdd", c.vdd, defaults.vdd);
    add("abstol", o.abstol_current, d.abstol_current);
    add("reltol", o.reltol, d.reltol);
    add("vntol", o.vntol, d.vntol);
    add("itl", o.max_newton_iters, d.max_newton_iters);
    add("itlstate", o.max_state_resolution_iters, d.max_state_resolution_iters);
    add("dtinit", o.dt_initial, d.dt_initial);
    add("dtmin", o.dt_min, d.dt_min);
    add("dtmax", o.dt_max, d.dt_max);
    add("ltetol", o.lte_tol, d.lte_tol);
    add("adaptive", o.adaptive ? 1.0 : 0.0, d.adaptive ? 1.0 : 0.0);
    add("gmin", o.gmin, d.gmin);
    if (o.integration_method != d.integration_method) out += " method=" + std::string(to_string(o.integration_method));
    return out.empty() ? out : ".options" + out;
}

}  // namespace

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string print_netlist(const Circuit& circuit) {
    std::ostringstream out;
    if (const auto options = options_line(circuit); !options.empty()) out << options << '\n';
    if (!circuit.initial_guess.empty()) {
        out << ".nodeset";
        for (const auto& [node, v] : circuit.initial_guess) out << ' ' << node << '=' << format_number(v);
        out << '\n';
    }
    std::vector<const Element*> sorted;
    for (const auto& e : circuit.elements()) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(),
              [](const Element* a, const Element* b) { return lower(element_name(*a)) < lower(element_name(*b)); });
    for (const Element* e : sorted) out << std::visit(LineWriter{}, *e) << '\n';
    out << ".end\n";
    return out.str();
}

}  // namespace ptmsa
