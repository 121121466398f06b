#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "ptmsa/errors.hpp"
#include "ptmsa/netlist.hpp"

namespace ptmsa {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

struct Token {
    std::string text;
    int column = 0;
};

// Whitespace and commas separate tokens; '(' ')' and '=' are tokens of their own.
std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            ++i;
        } else if (c == '(' || c == ')' || c == '=') {
            tokens.push_back({std::string(1, c), static_cast<int>(i) + 1});
            ++i;
        } else {
            const std::size_t start = i;
            while (i < line.size()) {
                const char d = line[i];
                if (std::isspace(static_cast<unsigned char>(d)) || d == ',' || d == '(' || d == ')' || d == '=') break;
                ++i;
            }
            tokens.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
        }
    }
    return tokens;
}

class LineParser {
public:
    LineParser(int line_no, std::vector<Token> tokens, int end_column)
        : line_(line_no), tokens_(std::move(tokens)), end_column_(end_column) {}

    bool done() const { return pos_ >= tokens_.size(); }
    const Token* peek() const { return done() ? nullptr : &tokens_[pos_]; }

    [[noreturn]] void fail(const std::string& expected, const std::string& what) const {
        if (done()) throw ParseError(line_, end_column_, "", expected, what);
        throw ParseError(line_, tokens_[pos_].column, tokens_[pos_].text, expected, what);
    }

    const Token& next(const std::string& expected) {
        if (done()) fail(expected, "unexpected end of line");
        return tokens_[pos_++];
    }

    std::string node(const char* role) {
        const Token& t = next(std::string(role) + " node");
        if (t.text == "(" || t.text == ")" || t.text == "=") {
            --pos_;
            fail(std::string(role) + " node", "invalid node name");
        }
        return lower(t.text);
    }

    double number(const std::string& expected) {
        const Token& t = next(expected);
        const auto v = parse_number(t.text);
        if (!v) {
            --pos_;
            fail(expected, "malformed number");
        }
        return *v;
    }

    void expect(std::string_view text) {
        const Token& t = next("'" + std::string(text) + "'");
        if (t.text != text) {
            --pos_;
            fail("'" + std::string(text) + "'", "unexpected token");
        }
    }

    /// key=value pairs until the end of the line.
    std::map<std::string, std::pair<std::string, int>> assignments(const std::set<std::string>& allowed,
                                                                   const std::string& expected) {
        std::map<std::string, std::pair<std::string, int>> out;
        while (!done()) {
            const Token& key = tokens_[pos_];
            const std::string k = lower(key.text);
            if (!allowed.contains(k)) fail(expected, "unknown parameter");
            if (out.contains(k)) fail(expected, "parameter given twice");
            ++pos_;
            expect("=");
            const Token& value = next("value for " + key.text);
            out[k] = {value.text, value.column};
        }
        return out;
    }

    [[noreturn]] void fail_at(int column, const std::string& token, const std::string& expected,
                              const std::string& what) const {
        throw ParseError(line_, column, token, expected, what);
    }

    int line() const { return line_; }

private:
    int line_;
    std::vector<Token> tokens_;
    int end_column_;
    std::size_t pos_ = 0;
};

SourceWaveform parse_waveform(LineParser& p) {
    const Token& kind = p.next("DC, PWL or a value");
    const std::string k = lower(kind.text);
    if (k == "dc") {
        const double v = p.number("source value");
        if (!p.done()) p.fail("end of line", "unexpected token");
        return SourceWaveform::dc(v);
    }
    if (k == "pwl") {
        p.expect("(");
        std::vector<PwlPoint> points;
        while (true) {
            const Token* t = p.peek();
            if (t && t->text == ")") {
                p.next(")");
                break;
            }
            const int column = t ? t->column : 0;
            const double time = p.number("PWL time or ')'");
            const double value = p.number("PWL value");
            if (!points.empty() && !(time >= points.back().t)) {
                p.fail_at(column, t ? t->text : "", "non-decreasing PWL time", "PWL times must not decrease");
            }
            points.push_back({time, value});
        }
        if (points.empty()) p.fail("PWL point", "PWL needs at least one point");
        if (!p.done()) p.fail("end of line", "unexpected token");
        return SourceWaveform::pwl(std::move(points));
    }
    // A bare value is a DC source.
    if (const auto v = parse_number(kind.text)) {
        if (!p.done()) p.fail("end of line", "unexpected token");
        return SourceWaveform::dc(*v);
    }
    p.fail_at(kind.column, kind.text, "DC, PWL or a value", "unknown source form");
}

double assigned_number(const LineParser& p, const std::pair<std::string, int>& value, const std::string& key) {
    const auto v = parse_number(value.first);
    if (!v) p.fail_at(value.second, value.first, "number for " + key, "malformed number");
    return *v;
}

Element parse_fet(LineParser& p, const std::string& name) {
    Fet fet;
    fet.name = name;
    fet.drain = p.node("drain");
    fet.gate = p.node("gate");
    fet.source = p.node("source");
    const auto kv = p.assignments({"type", "vth", "dvth", "nfin", "k", "nss", "phit", "alpha", "lambda"},
                                  "TYPE, VTH, DVTH, NFIN, K, NSS, PHIT, ALPHA or LAMBDA");
    for (const char* required : {"type", "vth", "nfin"}) {
        if (!kv.contains(required)) p.fail(std::string(required) + "=", "missing required parameter");
    }
    const auto& [type, type_col] = kv.at("type");
    const std::string t = lower(type);
    if (t == "n") {
        fet.params.polarity = Polarity::N;
    } else if (t == "p") {
        fet.params.polarity = Polarity::P;
    } else {
        p.fail_at(type_col, type, "n or p", "unknown transistor type");
    }
    fet.params.v_th = assigned_number(p, kv.at("vth"), "VTH");
    const double nfin = assigned_number(p, kv.at("nfin"), "NFIN");
    if (nfin != std::floor(nfin) || nfin < 1 || nfin > 1e6) {
        p.fail_at(kv.at("nfin").second, kv.at("nfin").first, "positive integer", "NFIN must be a positive integer");
    }
    fet.params.n_fin = static_cast<int>(nfin);
    if (kv.contains("dvth")) fet.params.delta_v_th = assigned_number(p, kv.at("dvth"), "DVTH");
    if (kv.contains("k")) fet.params.k = assigned_number(p, kv.at("k"), "K");
    if (kv.contains("nss")) fet.params.n_ss = assigned_number(p, kv.at("nss"), "NSS");
    if (kv.contains("phit")) fet.params.phi_t = assigned_number(p, kv.at("phit"), "PHIT");
    if (kv.contains("alpha")) fet.params.alpha_sat = assigned_number(p, kv.at("alpha"), "ALPHA");
    if (kv.contains("lambda")) fet.params.lambda_clm = assigned_number(p, kv.at("lambda"), "LAMBDA");
    return fet;
}

Element parse_ptm(LineParser& p, const std::string& name) {
    Ptm ptm;
    ptm.name = name;
    ptm.a = p.node("first");
    ptm.b = p.node("second");
    const auto kv = p.assignments({"rhoins", "rhomet", "l", "area", "vimt", "imit", "state"},
                                  "RHOINS, RHOMET, L, AREA, VIMT, IMIT or STATE");
    for (const char* required : {"rhoins", "rhomet", "l", "area", "vimt", "imit"}) {
        if (!kv.contains(required)) p.fail(std::string(required) + "=", "missing required parameter");
    }
    ptm.params.rho_ins = assigned_number(p, kv.at("rhoins"), "RHOINS");
    ptm.params.rho_met = assigned_number(p, kv.at("rhomet"), "RHOMET");
    ptm.params.length = assigned_number(p, kv.at("l"), "L");
    ptm.params.area = assigned_number(p, kv.at("area"), "AREA");
    ptm.params.v_c_imt = assigned_number(p, kv.at("vimt"), "VIMT");
    ptm.params.i_c_mit = assigned_number(p, kv.at("imit"), "IMIT");
    if (kv.contains("state")) {
        const auto& [s, col] = kv.at("state");
        const std::string v = lower(s);
        if (v == "ins") {
            ptm.initial_state = PtmState::Insulating;
        } else if (v == "met") {
            ptm.initial_state = PtmState::Metallic;
        } else {
            p.fail_at(col, s, "ins or met", "unknown PTM state");
        }
    }
    return ptm;
}

void parse_options(LineParser& p, Circuit& c) {
    const auto kv = p.assignments({"vdd", "abstol", "reltol", "vntol", "itl", "itlstate", "dtinit", "dtmin", "dtmax",
                                   "ltetol", "adaptive", "gmin", "method"},
                                  "a solver option");
    auto& o = c.options;
    for (const auto& [key, value] : kv) {
        if (key == "method") {
            const std::string m = lower(value.first);
            if (m == "be") {
                o.integration_method = IntegrationMethod::BackwardEuler;
            } else if (m == "trap") {
                o.integration_method = IntegrationMethod::Trapezoidal;
            } else {
                p.fail_at(value.second, value.first, "be or trap", "unknown integration method");
            }
            continue;
        }
        const double v = assigned_number(p, value, key);
        if (key == "vdd") c.vdd = v;
        else if (key == "abstol") o.abstol_current = v;
        else if (key == "reltol") o.reltol = v;
        else if (key == "vntol") o.vntol = v;
        else if (key == "itl") o.max_newton_iters = static_cast<int>(v);
        else if (key == "itlstate") o.max_state_resolution_iters = static_cast<int>(v);
        else if (key == "dtinit") o.dt_initial = v;
        else if (key == "dtmin") o.dt_min = v;
        else if (key == "dtmax") o.dt_max = v;
        else if (key == "ltetol") o.lte_tol = v;
        else if (key == "adaptive") o.adaptive = v != 0.0;
        else if (key == "gmin") o.gmin = v;
    }
}

}  // namespace

std::optional<double> parse_number(std::string_view token) {
    if (token.empty()) return std::nullopt;
    if (token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr == token.data()) return std::nullopt;
    const std::string suffix = lower(std::string_view(ptr, token.data() + token.size() - ptr));
    static const std::map<std::string, double> scale{{"", 1.0},   {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9},
                                                     {"u", 1e-6}, {"m", 1e-3},  {"k", 1e3},   {"meg", 1e6},
                                                     {"g", 1e9},  {"t", 1e12}};
    const auto it = scale.find(suffix);
    if (it == scale.end()) return std::nullopt;
    value *= it->second;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

Circuit parse_netlist(std::string_view text) {
    Circuit circuit;
    std::set<std::string> directive_nodes;
    int line_no = 0;
    std::size_t start = 0;
    bool ended = false;
    while (start <= text.size() && !ended) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        auto tokens = tokenize(line);
        if (tokens.empty() || tokens.front().text.front() == '*') {
            if (end == text.size()) break;
            continue;
        }
        LineParser p(line_no, tokens, static_cast<int>(line.size()) + 1);
        const Token head = p.next("element or directive");
        const std::string card = lower(head.text);

        if (card.front() == '.') {
            if (card == ".end") {
                if (!p.done()) p.fail("end of line", "unexpected token after .end");
                ended = true;
            } else if (card == ".options" || card == ".option") {
                parse_options(p, circuit);
            } else if (card == ".nodeset") {
                while (!p.done()) {
                    const std::string node = p.node("nodeset");
                    p.expect("=");
                    const double v = p.number("node voltage");
                    circuit.initial_guess[node] = v;
                    directive_nodes.insert(node);
                }
            } else {
                p.fail_at(head.column, head.text, ".options, .nodeset or .end", "unknown directive");
            }
        } else {
            if (head.text.size() < 2) {
                p.fail_at(head.column, head.text, "element name after the card letter", "element name too short");
            }
            const std::string& name = head.text;
            Element element;
            switch (card.front()) {
                case 'r': {
                    Resistor r{name, p.node("first"), p.node("second"), p.number("resistance")};
                    element = r;
                    break;
                }
                case 'c': {
                    Capacitor c{name, p.node("first"), p.node("second"), p.number("capacitance")};
                    element = c;
                    break;
                }
                case 'v': {
                    VoltageSource v{name, p.node("positive"), p.node("negative"), {}};
                    v.wave = parse_waveform(p);
                    element = v;
                    break;
                }
                case 'i': {
                    CurrentSource i{name, p.node("positive"), p.node("negative"), {}};
                    i.wave = parse_waveform(p);
                    element = i;
                    break;
                }
                case 'm':
                    element = parse_fet(p, name);
                    break;
                case 'p':
                    element = parse_ptm(p, name);
                    break;
                default:
                    p.fail_at(head.column, head.text, "R, C, V, I, M or P", "unknown element card '" +
                                                                             std::string(1, head.text.front()) + "'");
            }
            if (std::holds_alternative<Resistor>(element) || std::holds_alternative<Capacitor>(element)) {
                if (!p.done()) p.fail("end of line", "unexpected token");
            }
            circuit.add(std::move(element));
        }
        if (end == text.size()) break;
    }

    const auto nodes = circuit.node_names();
    for (const auto& node : directive_nodes) {
        if (std::find(nodes.begin(), nodes.end(), node) == nodes.end()) throw UnknownNode(node);
    }
    circuit.validate();
    return circuit;
}

}  // namespace ptmsa
