#include "ptmsa/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "ptmsa/errors.hpp"

namespace ptmsa {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::string_view to_string(IntegrationMethod m) {
    return m == IntegrationMethod::BackwardEuler ? "be" : "trap";
}

void SolverOptions::validate() const {
    if (!(abstol_current > 0.0) || !(reltol > 0.0) || !(vntol > 0.0) || !(lte_tol > 0.0))
        throw InvalidParams("solver tolerances must be > 0");
    if (max_newton_iters < 1 || max_state_resolution_iters < 1)
        throw InvalidParams("iteration limits must be >= 1");
    if (!(dt_min > 0.0) || !(dt_min <= dt_initial)) throw InvalidParams("require 0 < dt_min <= dt_initial");
    if (!(dt_max >= dt_initial)) throw InvalidParams("require dt_max >= dt_initial");
    if (!(gmin >= 0.0)) throw InvalidParams("gmin must be >= 0");
}

SourceWaveform SourceWaveform::dc(double value) {
    SourceWaveform w;
    w.dc_ = value;
    return w;
}

SourceWaveform SourceWaveform::pwl(std::vector<PwlPoint> points) {
    if (points.empty()) throw InvalidParams("PWL waveform needs at least one point");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].t >= points[i - 1].t)) throw InvalidParams("PWL times must be non-decreasing");
    }
    SourceWaveform w;
    w.dc_ = points.front().v;
    w.points_ = std::move(points);
    return w;
}

double SourceWaveform::value(double t) const {
    if (points_.empty()) return dc_;
    if (t <= points_.front().t) return points_.front().v;
    if (t >= points_.back().t) return points_.back().v;
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double x, const PwlPoint& p) { return x < p.t; });
    const PwlPoint& b = *it;
    const PwlPoint& a = *(it - 1);
    if (b.t == a.t) return b.v;
    return a.v + (b.v - a.v) * (t - a.t) / (b.t - a.t);
}

const std::string& element_name(const Element& e) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, e);
}

std::vector<std::string> element_nodes(const Element& e) {
    struct Visitor {
        std::vector<std::string> operator()(const Resistor& x) const { return {x.a, x.b}; }
        std::vector<std::string> operator()(const Capacitor& x) const { return {x.a, x.b}; }
        std::vector<std::string> operator()(const VoltageSource& x) const { return {x.pos, x.neg}; }
        std::vector<std::string> operator()(const CurrentSource& x) const { return {x.pos, x.neg}; }
        std::vector<std::string> operator()(const Fet& x) const { return {x.drain, x.gate, x.source}; }
        std::vector<std::string> operator()(const Ptm& x) const { return {x.a, x.b}; }
    };
    return std::visit(Visitor{}, e);
}

bool is_ground(std::string_view node) {
    return node == kGround || lower(node) == "gnd";
}

void Circuit::add(Element e) {
    const std::string key = lower(element_name(e));
    for (const auto& existing : elements_) {
        if (lower(element_name(existing)) == key) throw DuplicateName(element_name(e));
    }
    elements_.push_back(std::move(e));
}

void Circuit::remove(std::string_view name) {
    const std::string key = lower(name);
    std::erase_if(elements_, [&](const Element& e) { return lower(element_name(e)) == key; });
}

const Element* Circuit::find(std::string_view name) const {
    const std::string key = lower(name);
    for (const auto& e : elements_) {
        if (lower(element_name(e)) == key) return &e;
    }
    return nullptr;
}

Element* Circuit::find(std::string_view name) {
    return const_cast<Element*>(std::as_const(*this).find(name));
}

void Circuit::throw_missing(std::string_view name) {
    throw InvalidParams("no element '" + std::string(name) + "' of the requested kind");
}

std::vector<std::string> Circuit::node_names() const {
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const auto& e : elements_) {
        for (auto& n : element_nodes(e)) {
            if (is_ground(n)) continue;
            if (seen.insert(n).second) names.push_back(n);
        }
    }
    return names;
}

void Circuit::validate() const {
    if (!(vdd > 0.0)) throw InvalidParams("V_DD must be > 0");
    options.validate();
    std::set<std::string> names;
    for (const auto& e : elements_) {
        if (!names.insert(lower(element_name(e))).second) throw DuplicateName(element_name(e));
        for (const auto& n : element_nodes(e)) {
            if (n.empty()) throw InvalidParams("element '" + element_name(e) + "' has an empty node name");
        }
        std::visit(
            [](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Resistor>) {
                    if (!(x.ohms > 0.0)) throw InvalidParams("resistor '" + x.name + "' must be > 0 ohm");
                } else if constexpr (std::is_same_v<T, Capacitor>) {
                    if (!(x.farads >= 0.0)) throw InvalidParams("capacitor '" + x.name + "' must be >= 0 F");
                } else if constexpr (std::is_same_v<T, Fet>) {
                    x.params.validate();
                } else if constexpr (std::is_same_v<T, Ptm>) {
                    x.params.validate();
                }
            },
            e);
    }
    if (!initial_guess.empty()) {
        const auto nodes = node_names();
        for (const auto& [node, _] : initial_guess) {
            if (std::find(nodes.begin(), nodes.end(), node) == nodes.end()) throw UnknownNode(node);
        }
    }
}

bool structurally_equal(const Circuit& a, const Circuit& b) {
    if (a.vdd != b.vdd || !(a.options == b.options) || a.initial_guess != b.initial_guess) return false;
    if (a.elements().size() != b.elements().size()) return false;
    for (const auto& e : a.elements()) {
        const Element* other = b.find(element_name(e));
        if (!other || !(*other == e)) return false;
    }
    return true;
}

}  // namespace ptmsa
