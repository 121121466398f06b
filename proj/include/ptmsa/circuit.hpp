#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ptmsa/devices.hpp"

namespace ptmsa {

inline constexpr std::string_view kGround = "0";

enum class IntegrationMethod { BackwardEuler, Trapezoidal };

std::string_view to_string(IntegrationMethod m);

struct SolverOptions {
    double abstol_current = 1e-12;   // A
    double reltol = 1e-6;
    double vntol = 1e-9;             // V
    int max_newton_iters = 100;
    int max_state_resolution_iters = 10;
    double dt_initial = 0.1e-12;     // s
    double dt_min = 1e-15;           // s
    double dt_max = 5e-12;           // s, adaptive stepping only
    double lte_tol = 2e-3;           // V, predictor-corrector error per step
    bool adaptive = true;
    double gmin = 1e-12;             // S, from each transistor terminal node to ground
    IntegrationMethod integration_method = IntegrationMethod::BackwardEuler;

    void validate() const;
    bool operator==(const SolverOptions&) const = default;
};

struct PwlPoint {
    double t = 0.0;
    double v = 0.0;
    bool operator==(const PwlPoint&) const = default;
};

/// Either a constant or a piecewise-linear function of time, held at its
/// end values outside the listed points.
class SourceWaveform {
public:
    SourceWaveform() = default;
    static SourceWaveform dc(double value);
    static SourceWaveform pwl(std::vector<PwlPoint> points);

    bool is_pwl() const { return !points_.empty(); }
    double dc_value() const { return dc_; }
    const std::vector<PwlPoint>& points() const { return points_; }
    double value(double t) const;

    bool operator==(const SourceWaveform&) const = default;

private:
    double dc_ = 0.0;
    std::vector<PwlPoint> points_;
};

struct Resistor {
    std::string name, a, b;
    double ohms = 0.0;
    bool operator==(const Resistor&) const = default;
};

struct Capacitor {
    std::string name, a, b;
    double farads = 0.0;
    bool operator==(const Capacitor&) const = default;
};

/// Branch current is positive flowing into the + terminal, through the source.
struct VoltageSource {
    std::string name, pos, neg;
    SourceWaveform wave;
    bool operator==(const VoltageSource&) const = default;
};

/// Current flows from the + terminal through the source to the - terminal.
struct CurrentSource {
    std::string name, pos, neg;
    SourceWaveform wave;
    bool operator==(const CurrentSource&) const = default;
};

struct Fet {
    std::string name, drain, gate, source;
    FinFETParams params;
    bool operator==(const Fet&) const = default;
};

struct Ptm {
    std::string name, a, b;
    PTMParams params;
    PtmState initial_state = PtmState::Insulating;
    bool operator==(const Ptm&) const = default;
};

using Element = std::variant<Resistor, Capacitor, VoltageSource, CurrentSource, Fet, Ptm>;

const std::string& element_name(const Element& e);
std::vector<std::string> element_nodes(const Element& e);

class Circuit {
public:
    double vdd = 0.8;
    SolverOptions options;
    std::map<std::string, double> initial_guess;  // node -> volts, DC starting point

    const std::vector<Element>& elements() const { return elements_; }

    /// Throws DuplicateName (names compare case-insensitively).
    void add(Element e);
    void remove(std::string_view name);

    const Element* find(std::string_view name) const;
    Element* find(std::string_view name);

    template <class T>
    T& get(std::string_view name) {
        Element* e = find(name);
        if (!e || !std::holds_alternative<T>(*e)) throw_missing(name);
        return std::get<T>(*e);
    }
    template <class T>
    const T& get(std::string_view name) const {
        const Element* e = find(name);
        if (!e || !std::holds_alternative<T>(*e)) throw_missing(name);
        return std::get<T>(*e);
    }

    /// Non-ground nodes in order of first appearance.
    std::vector<std::string> node_names() const;

    /// Checks element values, name uniqueness, V_DD and the initial-guess nodes.
    void validate() const;

private:
    [[noreturn]] static void throw_missing(std::string_view name);
    std::vector<Element> elements_;
};

bool is_ground(std::string_view node);

/// Order-insensitive field-by-field equality of two circuits.
bool structurally_equal(const Circuit& a, const Circuit& b);

}  // namespace ptmsa
