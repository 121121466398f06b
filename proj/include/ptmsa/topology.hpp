#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptmsa/circuit.hpp"

namespace ptmsa {

enum class TopologyKind { ConvVsa, ConvCsa, HpCsa, HpVsa, HnCsa, HnVsa, BulkPtmFixture, HyperFetFixture };

inline constexpr TopologyKind kSenseAmplifiers[] = {TopologyKind::ConvVsa, TopologyKind::ConvCsa,
                                                    TopologyKind::HpCsa,   TopologyKind::HpVsa,
                                                    TopologyKind::HnCsa,   TopologyKind::HnVsa};
inline constexpr TopologyKind kAllTopologies[] = {
    TopologyKind::ConvVsa, TopologyKind::ConvCsa, TopologyKind::HpCsa,          TopologyKind::HpVsa,
    TopologyKind::HnCsa,   TopologyKind::HnVsa,   TopologyKind::BulkPtmFixture, TopologyKind::HyperFetFixture};

std::string_view to_string(TopologyKind kind);
/// Accepts the names printed by to_string; throws InvalidParams.
TopologyKind parse_topology_kind(std::string_view name);

bool is_sense_amplifier(TopologyKind kind);
bool is_current_sense(TopologyKind kind);
bool is_proposed(TopologyKind kind);   // hp-* and hn-*
bool is_hyper_nmos(TopologyKind kind); // hn-*

enum class CellState { Lrs, Hrs };
std::string_view to_string(CellState s);

enum class LogicOutcome { High, Low, Indeterminate };
std::string_view to_string(LogicOutcome o);

/// Output level each sense amplifier settles to for a cell state.
LogicOutcome expected_outcome(TopologyKind kind, CellState cell);

struct TopologyParams {
    double vdd = 0.8;
    FinFETParams nfet{};
    FinFETParams pfet{Polarity::P};
    PTMParams ptm{};
    std::map<std::string, int> fins;           // device label -> fin count
    std::map<std::string, double> vth_shift;   // device label -> delta V_th, V
    double c_x = 1e-15;
    double c_y = 1e-15;
    double c_bl = 20e-15;                      // conv-vsa bitline
    bool t1 = false;
    bool t2 = false;
    double i_lrs = 120e-6;
    double i_hrs = 18e-6;
    std::optional<double> i_ref;               // conv-csa; default mean of i_lrs and i_hrs
    std::optional<double> v_lrs;               // VSA gate levels; default from the mirror inversion
    std::optional<double> v_hrs;
    double v_pre = 0.6;                        // conv-vsa bitline precharge
    double v_ref_fraction = 0.6;               // conv-vsa V_REF / V_PRE
    double v_bias = 0.4;                       // conventional comparator tail bias
    double v_latch = 0.35;                     // keeper gate drive while latched, |V_GS|
    double series_resistance = 6.6e3;          // bulk fixture
    Polarity fixture_polarity = Polarity::N;   // hyperfet fixture
    SolverOptions options{};

    /// Fins for a device label, falling back to the per-topology default.
    int fins_for(std::string_view label, int fallback) const;

    /// Dotted-key override, e.g. "ptm.v_c_imt", "fins.P2", "vth_shift.P1".
    /// Throws InvalidParams for unknown keys or malformed values.
    void set(std::string_view key, std::string_view value);

    void validate(TopologyKind kind) const;
};

/// Voltage levels of a VSA gate for LRS and HRS (absolute node voltages), from
/// the reference mirror P1 (N1 for hn-vsa) including its fin and V_th overrides.
std::pair<double, double> vsa_gate_levels(TopologyKind kind, const TopologyParams& params);

enum class CellStimulus { Current, Voltage, Resistor };

struct Supply {
    std::string source;
    std::string node;   // positive terminal; the negative one is ground
};

struct StimulusSchedule {
    double vdd = 0.8;
    double t_cycle = 500e-12;
    double t_edge = 2e-12;
    double t_reset_end = 150e-12;   // reset de-asserting edge starts here
    double t_latch = 350e-12;

    std::map<std::string, SourceWaveform> signals;   // control source name -> waveform
    std::string reset_signal;                        // source whose edge starts the delay
    std::string reset_node;
    bool reset_falls = true;                         // de-asserting edge direction
    std::vector<Supply> supplies;                    // sources counted in sensing power

    CellStimulus cell_kind = CellStimulus::Current;
    std::string cell_element;
    double cell_lrs = 0.0;   // A, V or ohm depending on cell_kind
    double cell_hrs = 0.0;
    double cell_off = 0.0;   // level before the first edge (current and voltage kinds)

    std::string output_node = "y";

    /// Sets every control waveform and the cell stimulus for one cycle.
    void apply(Circuit& circuit, CellState cell) const;
    void validate() const;
};

struct Topology {
    TopologyKind kind{};
    Circuit circuit;
    StimulusSchedule schedule;
};

/// Control-signal timing for a sense amplifier (no cell levels).
StimulusSchedule default_schedule(TopologyKind kind, double vdd = 0.8, double v_latch = 0.35);

/// Wired circuit plus its schedule; the circuit is set up for the LRS cell.
/// Throws InvalidParams.
Topology build_topology(TopologyKind kind, const TopologyParams& params = {});

/// Schematic label of an element: transistors drop their leading 'M' card.
std::string device_label(const Element& e);

/// Device labels of every non-source element.
std::vector<std::string> device_set(const Circuit& circuit);

}  // namespace ptmsa
