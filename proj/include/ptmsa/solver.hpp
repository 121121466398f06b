#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptmsa/circuit.hpp"

namespace ptmsa {

struct SystemState {
    double time = 0.0;
    std::vector<double> node_voltages;       // Simulator::node_names() order
    std::vector<double> branch_currents;     // one per voltage source
    std::vector<PtmState> ptm_states;        // one per PTM element
    std::vector<double> capacitor_currents;  // integrator history
};

struct TimeContext {
    enum class Mode { Dc, Transient };
    Mode mode = Mode::Dc;
    double time = 0.0;
    double dt = 0.0;
    double source_scale = 1.0;
    IntegrationMethod method = IntegrationMethod::BackwardEuler;
    const SystemState* previous = nullptr;  // accepted state at time - dt
    double pseudo_g = 0.0;                  // DC only: S from each node to its previous value

    static TimeContext dc(double t = 0.0) { return TimeContext{Mode::Dc, t, 0.0, 1.0, {}, nullptr, 0.0}; }
    static TimeContext transient(const SystemState& prev, double dt, IntegrationMethod m) {
        return TimeContext{Mode::Transient, prev.time + dt, dt, 1.0, m, &prev, 0.0};
    }
};

/// Newton system at a guess: jacobian * delta = -residual.
struct LinearSystem {
    Eigen::MatrixXd jacobian;
    Eigen::VectorXd residual;
    Eigen::VectorXd scale;  // sum of |contributions| per row, for relative tolerances
};

struct PtmEvent {
    double time = 0.0;
    std::string element;
    PtmState from = PtmState::Insulating;
    PtmState to = PtmState::Insulating;
    double v_ptm = 0.0;  // at the solution that fired the transition
    double i_ptm = 0.0;
};

struct TransientResult {
    std::vector<double> time;
    std::vector<std::string> columns;        // "v(node)", "i(element)", "s(ptm)"
    std::vector<std::vector<double>> data;   // one vector per column
    std::vector<PtmEvent> events;

    std::optional<std::size_t> find(std::string_view column) const;
    const std::vector<double>& column(std::string_view name) const;
};

class Simulator {
public:
    /// Elaborates the circuit; throws SingularStructure for floating nodes.
    explicit Simulator(Circuit circuit);

    const Circuit& circuit() const { return circuit_; }
    /// Replaces the waveform of an independent source with a constant.
    void set_source_value(std::string_view source, double value);
    const std::vector<std::string>& node_names() const { return node_names_; }
    const std::vector<std::string>& source_names() const { return vsource_names_; }
    const std::vector<std::string>& ptm_names() const { return ptm_names_; }
    std::size_t dimension() const { return node_names_.size() + vsource_names_.size(); }

    SystemState initial_state() const;

    LinearSystem assemble(const SystemState& guess, const TimeContext& ctx) const;

    /// True when the KCL/branch residual is within abstol + reltol * local scale.
    bool residual_converged(const LinearSystem& sys) const;
    double residual_norm(const LinearSystem& sys) const;

    /// Operating point at the t = 0 source values with self-consistent PTM states.
    SystemState solve_dc(const SystemState& initial, std::vector<PtmEvent>* events = nullptr) const;

    /// One implicit step of size dt including PTM state resolution.
    /// Throws StepFailure when Newton or the state resolution fails.
    SystemState step_transient(const SystemState& state, double dt, std::vector<PtmEvent>* events = nullptr) const;

    /// Applies the transition rules to a converged solution and re-solves
    /// until the PTM states are a fixed point. Throws StateChatter.
    SystemState resolve_device_states(const SystemState& converged, const TimeContext& ctx,
                                      std::vector<PtmEvent>* events = nullptr) const;

    TransientResult run_transient(double t_end) const;

    double node_voltage(const SystemState& s, std::string_view node) const;
    /// Voltage sources: MNA branch current; current sources: their value;
    /// resistors and PTMs: current from the first to the second terminal.
    double element_current(const SystemState& s, std::string_view element) const;
    double ptm_voltage(const SystemState& s, std::size_t ptm) const;
    double ptm_current(const SystemState& s, std::size_t ptm) const;

    /// Sum of V*I absorbed by every element (sources deliver negative power).
    double power_balance(const SystemState& s) const;

private:
    struct TwoTerminal { int a, b; double value; std::size_t element; };
    struct SourceRef { int a, b; std::size_t element; };
    struct FetRef { int d, g, s; std::size_t element; };

    bool newton(SystemState& x, const TimeContext& ctx) const;
    bool pseudo_transient(SystemState& x, const TimeContext& ctx) const;
    SystemState solve_dc_states_fixed(const SystemState& guess) const;
    std::vector<PtmState> next_states(const SystemState& s) const;
    double voltage(const SystemState& s, int node) const;
    int node_index(std::string_view node) const;

    Circuit circuit_;
    std::vector<std::string> node_names_;
    std::vector<std::string> vsource_names_;
    std::vector<std::string> ptm_names_;

    std::vector<TwoTerminal> resistors_;
    std::vector<TwoTerminal> capacitors_;
    std::vector<SourceRef> vsources_;
    std::vector<SourceRef> isources_;
    std::vector<FetRef> fets_;
    std::vector<SourceRef> ptms_;
    std::vector<bool> gmin_nodes_;       // transistor terminals
    std::vector<bool> dc_shunt_nodes_;   // reached only through capacitors
};

}  // namespace ptmsa
