#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptmsa/solver.hpp"
#include "ptmsa/topology.hpp"

namespace ptmsa {

struct SweepTransition {
    double value = 0.0;   // first sweep value at which the new state holds
    bool up = true;       // found on the lo -> hi pass
    std::string element;
    PtmState from = PtmState::Insulating;
    PtmState to = PtmState::Insulating;
};

struct SweepResult {
    std::string source;
    std::string probe;                  // element whose current is recorded
    std::vector<double> axis;           // ascending
    std::vector<double> up_current;     // lo -> hi pass, indexed like axis
    std::vector<double> down_current;   // hi -> lo pass, indexed like axis
    std::vector<SweepTransition> transitions;
};

/// Sweeps a source lo -> hi -> lo carrying the PTM states from point to point.
/// The probe defaults to the first PTM, or the swept source without one.
SweepResult dc_sweep_hysteretic(const Circuit& circuit, std::string_view source, double lo, double hi, int n_points,
                                std::string_view probe = "");

struct TransitionValue {
    std::optional<double> value;   // empty when the condition never fires in [0, V_DD]
    double bracket = 0.0;          // width of the final bisection interval
    bool reachable() const { return value.has_value(); }
};

/// Magnitudes |V| for both polarities.
struct TransitionVoltages {
    TransitionValue v_gs_imt;   // insulating branch, |V_DS| = V_DD
    TransitionValue v_gs_mit;   // metallic branch, |V_DS| = V_DD
    TransitionValue v_ds_imt;   // insulating branch, |V_GS| = V_DD
};

TransitionVoltages find_transition_voltages(const FinFETParams& fet, const PTMParams& ptm, double vdd, double tol);

/// Gate-node voltages of a diode-connected mirror carrying I_LRS and I_HRS
/// (source at ground for n-type, at V_DD for p-type).
struct MirrorWindow {
    double v_gs_lrs = 0.0;
    double v_gs_hrs = 0.0;
    double center() const { return 0.5 * (v_gs_lrs + v_gs_hrs); }
    double size() const { return v_gs_lrs > v_gs_hrs ? v_gs_lrs - v_gs_hrs : v_gs_hrs - v_gs_lrs; }
};

MirrorWindow mirror_window(const FinFETParams& mirror, double i_lrs, double i_hrs, double vdd, double tol);

struct SenseMetrics {
    std::optional<double> delay;   // s; empty when the output never crosses 50%
    double sensing_power = 0.0;    // W, cycle average
    std::optional<double> pdp;     // J; delay * sensing_power
    LogicOutcome outcome = LogicOutcome::Indeterminate;
    double v_out_final = 0.0;
    std::vector<PtmEvent> events;
    std::string note;
};

struct SenseRun {
    TransientResult waveform;
    SenseMetrics metrics;
};

SenseRun run_sense(TopologyKind kind, CellState cell, const TopologyParams& params,
                   const std::optional<StimulusSchedule>& schedule = std::nullopt);

/// Delay from the reset signal's de-asserting 50% crossing to the output's
/// LRS-deciding 50% crossing, cycle-average supply power, and the output class.
SenseMetrics extract_metrics(const TransientResult& result, const StimulusSchedule& schedule, TopologyKind kind);

/// First time after t_from at which the column crosses level in the given direction,
/// linearly interpolated between samples.
std::optional<double> find_crossing(const std::vector<double>& time, const std::vector<double>& values, double level,
                                    bool rising, double t_from = 0.0);

enum class StudyKind { WindowVsDvth, ImtVsDvth, MitVsDvth, VdsImtVsDvth, ImtVsRhoIns };

std::string_view to_string(StudyKind kind);
StudyKind parse_study_kind(std::string_view name);

struct StudySpec {
    StudyKind kind = StudyKind::ImtVsDvth;
    std::vector<double> axis;   // delta V_th in V, or rho_ins multiplier
    std::vector<int> n_fins{2, 6};
    Polarity polarity = Polarity::N;
    FinFETParams fet{};
    PTMParams ptm{};
    double vdd = 0.8;
    double i_lrs = 40e-6;      // window studies
    double i_hrs = 5e-6;
    double tol = 1e-6;
};

struct StudyTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;   // already formatted cells
};

/// One row per (axis value, n_fin) in axis-major order. Failures at a point
/// are written into that row's error column.
StudyTable sweep_study(const StudySpec& spec);

}  // namespace ptmsa
