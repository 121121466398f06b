#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptmsa/analysis.hpp"

namespace ptmsa {

enum class McMode { AllAtOnce, OneAtATime };
enum class McFamily { VcImt, LPtm, Vth };

std::string_view to_string(McFamily f);
McFamily parse_mc_family(std::string_view name);

/// Relative sigmas are fractions of the nominal value. Every draw is a
/// Gaussian truncated at exactly +-3 sigma by rejection.
struct McConfig {
    int n_samples = 1000;
    std::uint64_t master_seed = 1;
    double sigma_v_c_imt = 0.03;
    double sigma_l_ptm = 0.03;
    double sigma_vth = 0.035;   // single fin; scaled by 1/sqrt(n_fin)
    McMode mode = McMode::AllAtOnce;
    McFamily family = McFamily::Vth;   // the varied family in one-at-a-time mode
    int workers = 1;

    void validate() const;
};

struct VariedDevice {
    std::string label;
    int n_fin = 1;
    double v_th = 0.2;   // nominal magnitude, including any configured shift
};

/// Devices whose V_th varies: the mirror and host (P1, P2 or N1, N2) of the
/// proposed amplifiers, every transistor of the conventional ones.
std::vector<VariedDevice> varied_devices(TopologyKind kind, const TopologyParams& params);

struct DeviceDraw {
    std::string label;
    double nominal = 0.0;
    double v_th = 0.0;
    double sigma = 0.0;
};

struct ParameterDraw {
    int index = 0;
    double v_c_imt = 0.0;
    double l_ptm_factor = 1.0;   // multiplies the PTM length, so R_INS and R_MET
    std::vector<DeviceDraw> v_th;
};

/// Generator state for one sample: splitmix64(master_seed ^ splitmix64(index)).
std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index);

/// Pure function of (master_seed, index); draws follow a fixed order
/// (V_C_IMT, L_ptm, then devices in the given order) in every mode.
ParameterDraw sample_parameters(const McConfig& config, const PTMParams& ptm, const std::vector<VariedDevice>& devices,
                                int index);

/// Topology parameters with a draw applied.
TopologyParams apply_draw(const TopologyParams& params, const ParameterDraw& draw);

struct McSample {
    ParameterDraw draw;
    std::optional<SenseMetrics> lrs;
    LogicOutcome hrs_outcome = LogicOutcome::Indeterminate;
    std::string error;   // empty for a successful sample

    bool ok() const { return error.empty(); }
};

/// Samples in index order; identical for any worker count.
std::vector<McSample> run_mc(TopologyKind kind, const McConfig& config, const TopologyParams& params = {});

struct Histogram {
    std::vector<double> edges;   // counts.size() + 1 ascending edges
    std::vector<int> counts;
};

/// Freedman-Diaconis bins (width 2 IQR / cbrt(n)); a single bin when the width vanishes.
Histogram freedman_diaconis(std::vector<double> values);

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;     // sample standard deviation, 0 for one value
    double worst = 0.0;   // maximum
    Histogram histogram;
};

struct McSummary {
    int n_samples = 0;
    int n_failed = 0;
    MetricSummary delay;
    MetricSummary power;
    MetricSummary pdp;
};

MetricSummary summarize_metric(const std::vector<double>& values);

/// Statistics over the successful samples. Throws AllSamplesFailed.
McSummary summarize(const std::vector<McSample>& samples);

}  // namespace ptmsa
