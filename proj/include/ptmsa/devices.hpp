#pragma once

#include <string_view>

namespace ptmsa {

enum class Polarity { N, P };

std::string_view to_string(Polarity p);

/// Smooth single-expression FinFET model.
///
/// Overdrive uses a softplus interpolation between subthreshold and strong
/// inversion; the drain dependence is a tanh saturation with a linear
/// output-conductance term. Drain and source are interchangeable: for
/// V_DS < 0 the terminals swap roles, which keeps the current odd in V_DS.
struct FinFETParams {
    Polarity polarity = Polarity::N;
    double v_th = 0.2;         // V, magnitude
    double delta_v_th = 0.0;   // V, added to v_th
    int n_fin = 1;
    double k = 111e-6;         // A/V^2 per fin
    double n_ss = 1.2;
    double phi_t = 0.02585;    // V
    double alpha_sat = 2.0;
    double lambda_clm = 0.1;   // 1/V

    double effective_vth() const { return v_th + delta_v_th; }
    void validate() const;

    bool operator==(const FinFETParams&) const = default;
};

struct FetCurrent {
    double id = 0.0;      // current into the drain terminal
    double di_dvgs = 0.0;
    double di_dvds = 0.0;
};

/// Drain current and its analytic partials. For p-type devices both
/// terminal voltages are mirrored, so a conducting PMOS has id < 0.
FetCurrent finfet_current(const FinFETParams& params, double v_gs, double v_ds);

enum class PtmState { Insulating, Metallic };

std::string_view to_string(PtmState s);

struct PTMParams {
    double rho_ins = 1.65e-3;   // ohm*m
    double rho_met = 3.3e-5;    // ohm*m
    double length = 20e-9;      // m
    double area = 1e-16;        // m^2
    double v_c_imt = 0.336;     // V
    double i_c_mit = 5e-6;      // A

    double r_ins() const { return rho_ins * length / area; }
    double r_met() const { return rho_met * length / area; }
    double v_c_mit() const { return i_c_mit * r_met(); }
    void validate() const;

    bool operator==(const PTMParams&) const = default;
};

double ptm_resistance(const PTMParams& params, PtmState state);

/// Sticky two-state transition rule evaluated on a converged solution.
PtmState ptm_next_state(const PTMParams& params, PtmState state, double v_ptm, double i_ptm);

struct HyperFetBranch {
    double i_branch = 0.0;    // current from the drain terminal toward the external source
    double v_internal = 0.0;  // node between the host source and the PTM
};

/// FET with a PTM of frozen state between its source and the external
/// source terminal. Solves the single internal node by bracketed Newton.
HyperFetBranch hyperfet_branch_solve(const FinFETParams& fet, const PTMParams& ptm, PtmState state,
                                     double v_g, double v_d, double v_s_ext, double abstol_current = 1e-12);

/// |V_GS| at which a diode-connected device (V_DS = V_GS) carries `current`,
/// by bisection on [0, v_max]. Throws OutOfRange when not reachable.
double diode_vgs(const FinFETParams& fet, double current, double v_max, double tol = 1e-9);

}  // namespace ptmsa
