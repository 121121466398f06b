#include "ptmsa/devices.hpp"

#include <algorithm>
#include <cmath>

#include "ptmsa/errors.hpp"

namespace ptmsa {

std::string_view to_string(Polarity p) { return p == Polarity::N ? "n" : "p"; }

std::string_view to_string(PtmState s) { return s == PtmState::Insulating ? "ins" : "met"; }

void FinFETParams::validate() const {
    if (n_fin < 1) throw InvalidParams("n_fin must be >= 1");
    if (!(k > 0.0)) throw InvalidParams("k must be > 0");
    if (!(n_ss >= 1.0)) throw InvalidParams("n_ss must be >= 1");
    if (!(lambda_clm >= 0.0)) throw InvalidParams("lambda_clm must be >= 0");
    if (!(phi_t > 0.0)) throw InvalidParams("phi_t must be > 0");
    if (!(alpha_sat > 0.0)) throw InvalidParams("alpha_sat must be > 0");
    if (!std::isfinite(v_th) || !std::isfinite(delta_v_th)) throw InvalidParams("v_th must be finite");
}

namespace {

double softplus(double u) { return u > 40.0 ? u : std::log1p(std::exp(u)); }

double logistic(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

// n-type orientation, v_ds >= 0.
FetCurrent forward_current(const FinFETParams& p, double v_gs, double v_ds) {
    // The softplus scale is 2*n_ss*phi_t so that V_ov^2 gives a subthreshold
    // slope of n_ss*phi_t*ln(10) per decade.
    const double scale = 2.0 * p.n_ss * p.phi_t;
    const double u = (v_gs - p.effective_vth()) / scale;
    const double vov = scale * softplus(u);
    const double dvov = logistic(u);

    const bool ov_limited = vov > p.phi_t;
    const double m = ov_limited ? vov : p.phi_t;
    const double dm = ov_limited ? dvov : 0.0;

    const double a = p.alpha_sat * v_ds / m;
    const double t = std::tanh(a);
    const double sech2 = 1.0 - t * t;
    const double clm = 1.0 + p.lambda_clm * v_ds;
    const double gain = p.n_fin * p.k;

    FetCurrent r;
    r.id = gain * vov * vov * t * clm;
    const double da_dvgs = -p.alpha_sat * v_ds / (m * m) * dm;
    r.di_dvgs = gain * (2.0 * vov * dvov * t * clm + vov * vov * sech2 * da_dvgs * clm);
    r.di_dvds = gain * vov * vov * (sech2 * (p.alpha_sat / m) * clm + t * p.lambda_clm);
    return r;
}

FetCurrent ntype_current(const FinFETParams& p, double v_gs, double v_ds) {
    if (v_ds >= 0.0) return forward_current(p, v_gs, v_ds);
    // Reverse operation: the drain acts as source.
    const FetCurrent f = forward_current(p, v_gs - v_ds, -v_ds);
    FetCurrent r;
    r.id = -f.id;
    r.di_dvgs = -f.di_dvgs;
    r.di_dvds = f.di_dvgs + f.di_dvds;
    return r;
}

}  // namespace

FetCurrent finfet_current(const FinFETParams& params, double v_gs, double v_ds) {
    if (params.polarity == Polarity::N) return ntype_current(params, v_gs, v_ds);
    const FetCurrent f = ntype_current(params, -v_gs, -v_ds);
    return FetCurrent{-f.id, f.di_dvgs, f.di_dvds};
}

void PTMParams::validate() const {
    if (!(rho_met > 0.0)) throw InvalidParams("rho_met must be > 0");
    if (!(rho_ins > rho_met)) throw InvalidParams("rho_ins must exceed rho_met");
    if (!(length > 0.0) || !(area > 0.0)) throw InvalidParams("PTM length and area must be > 0");
    if (!(i_c_mit > 0.0)) throw InvalidParams("i_c_mit must be > 0");
    if (!(v_c_mit() < v_c_imt)) throw InvalidParams("V_C-MIT must be below V_C-IMT");
}

double ptm_resistance(const PTMParams& params, PtmState state) {
    return state == PtmState::Insulating ? params.r_ins() : params.r_met();
}

PtmState ptm_next_state(const PTMParams& params, PtmState state, double v_ptm, double i_ptm) {
    if (state == PtmState::Insulating) {
        return std::abs(v_ptm) >= params.v_c_imt ? PtmState::Metallic : PtmState::Insulating;
    }
    return std::abs(i_ptm) <= params.i_c_mit ? PtmState::Insulating : PtmState::Metallic;
}

HyperFetBranch hyperfet_branch_solve(const FinFETParams& fet, const PTMParams& ptm, PtmState state, double v_g,
                                     double v_d, double v_s_ext, double abstol_current) {
    if (fet.polarity == Polarity::P) {
        FinFETParams mirrored = fet;
        mirrored.polarity = Polarity::N;
        const HyperFetBranch r = hyperfet_branch_solve(mirrored, ptm, state, -v_g, -v_d, -v_s_ext, abstol_current);
        return {-r.i_branch, -r.v_internal};
    }

    const double r_ptm = ptm_resistance(ptm, state);
    // Residual is strictly decreasing in the internal node voltage.
    auto residual = [&](double v) {
        const FetCurrent f = finfet_current(fet, v_g - v, v_d - v);
        const double value = f.id - (v - v_s_ext) / r_ptm;
        const double slope = -f.di_dvgs - f.di_dvds - 1.0 / r_ptm;
        return std::pair{value, slope};
    };

    double lo = std::min(v_d, v_s_ext);
    double hi = std::max(v_d, v_s_ext);
    if (hi == lo) return {0.0, v_s_ext};
    auto [f_lo, s_lo] = residual(lo);
    auto [f_hi, s_hi] = residual(hi);
    if (f_lo < 0.0 || f_hi > 0.0) {
        if (std::abs(f_lo) <= abstol_current) return {(lo - v_s_ext) / r_ptm, lo};
        if (std::abs(f_hi) <= abstol_current) return {(hi - v_s_ext) / r_ptm, hi};
        throw BracketFailure("hyper-FET internal node is not bracketed");
    }

    double v = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        auto [f, slope] = residual(v);
        if (std::abs(f) <= abstol_current) break;
        if (f > 0.0) lo = v; else hi = v;
        double next = v - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(v))) {
            v = next;
            break;
        }
        v = next;
    }
    return {(v - v_s_ext) / r_ptm, v};
}

double diode_vgs(const FinFETParams& fet, double current, double v_max, double tol) {
    if (!(current > 0.0)) throw InvalidParams("diode current must be > 0");
    FinFETParams n = fet;
    n.polarity = Polarity::N;
    auto id = [&](double v) { return finfet_current(n, v, v).id; };
    if (id(v_max) < current) {
        throw OutOfRange("diode current " + std::to_string(current) + " A not reachable below |V_GS| = " +
                         std::to_string(v_max) + " V");
    }
    double lo = 0.0;
    double hi = v_max;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (id(mid) < current) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace ptmsa
