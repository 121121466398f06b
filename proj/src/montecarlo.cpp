#include "ptmsa/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "ptmsa/errors.hpp"

namespace ptmsa {

namespace {

constexpr double kTruncation = 3.0;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Standard normal re-drawn until it lies within the truncation bound.
double truncated_normal(std::mt19937_64& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        const double z = normal(gen);
        if (std::abs(z) <= kTruncation) return z;
    }
}

std::string sense_error(std::string_view cell, const SenseMetrics& m, LogicOutcome expected) {
    return std::string(cell) + ": outcome " + std::string(to_string(m.outcome)) + ", expected " +
           std::string(to_string(expected));
}

McSample run_sample(TopologyKind kind, const McConfig& config, const TopologyParams& params,
                    const std::vector<VariedDevice>& devices, int index) {
    McSample s;
    s.draw = sample_parameters(config, params.ptm, devices, index);
    const TopologyParams drawn = apply_draw(params, s.draw);
    std::string_view phase = "lrs";
    try {
        SenseMetrics lrs = run_sense(kind, CellState::Lrs, drawn).metrics;
        const LogicOutcome want_lrs = expected_outcome(kind, CellState::Lrs);
        if (lrs.outcome != want_lrs) s.error = sense_error("lrs", lrs, want_lrs);
        else if (!lrs.delay) s.error = "lrs: " + lrs.note;
        s.lrs = std::move(lrs);

        phase = "hrs";
        const SenseMetrics hrs = run_sense(kind, CellState::Hrs, drawn).metrics;
        s.hrs_outcome = hrs.outcome;
        const LogicOutcome want_hrs = expected_outcome(kind, CellState::Hrs);
        if (s.error.empty() && hrs.outcome != want_hrs) s.error = sense_error("hrs", hrs, want_hrs);
    } catch (const Error& e) {
        s.error = std::string(phase) + ": " + e.what();
    }
    return s;
}

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string_view to_string(McFamily f) {
    switch (f) {
        case McFamily::VcImt: return "v_c_imt";
        case McFamily::LPtm: return "l_ptm";
        case McFamily::Vth: return "vth";
    }
    return "unknown";
}

McFamily parse_mc_family(std::string_view name) {
    for (McFamily f : {McFamily::VcImt, McFamily::LPtm, McFamily::Vth}) {
        if (to_string(f) == name) return f;
    }
    throw InvalidParams("unknown parameter family '" + std::string(name) + "'");
}

void McConfig::validate() const {
    if (n_samples < 1) throw InvalidParams("n_samples must be >= 1");
    if (!(sigma_v_c_imt >= 0.0 && sigma_l_ptm >= 0.0 && sigma_vth >= 0.0)) throw InvalidParams("sigmas must be >= 0");
    // A 3-sigma excursion must keep every length and voltage positive.
    if (!(kTruncation * sigma_v_c_imt < 1.0 && kTruncation * sigma_l_ptm < 1.0)) {
        throw InvalidParams("relative PTM sigmas must be < 1/3");
    }
    if (workers < 1) throw InvalidParams("workers must be >= 1");
}

std::vector<VariedDevice> varied_devices(TopologyKind kind, const TopologyParams& params) {
    if (!is_sense_amplifier(kind)) throw InvalidParams(std::string(to_string(kind)) + " is not a sense amplifier");
    const Topology t = build_topology(kind, params);
    std::vector<VariedDevice> out;
    if (is_proposed(kind)) {
        const bool nmos = is_hyper_nmos(kind);
        const FinFETParams& base = nmos ? params.nfet : params.pfet;
        for (const char* label : {nmos ? "N1" : "P1", nmos ? "N2" : "P2"}) {
            VariedDevice d{label, params.fins_for(label, 6), base.effective_vth()};
            // VSA variants have no physical mirror; its fins still set the gate levels.
            if (const Element* e = t.circuit.find("M" + d.label); e && std::holds_alternative<Fet>(*e)) {
                d.n_fin = std::get<Fet>(*e).params.n_fin;
                d.v_th = std::get<Fet>(*e).params.effective_vth();
            } else if (auto it = params.vth_shift.find(d.label); it != params.vth_shift.end()) {
                d.v_th += it->second;
            }
            out.push_back(std::move(d));
        }
        return out;
    }
    for (const Element& e : t.circuit.elements()) {
        if (const auto* f = std::get_if<Fet>(&e)) out.push_back({device_label(e), f->params.n_fin, f->params.effective_vth()});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
    return out;
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(master_seed ^ splitmix64(index));
}

ParameterDraw sample_parameters(const McConfig& config, const PTMParams& ptm, const std::vector<VariedDevice>& devices,
                                int index) {
    if (index < 0 || index >= config.n_samples) throw InvalidParams("sample index out of range");
    std::mt19937_64 gen(sample_seed(config.master_seed, static_cast<std::uint64_t>(index)));
    auto active = [&](McFamily f) { return config.mode == McMode::AllAtOnce || config.family == f; };

    ParameterDraw d;
    d.index = index;
    const double z_vc = truncated_normal(gen);
    const double z_l = truncated_normal(gen);
    d.v_c_imt = ptm.v_c_imt * (1.0 + (active(McFamily::VcImt) ? config.sigma_v_c_imt * z_vc : 0.0));
    d.l_ptm_factor = 1.0 + (active(McFamily::LPtm) ? config.sigma_l_ptm * z_l : 0.0);
    for (const auto& dev : devices) {
        const double z = truncated_normal(gen);
        const double sigma = config.sigma_vth * dev.v_th / std::sqrt(static_cast<double>(dev.n_fin));
        d.v_th.push_back({dev.label, dev.v_th, dev.v_th + (active(McFamily::Vth) ? sigma * z : 0.0), sigma});
    }
    return d;
}

TopologyParams apply_draw(const TopologyParams& params, const ParameterDraw& draw) {
    TopologyParams p = params;
    p.ptm.v_c_imt = draw.v_c_imt;
    p.ptm.length *= draw.l_ptm_factor;
    for (const auto& d : draw.v_th) p.vth_shift[d.label] += d.v_th - d.nominal;
    return p;
}

std::vector<McSample> run_mc(TopologyKind kind, const McConfig& config, const TopologyParams& params) {
    config.validate();
    const auto devices = varied_devices(kind, params);
    std::vector<McSample> samples(static_cast<std::size_t>(config.n_samples));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < config.n_samples; i = next++) {
            samples[static_cast<std::size_t>(i)] = run_sample(kind, config, params, devices, i);
        }
    };
    const int n_threads = std::min(config.workers, config.n_samples);
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    }
    return samples;
}

Histogram freedman_diaconis(std::vector<double> values) {
    if (values.empty()) throw InvalidParams("histogram of no values");
    std::sort(values.begin(), values.end());
    const double lo = values.front();
    const double hi = values.back();
    const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(values.size()));

    Histogram h;
    std::size_t bins = 1;
    if (width > 0.0 && hi > lo) {
        bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
        bins = std::clamp<std::size_t>(bins, 1, values.size());
    }
    const double step = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(i == bins ? hi : lo + step * static_cast<double>(i));
    h.counts.assign(bins, 0);
    for (double v : values) {
        std::size_t b = step > 0.0 ? static_cast<std::size_t>((v - lo) / step) : 0;
        h.counts[std::min(b, bins - 1)]++;
    }
    return h;
}

MetricSummary summarize_metric(const std::vector<double>& values) {
    if (values.empty()) throw InvalidParams("summary of no values");
    MetricSummary m;
    const auto n = static_cast<double>(values.size());
    for (double v : values) m.mean += v;
    m.mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.std = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    m.worst = *std::max_element(values.begin(), values.end());
    m.histogram = freedman_diaconis(values);
    return m;
}

McSummary summarize(const std::vector<McSample>& samples) {
    McSummary s;
    s.n_samples = static_cast<int>(samples.size());
    std::vector<double> delay, power, pdp;
    for (const auto& smp : samples) {
        if (!smp.ok() || !smp.lrs || !smp.lrs->delay) {
            s.n_failed++;
            continue;
        }
        delay.push_back(*smp.lrs->delay);
        power.push_back(smp.lrs->sensing_power);
        pdp.push_back(*smp.lrs->pdp);
    }
    if (delay.empty()) throw AllSamplesFailed("all " + std::to_string(s.n_samples) + " samples failed");
    s.delay = summarize_metric(delay);
    s.power = summarize_metric(power);
    s.pdp = summarize_metric(pdp);
    return s;
}

}  // namespace ptmsa
