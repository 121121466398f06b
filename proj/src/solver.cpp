#include "ptmsa/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ptmsa/errors.hpp"

namespace ptmsa {

namespace {

constexpr double kVoltageStepLimit = 0.3;  // V per Newton iteration, nonlinear circuits only
constexpr int kSourceSteps = 10;
constexpr int kMaxBacktracks = 8;
constexpr double kPseudoGStart = 1e-2;  // S
constexpr double kPseudoGEnd = 1e-10;
constexpr int kPseudoMaxSteps = 200;

struct DisjointSet {
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
    std::vector<std::size_t> parent;
};

}  // namespace

std::optional<std::size_t> TransientResult::find(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    return std::nullopt;
}

const std::vector<double>& TransientResult::column(std::string_view name) const {
    const auto i = find(name);
    if (!i) throw InvalidParams("no waveform column '" + std::string(name) + "'");
    return data[*i];
}

Simulator::Simulator(Circuit circuit) : circuit_(std::move(circuit)) {
    circuit_.validate();
    node_names_ = circuit_.node_names();
    const auto n = node_names_.size();

    // Slot n stands for ground in the DC-path connectivity check.
    DisjointSet dc_paths(n + 1);
    std::vector<bool> has_capacitor(n, false);
    gmin_nodes_.assign(n, false);
    auto idx = [&](const std::string& node) { return node_index(node); };
    auto slot = [&](int i) { return i < 0 ? n : static_cast<std::size_t>(i); };

    const auto& elements = circuit_.elements();
    for (std::size_t e = 0; e < elements.size(); ++e) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Resistor>) {
                    resistors_.push_back({idx(x.a), idx(x.b), x.ohms, e});
                    dc_paths.join(slot(idx(x.a)), slot(idx(x.b)));
                } else if constexpr (std::is_same_v<T, Capacitor>) {
                    capacitors_.push_back({idx(x.a), idx(x.b), x.farads, e});
                    for (int i : {idx(x.a), idx(x.b)}) {
                        if (i >= 0) has_capacitor[i] = true;
                    }
                } else if constexpr (std::is_same_v<T, VoltageSource>) {
                    vsources_.push_back({idx(x.pos), idx(x.neg), e});
                    vsource_names_.push_back(x.name);
                    dc_paths.join(slot(idx(x.pos)), slot(idx(x.neg)));
                } else if constexpr (std::is_same_v<T, CurrentSource>) {
                    isources_.push_back({idx(x.pos), idx(x.neg), e});
                } else if constexpr (std::is_same_v<T, Fet>) {
                    const FetRef f{idx(x.drain), idx(x.gate), idx(x.source), e};
                    fets_.push_back(f);
                    dc_paths.join(slot(f.d), slot(f.s));
                    for (int i : {f.d, f.g, f.s}) {
                        if (i >= 0) gmin_nodes_[i] = true;
                    }
                } else if constexpr (std::is_same_v<T, Ptm>) {
                    ptms_.push_back({idx(x.a), idx(x.b), e});
                    ptm_names_.push_back(x.name);
                    dc_paths.join(slot(idx(x.a)), slot(idx(x.b)));
                }
            },
            elements[e]);
    }

    dc_shunt_nodes_.assign(n, false);
    const auto ground = dc_paths.find(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (dc_paths.find(i) == ground) continue;
        if (!has_capacitor[i]) throw SingularStructure(node_names_[i]);
        dc_shunt_nodes_[i] = true;
    }
}

void Simulator::set_source_value(std::string_view source, double value) {
    Element* e = circuit_.find(source);
    if (auto* v = e ? std::get_if<VoltageSource>(e) : nullptr) {
        v->wave = SourceWaveform::dc(value);
    } else if (auto* i = e ? std::get_if<CurrentSource>(e) : nullptr) {
        i->wave = SourceWaveform::dc(value);
    } else {
        throw InvalidParams("no independent source '" + std::string(source) + "'");
    }
}

int Simulator::node_index(std::string_view node) const {
    if (is_ground(node)) return -1;
    for (std::size_t i = 0; i < node_names_.size(); ++i) {
        if (node_names_[i] == node) return static_cast<int>(i);
    }
    throw UnknownNode(std::string(node));
}

double Simulator::voltage(const SystemState& s, int node) const {
    return node < 0 ? 0.0 : s.node_voltages[node];
}

SystemState Simulator::initial_state() const {
    SystemState s;
    s.node_voltages.assign(node_names_.size(), 0.0);
    for (const auto& [node, v] : circuit_.initial_guess) s.node_voltages[node_index(node)] = v;
    s.branch_currents.assign(vsources_.size(), 0.0);
    s.capacitor_currents.assign(capacitors_.size(), 0.0);
    for (const auto& p : ptms_) s.ptm_states.push_back(std::get<Ptm>(circuit_.elements()[p.element]).initial_state);
    return s;
}

LinearSystem Simulator::assemble(const SystemState& x, const TimeContext& ctx) const {
    const auto n = node_names_.size();
    const auto dim = dimension();
    LinearSystem sys{Eigen::MatrixXd::Zero(dim, dim), Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
    auto& J = sys.jacobian;
    auto& F = sys.residual;
    auto& scale = sys.scale;
    const auto& elements = circuit_.elements();

    auto v = [&](int i) { return voltage(x, i); };
    auto add_conductance = [&](int a, int b, double g, double i) {
        if (a >= 0) {
            F[a] += i;
            scale[a] += std::abs(i);
            J(a, a) += g;
            if (b >= 0) J(a, b) -= g;
        }
        if (b >= 0) {
            F[b] -= i;
            scale[b] += std::abs(i);
            J(b, b) += g;
            if (a >= 0) J(b, a) -= g;
        }
    };

    for (const auto& r : resistors_) {
        const double g = 1.0 / r.value;
        add_conductance(r.a, r.b, g, g * (v(r.a) - v(r.b)));
    }

    for (std::size_t k = 0; k < ptms_.size(); ++k) {
        const auto& p = ptms_[k];
        const double g = 1.0 / ptm_resistance(std::get<Ptm>(elements[p.element]).params, x.ptm_states[k]);
        add_conductance(p.a, p.b, g, g * (v(p.a) - v(p.b)));
    }

    if (ctx.mode == TimeContext::Mode::Transient) {
        const bool trap = ctx.method == IntegrationMethod::Trapezoidal;
        for (std::size_t k = 0; k < capacitors_.size(); ++k) {
            const auto& c = capacitors_[k];
            const double g = (trap ? 2.0 : 1.0) * c.value / ctx.dt;
            const double v_prev = voltage(*ctx.previous, c.a) - voltage(*ctx.previous, c.b);
            double i = g * (v(c.a) - v(c.b) - v_prev);
            if (trap) i -= ctx.previous->capacitor_currents[k];
            add_conductance(c.a, c.b, g, i);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (dc_shunt_nodes_[i]) {
                const double g = circuit_.options.gmin > 0.0 ? circuit_.options.gmin : 1e-12;
                add_conductance(static_cast<int>(i), -1, g, g * x.node_voltages[i]);
            }
        }
        if (ctx.pseudo_g > 0.0 && ctx.previous) {
            for (std::size_t i = 0; i < n; ++i) {
                const double dv = x.node_voltages[i] - ctx.previous->node_voltages[i];
                add_conductance(static_cast<int>(i), -1, ctx.pseudo_g, ctx.pseudo_g * dv);
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (gmin_nodes_[i] && circuit_.options.gmin > 0.0) {
            const double g = circuit_.options.gmin;
            add_conductance(static_cast<int>(i), -1, g, g * x.node_voltages[i]);
        }
    }

    for (const auto& f : fets_) {
        const auto& params = std::get<Fet>(elements[f.element]).params;
        const FetCurrent c = finfet_current(params, v(f.g) - v(f.s), v(f.d) - v(f.s));
        const double dvs = -c.di_dvgs - c.di_dvds;
        if (f.d >= 0) {
            F[f.d] += c.id;
            scale[f.d] += std::abs(c.id);
            J(f.d, f.d) += c.di_dvds;
            if (f.g >= 0) J(f.d, f.g) += c.di_dvgs;
            if (f.s >= 0) J(f.d, f.s) += dvs;
        }
        if (f.s >= 0) {
            F[f.s] -= c.id;
            scale[f.s] += std::abs(c.id);
            if (f.d >= 0) J(f.s, f.d) -= c.di_dvds;
            if (f.g >= 0) J(f.s, f.g) -= c.di_dvgs;
            J(f.s, f.s) -= dvs;
        }
    }

    for (const auto& s : isources_) {
        const double i = ctx.source_scale * std::get<CurrentSource>(elements[s.element]).wave.value(ctx.time);
        if (s.a >= 0) {
            F[s.a] += i;
            scale[s.a] += std::abs(i);
        }
        if (s.b >= 0) {
            F[s.b] -= i;
            scale[s.b] += std::abs(i);
        }
    }

    for (std::size_t k = 0; k < vsources_.size(); ++k) {
        const auto& s = vsources_[k];
        const auto row = n + k;
        const double j = x.branch_currents[k];
        const double value = ctx.source_scale * std::get<VoltageSource>(elements[s.element]).wave.value(ctx.time);
        if (s.a >= 0) {
            F[s.a] += j;
            scale[s.a] += std::abs(j);
            J(s.a, row) += 1.0;
            J(row, s.a) += 1.0;
        }
        if (s.b >= 0) {
            F[s.b] -= j;
            scale[s.b] += std::abs(j);
            J(s.b, row) -= 1.0;
            J(row, s.b) -= 1.0;
        }
        F[row] = v(s.a) - v(s.b) - value;
        scale[row] = std::abs(v(s.a)) + std::abs(v(s.b)) + std::abs(value);
    }
    return sys;
}

bool Simulator::residual_converged(const LinearSystem& sys) const {
    const auto& o = circuit_.options;
    const auto n = node_names_.size();
    for (Eigen::Index i = 0; i < sys.residual.size(); ++i) {
        const double tol = static_cast<std::size_t>(i) < n ? o.abstol_current + o.reltol * sys.scale[i]
                                                           : o.vntol + o.reltol * sys.scale[i];
        if (!(std::abs(sys.residual[i]) <= tol)) return false;
    }
    return true;
}

double Simulator::residual_norm(const LinearSystem& sys) const {
    const auto& o = circuit_.options;
    const auto n = node_names_.size();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < sys.residual.size(); ++i) {
        const double tol = static_cast<std::size_t>(i) < n ? o.abstol_current + o.reltol * sys.scale[i]
                                                           : o.vntol + o.reltol * sys.scale[i];
        const double r = sys.residual[i] / tol;
        sum += r * r;
    }
    return std::sqrt(sum);
}

bool Simulator::newton(SystemState& x, const TimeContext& ctx) const {
    const auto& o = circuit_.options;
    const auto n = node_names_.size();
    const bool nonlinear = !fets_.empty();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;

    LinearSystem sys = assemble(x, ctx);
    double norm = residual_norm(sys);
    for (int iter = 0; iter < o.max_newton_iters; ++iter) {
        lu.compute(sys.jacobian);
        Eigen::VectorXd dx = lu.solve(-sys.residual);
        if (!dx.allFinite()) return false;

        if (nonlinear) {
            const double max_dv = n ? dx.head(n).cwiseAbs().maxCoeff() : 0.0;
            if (max_dv > kVoltageStepLimit) dx *= kVoltageStepLimit / max_dv;
        }

        // Backtrack while the weighted residual grows; breaks limit cycles around latches.
        SystemState trial = x;
        LinearSystem trial_sys;
        double trial_norm = 0.0;
        const Eigen::VectorXd full = dx;
        for (int cut = 0;; ++cut) {
            if (cut > kMaxBacktracks) dx = full;   // no descent found: take the plain step
            for (std::size_t i = 0; i < n; ++i) trial.node_voltages[i] = x.node_voltages[i] + dx[i];
            for (std::size_t k = 0; k < vsources_.size(); ++k) trial.branch_currents[k] = x.branch_currents[k] + dx[n + k];
            trial_sys = assemble(trial, ctx);
            trial_norm = residual_norm(trial_sys);
            if (!nonlinear || trial_norm <= norm || cut > kMaxBacktracks) break;
            dx *= 0.5;
        }

        bool step_small = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double tol = o.reltol * std::max(std::abs(x.node_voltages[i]), std::abs(trial.node_voltages[i])) + o.vntol;
            if (std::abs(dx[i]) > tol) step_small = false;
        }
        for (std::size_t k = 0; k < vsources_.size(); ++k) {
            const double tol =
                o.reltol * std::max(std::abs(x.branch_currents[k]), std::abs(trial.branch_currents[k])) + o.abstol_current;
            if (std::abs(dx[n + k]) > tol) step_small = false;
        }
        x = std::move(trial);
        sys = std::move(trial_sys);
        norm = trial_norm;
        if (step_small && residual_converged(sys)) return true;
    }
    return false;
}

bool Simulator::pseudo_transient(SystemState& x, const TimeContext& ctx) const {
    // Every node is tied to its previous value through pseudo_g; the tie is
    // relaxed geometrically, which follows a power-up from the zero state.
    double g = kPseudoGStart;
    for (int step = 0; step < kPseudoMaxSteps; ++step) {
        if (g < kPseudoGEnd) return newton(x, ctx);
        const SystemState prev = x;
        TimeContext tied = ctx;
        tied.pseudo_g = g;
        tied.previous = &prev;
        if (newton(x, tied)) {
            g *= 0.25;
        } else {
            x = prev;
            g *= 8.0;
            if (g > kPseudoGStart * 1e3) return false;
        }
    }
    return false;
}

SystemState Simulator::solve_dc_states_fixed(const SystemState& guess) const {
    SystemState x = guess;
    const TimeContext ctx = TimeContext::dc(x.time);
    if (newton(x, ctx)) return x;

    auto zero = [&] {
        x = guess;
        std::fill(x.node_voltages.begin(), x.node_voltages.end(), 0.0);
        std::fill(x.branch_currents.begin(), x.branch_currents.end(), 0.0);
    };
    zero();
    if (pseudo_transient(x, ctx)) return x;

    // Source stepping: ramp every independent source from 10% to 100%.
    zero();
    for (int step = 1; step <= kSourceSteps; ++step) {
        TimeContext scaled = ctx;
        scaled.source_scale = static_cast<double>(step) / kSourceSteps;
        if (!newton(x, scaled)) {
            throw NewtonDivergence("DC operating point did not converge (source stepping failed at " +
                                   std::to_string(10 * step) + "%)");
        }
    }
    return x;
}

std::vector<PtmState> Simulator::next_states(const SystemState& s) const {
    std::vector<PtmState> next(ptms_.size());
    for (std::size_t k = 0; k < ptms_.size(); ++k) {
        const auto& params = std::get<Ptm>(circuit_.elements()[ptms_[k].element]).params;
        next[k] = ptm_next_state(params, s.ptm_states[k], ptm_voltage(s, k), ptm_current(s, k));
    }
    return next;
}

SystemState Simulator::resolve_device_states(const SystemState& converged, const TimeContext& ctx,
                                             std::vector<PtmEvent>* events) const {
    SystemState x = converged;
    const auto& o = circuit_.options;
    for (int iter = 0; iter <= o.max_state_resolution_iters; ++iter) {
        const auto next = next_states(x);
        if (next == x.ptm_states) return x;
        if (iter == o.max_state_resolution_iters) break;
        for (std::size_t k = 0; k < next.size(); ++k) {
            if (next[k] != x.ptm_states[k] && events) {
                events->push_back({ctx.time, ptm_names_[k], x.ptm_states[k], next[k], ptm_voltage(x, k),
                                   ptm_current(x, k)});
            }
        }
        x.ptm_states = next;
        if (ctx.mode == TimeContext::Mode::Dc) {
            x = solve_dc_states_fixed(x);
        } else if (!newton(x, ctx)) {
            throw StepFailure(ctx.time, "Newton failed after a PTM transition");
        }
    }
    throw StateChatter("PTM states did not reach a fixed point at t=" + std::to_string(ctx.time) + " s");
}

SystemState Simulator::solve_dc(const SystemState& initial, std::vector<PtmEvent>* events) const {
    SystemState x = initial;
    x.time = 0.0;
    x = solve_dc_states_fixed(x);
    std::vector<PtmEvent> local;
    try {
        x = resolve_device_states(x, TimeContext::dc(0.0), &local);
    } catch (const StateChatter&) {
        throw NoConsistentState("no consistent PTM state assignment at the DC operating point");
    }
    if (events) events->insert(events->end(), local.begin(), local.end());
    std::fill(x.capacitor_currents.begin(), x.capacitor_currents.end(), 0.0);
    return x;
}

namespace {

void update_capacitor_currents(SystemState& x, const SystemState& prev, double dt, IntegrationMethod m,
                               const std::vector<double>& farads, const std::vector<double>& v_now,
                               const std::vector<double>& v_prev) {
    for (std::size_t k = 0; k < farads.size(); ++k) {
        if (m == IntegrationMethod::Trapezoidal) {
            x.capacitor_currents[k] = 2.0 * farads[k] / dt * (v_now[k] - v_prev[k]) - prev.capacitor_currents[k];
        } else {
            x.capacitor_currents[k] = farads[k] / dt * (v_now[k] - v_prev[k]);
        }
    }
}

}  // namespace

SystemState Simulator::step_transient(const SystemState& state, double dt, std::vector<PtmEvent>* events) const {
    const auto& o = circuit_.options;
    if (!(dt >= o.dt_min)) throw StepFailure(state.time, "dt below dt_min");
    const TimeContext ctx = TimeContext::transient(state, dt, o.integration_method);
    SystemState x = state;
    x.time = ctx.time;
    if (!newton(x, ctx)) throw StepFailure(ctx.time, "Newton did not converge");
    try {
        x = resolve_device_states(x, ctx, events);
    } catch (const StateChatter& e) {
        throw StepFailure(ctx.time, e.what());
    }
    std::vector<double> farads, v_now, v_prev;
    for (const auto& c : capacitors_) {
        farads.push_back(c.value);
        v_now.push_back(voltage(x, c.a) - voltage(x, c.b));
        v_prev.push_back(voltage(state, c.a) - voltage(state, c.b));
    }
    update_capacitor_currents(x, state, dt, o.integration_method, farads, v_now, v_prev);
    return x;
}

TransientResult Simulator::run_transient(double t_end) const {
    if (!(t_end > 0.0)) throw InvalidParams("t_end must be > 0");
    const auto& o = circuit_.options;
    const auto& elements = circuit_.elements();

    TransientResult result;
    for (const auto& node : node_names_) result.columns.push_back("v(" + node + ")");
    for (const auto& s : vsources_) result.columns.push_back("i(" + element_name(elements[s.element]) + ")");
    for (const auto& s : isources_) result.columns.push_back("i(" + element_name(elements[s.element]) + ")");
    for (const auto& name : ptm_names_) result.columns.push_back("i(" + name + ")");
    for (const auto& name : ptm_names_) result.columns.push_back("s(" + name + ")");
    result.data.resize(result.columns.size());

    auto record = [&](const SystemState& s) {
        result.time.push_back(s.time);
        std::size_t c = 0;
        for (double v : s.node_voltages) result.data[c++].push_back(v);
        for (double j : s.branch_currents) result.data[c++].push_back(j);
        for (const auto& src : isources_) {
            result.data[c++].push_back(std::get<CurrentSource>(elements[src.element]).wave.value(s.time));
        }
        for (std::size_t k = 0; k < ptms_.size(); ++k) result.data[c++].push_back(ptm_current(s, k));
        for (auto st : s.ptm_states) result.data[c++].push_back(st == PtmState::Metallic ? 1.0 : 0.0);
    };

    std::vector<double> breakpoints;
    auto collect = [&](const SourceWaveform& w) {
        for (const auto& p : w.points()) {
            if (p.t > 0.0 && p.t < t_end) breakpoints.push_back(p.t);
        }
    };
    for (const auto& s : vsources_) collect(std::get<VoltageSource>(elements[s.element]).wave);
    for (const auto& s : isources_) collect(std::get<CurrentSource>(elements[s.element]).wave);
    breakpoints.push_back(t_end);
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    SystemState state = solve_dc(initial_state(), &result.events);
    record(state);

    std::vector<double> farads;
    for (const auto& c : capacitors_) farads.push_back(c.value);
    auto cap_voltages = [&](const SystemState& s) {
        std::vector<double> v;
        v.reserve(capacitors_.size());
        for (const auto& c : capacitors_) v.push_back(voltage(s, c.a) - voltage(s, c.b));
        return v;
    };

    double dt = o.dt_initial;
    bool have_history = false;
    bool localizing_event = false;
    std::vector<double> prev_voltages;
    double prev_h = 0.0;
    std::size_t next_bp = 0;
    const double t_eps = 1e-9 * o.dt_min;

    while (state.time < t_end - t_eps) {
        while (next_bp < breakpoints.size() && breakpoints[next_bp] <= state.time + t_eps) ++next_bp;
        const double bp = breakpoints[next_bp];
        double h = std::min(dt, bp - state.time);
        if (bp - (state.time + h) < o.dt_min) h = bp - state.time;
        const bool lands_on_bp = state.time + h >= bp - t_eps;

        const TimeContext ctx = TimeContext::transient(state, h, o.integration_method);
        SystemState x = state;
        x.time = lands_on_bp ? bp : ctx.time;
        if (!newton(x, ctx)) {
            if (h <= o.dt_min * (1.0 + 1e-9)) throw StepFailure(state.time, "Newton did not converge at dt_min");
            dt = std::max(0.5 * h, o.dt_min);
            have_history = false;
            continue;
        }

        const bool fires = next_states(x) != x.ptm_states;
        if (fires) {
            if (h > o.dt_min * (1.0 + 1e-9)) {
                dt = std::max(0.5 * h, o.dt_min);
                localizing_event = true;
                continue;
            }
            try {
                x = resolve_device_states(x, ctx, &result.events);
            } catch (const StateChatter& e) {
                throw StepFailure(x.time, e.what());
            }
        }

        double lte = 0.0;
        if (o.adaptive && have_history && !fires) {
            for (std::size_t i = 0; i < x.node_voltages.size(); ++i) {
                const double slope = (state.node_voltages[i] - prev_voltages[i]) / prev_h;
                const double predicted = state.node_voltages[i] + slope * h;
                lte = std::max(lte, std::abs(x.node_voltages[i] - predicted) * h / (h + prev_h));
            }
            if (lte > o.lte_tol && h > o.dt_min * (1.0 + 1e-9)) {
                dt = std::max(o.dt_min, h * std::max(0.25, 0.9 * std::sqrt(o.lte_tol / lte)));
                continue;
            }
        }

        update_capacitor_currents(x, state, h, o.integration_method, farads, cap_voltages(x), cap_voltages(state));
        prev_voltages = state.node_voltages;
        prev_h = h;
        state = std::move(x);
        record(state);

        if (fires || lands_on_bp) {
            dt = o.dt_initial;
            have_history = false;
            localizing_event = false;
        } else if (localizing_event) {
            dt = h;
        } else if (o.adaptive) {
            const double growth = have_history ? std::clamp(0.9 * std::sqrt(o.lte_tol / std::max(lte, 1e-300)), 1.0, 2.0)
                                               : 1.0;
            dt = std::min(o.dt_max, h * growth);
            have_history = true;
        } else {
            dt = o.dt_initial;
            have_history = true;
        }
    }
    return result;
}

double Simulator::node_voltage(const SystemState& s, std::string_view node) const {
    return voltage(s, node_index(node));
}

double Simulator::ptm_voltage(const SystemState& s, std::size_t k) const {
    return voltage(s, ptms_[k].a) - voltage(s, ptms_[k].b);
}

double Simulator::ptm_current(const SystemState& s, std::size_t k) const {
    const auto& params = std::get<Ptm>(circuit_.elements()[ptms_[k].element]).params;
    return ptm_voltage(s, k) / ptm_resistance(params, s.ptm_states[k]);
}

double Simulator::element_current(const SystemState& s, std::string_view name) const {
    const Element* e = circuit_.find(name);
    if (!e) throw InvalidParams("no element '" + std::string(name) + "'");
    const auto& elements = circuit_.elements();
    const auto index = static_cast<std::size_t>(e - elements.data());
    for (std::size_t k = 0; k < vsources_.size(); ++k) {
        if (vsources_[k].element == index) return s.branch_currents[k];
    }
    for (std::size_t k = 0; k < ptms_.size(); ++k) {
        if (ptms_[k].element == index) return ptm_current(s, k);
    }
    for (const auto& r : resistors_) {
        if (r.element == index) return (voltage(s, r.a) - voltage(s, r.b)) / r.value;
    }
    for (const auto& src : isources_) {
        if (src.element == index) return std::get<CurrentSource>(*e).wave.value(s.time);
    }
    for (const auto& f : fets_) {
        if (f.element == index) {
            return finfet_current(std::get<Fet>(*e).params, voltage(s, f.g) - voltage(s, f.s),
                                  voltage(s, f.d) - voltage(s, f.s)).id;
        }
    }
    for (std::size_t k = 0; k < capacitors_.size(); ++k) {
        if (capacitors_[k].element == index) return s.capacitor_currents[k];
    }
    throw InvalidParams("element '" + std::string(name) + "' has no current");
}

double Simulator::power_balance(const SystemState& s) const {
    const auto& elements = circuit_.elements();
    double total = 0.0;
    for (const auto& r : resistors_) {
        const double v = voltage(s, r.a) - voltage(s, r.b);
        total += v * v / r.value;
    }
    for (std::size_t k = 0; k < ptms_.size(); ++k) total += ptm_voltage(s, k) * ptm_current(s, k);
    for (const auto& f : fets_) {
        const double vds = voltage(s, f.d) - voltage(s, f.s);
        total += vds * finfet_current(std::get<Fet>(elements[f.element]).params, voltage(s, f.g) - voltage(s, f.s), vds).id;
    }
    for (std::size_t k = 0; k < vsources_.size(); ++k) {
        total += (voltage(s, vsources_[k].a) - voltage(s, vsources_[k].b)) * s.branch_currents[k];
    }
    for (const auto& src : isources_) {
        total += (voltage(s, src.a) - voltage(s, src.b)) * std::get<CurrentSource>(elements[src.element]).wave.value(s.time);
    }
    for (std::size_t k = 0; k < capacitors_.size(); ++k) {
        total += (voltage(s, capacitors_[k].a) - voltage(s, capacitors_[k].b)) * s.capacitor_currents[k];
    }
    for (std::size_t i = 0; i < node_names_.size(); ++i) {
        double g = 0.0;
        if (gmin_nodes_[i]) g += circuit_.options.gmin;
        total += g * s.node_voltages[i] * s.node_voltages[i];
    }
    return total;
}

}  // namespace ptmsa
