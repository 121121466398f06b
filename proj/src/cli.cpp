#include "ptmsa/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "ptmsa/errors.hpp"
#include "ptmsa/formats.hpp"
#include "ptmsa/montecarlo.hpp"
#include "ptmsa/netlist.hpp"

namespace ptmsa {

namespace {

namespace fs = std::filesystem;

struct Flags {
    std::string topology;
    std::string netlist;
    std::string cell = "lrs";
    std::vector<std::string> sets;
    int samples = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
    std::string method;

    double tstop = 0.0;
    std::string source;
    double from = 0.0;
    double to = 0.8;
    int points = 81;
    std::string probe;
    std::string study;
    std::string axis;
    std::string fins;
    std::string polarity = "n";
    std::string mode = "all-at-once";
    std::string family = "vth";
};

struct Context {
    const Flags& flags;
    std::ostream& out;
};

double number(std::string_view text, std::string_view what) {
    const auto v = parse_number(text);
    if (!v) throw InvalidParams("malformed " + std::string(what) + " '" + std::string(text) + "'");
    return *v;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) return parts;
        start = pos + 1;
    }
}

Polarity polarity(const Flags& f) {
    if (f.polarity == "n") return Polarity::N;
    if (f.polarity == "p") return Polarity::P;
    throw InvalidParams("--polarity must be n or p");
}

CellState cell(const Flags& f) {
    if (f.cell == "lrs") return CellState::Lrs;
    if (f.cell == "hrs") return CellState::Hrs;
    throw InvalidParams("--cell must be lrs or hrs");
}

TopologyParams params_from(const Flags& f) {
    TopologyParams p;
    for (const auto& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw InvalidParams("--set expects key=value, got '" + s + "'");
        p.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!f.method.empty()) p.set("options.method", f.method);
    return p;
}

std::optional<TopologyKind> topology_kind(const Flags& f) {
    if (f.topology.empty()) return std::nullopt;
    return parse_topology_kind(f.topology);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidParams("cannot read netlist '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Circuit from exactly one of --netlist and --topology. SA topologies get the
// control waveforms of one cycle for --cell.
struct Input {
    Circuit circuit;
    std::optional<Topology> topology;
};

Input load_input(const Flags& f) {
    if (f.netlist.empty() == f.topology.empty()) throw InvalidParams("give exactly one of --netlist and --topology");
    if (!f.netlist.empty()) {
        Circuit c = parse_netlist(read_text(f.netlist));
        // Only solver options can be overridden on a netlist.
        TopologyParams p;
        p.options = c.options;
        for (const auto& s : f.sets) {
            if (s.rfind("options.", 0) != 0) throw InvalidParams("--set on a netlist accepts options.* keys only");
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw InvalidParams("--set expects key=value, got '" + s + "'");
            p.set(s.substr(0, eq), s.substr(eq + 1));
        }
        if (!f.method.empty()) p.set("options.method", f.method);
        p.options.validate();
        c.options = p.options;
        return {std::move(c), std::nullopt};
    }
    const TopologyKind kind = parse_topology_kind(f.topology);
    Topology t = build_topology(kind, params_from(f));
    if (is_sense_amplifier(kind)) t.schedule.apply(t.circuit, cell(f));
    Circuit c = t.circuit;
    return {std::move(c), std::move(t)};
}

fs::path output_dir(const Flags& f) {
    fs::path dir = f.out;
    if (dir.empty()) {
        const char* env = std::getenv("PTMSA_OUT");
        dir = env && *env ? fs::path(env) : fs::path(".");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw InvalidParams("output directory '" + dir.string() + "' is not usable");
    return dir;
}

void emit(const Context& ctx, const std::string& name, std::string_view content) {
    const fs::path path = output_dir(ctx.flags) / name;
    write_file_atomic(path, content);
    ctx.out << "wrote " << path.string() << '\n';
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void run_dc(const Context& ctx) {
    const Input in = load_input(ctx.flags);
    const Simulator sim(in.circuit);
    std::vector<PtmEvent> events;
    const SystemState s = sim.solve_dc(sim.initial_state(), &events);
    emit(ctx, "dc.json", dump(dc_json(sim, s, events)));
}

void run_tran(const Context& ctx) {
    const Input in = load_input(ctx.flags);
    double tstop = ctx.flags.tstop;
    if (!(tstop > 0.0)) {
        if (!in.topology || !is_sense_amplifier(in.topology->kind)) throw InvalidParams("tran needs --tstop > 0");
        tstop = in.topology->schedule.t_cycle;
    }
    const Simulator sim(in.circuit);
    emit(ctx, "tran.csv", waveform_csv(sim.run_transient(tstop)));
}

std::vector<double> study_axis(const Flags& f, StudyKind kind) {
    if (f.axis.empty()) {
        std::vector<double> axis;
        if (kind == StudyKind::ImtVsRhoIns) {
            for (int i = 0; i <= 12; ++i) axis.push_back(std::pow(10.0, -1.0 + i / 6.0));
        } else {
            for (int i = 0; i <= 8; ++i) axis.push_back(-0.1 + 0.025 * i);
        }
        return axis;
    }
    if (f.axis.find(':') != std::string::npos) {
        const auto parts = split(f.axis, ':');
        if (parts.size() != 3) throw InvalidParams("--axis expects lo:hi:n or a comma list");
        const double lo = number(parts[0], "axis start");
        const double hi = number(parts[1], "axis end");
        const double n = number(parts[2], "axis count");
        if (n < 2 || n != std::floor(n)) throw InvalidParams("axis count must be an integer >= 2");
        std::vector<double> axis;
        for (int i = 0; i < static_cast<int>(n); ++i) axis.push_back(lo + (hi - lo) * i / (n - 1));
        return axis;
    }
    std::vector<double> axis;
    for (const auto& p : split(f.axis, ',')) axis.push_back(number(p, "axis value"));
    return axis;
}

void run_sweep(const Context& ctx) {
    const Flags& f = ctx.flags;
    if (!f.study.empty()) {
        if (!f.source.empty()) throw InvalidParams("--study and --source are exclusive");
        const TopologyParams p = params_from(f);
        StudySpec spec;
        spec.kind = parse_study_kind(f.study);
        spec.axis = study_axis(f, spec.kind);
        if (!f.fins.empty()) {
            spec.n_fins.clear();
            for (const auto& s : split(f.fins, ',')) spec.n_fins.push_back(static_cast<int>(number(s, "fin count")));
        }
        spec.polarity = polarity(f);
        spec.fet = spec.polarity == Polarity::N ? p.nfet : p.pfet;
        spec.ptm = p.ptm;
        spec.vdd = p.vdd;
        if (std::any_of(f.sets.begin(), f.sets.end(), [](const auto& s) { return s.rfind("i_lrs=", 0) == 0; }))
            spec.i_lrs = p.i_lrs;
        if (std::any_of(f.sets.begin(), f.sets.end(), [](const auto& s) { return s.rfind("i_hrs=", 0) == 0; }))
            spec.i_hrs = p.i_hrs;
        emit(ctx, "study.csv", study_csv(sweep_study(spec)));
        return;
    }
    if (f.source.empty()) throw InvalidParams("sweep needs --source or --study");
    const Input in = load_input(f);
    emit(ctx, "sweep.csv", sweep_csv(dc_sweep_hysteretic(in.circuit, f.source, f.from, f.to, f.points, f.probe)));
}

TopologyKind sense_kind(const Flags& f) {
    const auto kind = topology_kind(f);
    if (!kind) throw InvalidParams("--topology is required");
    if (!f.netlist.empty()) throw InvalidParams("--netlist is not accepted here");
    if (!is_sense_amplifier(*kind)) throw InvalidParams(f.topology + " is not a sense amplifier");
    return *kind;
}

void run_sense_cmd(const Context& ctx) {
    const TopologyKind kind = sense_kind(ctx.flags);
    const CellState c = cell(ctx.flags);
    const SenseRun run = run_sense(kind, c, params_from(ctx.flags));
    emit(ctx, "sense.csv", waveform_csv(run.waveform));
    emit(ctx, "sense.json", dump(sense_json(kind, c, run.metrics)));
    ctx.out << "logic_outcome " << to_string(run.metrics.outcome) << '\n';
}

FinFETParams single_device(const Flags& f, const TopologyParams& p, int default_fins) {
    FinFETParams fet = polarity(f) == Polarity::N ? p.nfet : p.pfet;
    fet.n_fin = default_fins;
    if (!f.fins.empty()) {
        const double n = number(f.fins, "fin count");
        if (n < 1 || n != std::floor(n)) throw InvalidParams("--fins must be a positive integer");
        fet.n_fin = static_cast<int>(n);
    }
    return fet;
}

void run_transitions(const Context& ctx) {
    const TopologyParams p = params_from(ctx.flags);
    const FinFETParams fet = single_device(ctx.flags, p, 1);
    const TransitionVoltages t = find_transition_voltages(fet, p.ptm, p.vdd, 1e-6);
    emit(ctx, "transitions.json", dump(transitions_json(t, fet, p.vdd)));
}

void run_window(const Context& ctx) {
    const TopologyParams p = params_from(ctx.flags);
    const FinFETParams mirror = single_device(ctx.flags, p, 6);
    const MirrorWindow w = mirror_window(mirror, p.i_lrs, p.i_hrs, p.vdd, 1e-9);
    emit(ctx, "window.json", dump(window_json(w, mirror, p.i_lrs, p.i_hrs)));
}

void run_mc_cmd(const Context& ctx) {
    const Flags& f = ctx.flags;
    const TopologyKind kind = sense_kind(f);
    McConfig config;
    config.n_samples = f.samples;
    config.master_seed = f.seed;
    config.workers = f.workers;
    if (f.mode == "one-at-a-time") config.mode = McMode::OneAtATime;
    else if (f.mode != "all-at-once") throw InvalidParams("--mode must be all-at-once or one-at-a-time");
    config.family = parse_mc_family(f.family);
    const auto samples = run_mc(kind, config, params_from(f));
    emit(ctx, "mc_samples.csv", mc_samples_csv(samples));
    emit(ctx, "mc_summary.json", dump(mc_summary_json(kind, config, summarize(samples))));
}

}  // namespace

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Flags f;
    CLI::App app{"Circuit simulator for phase-transition-material sense amplifiers", "ptmsa"};
    app.require_subcommand(1, 1);

    auto input = [&](CLI::App* sub) {
        sub->add_option("--topology", f.topology, "Built-in topology");
        sub->add_option("--netlist", f.netlist, "Netlist file");
    };
    auto common = [&](CLI::App* sub) {
        sub->add_option("--set", f.sets, "Parameter override key=value (repeatable)");
        sub->add_option("--out", f.out, "Output directory (default $PTMSA_OUT or .)");
    };
    auto method = [&](CLI::App* sub) {
        sub->add_option("--method", f.method, "Integration method")->check(CLI::IsMember({"be", "trap"}));
    };
    auto cell_flag = [&](CLI::App* sub) {
        sub->add_option("--cell", f.cell, "Cell state")->check(CLI::IsMember({"lrs", "hrs"}));
    };
    auto device = [&](CLI::App* sub) {
        sub->add_option("--polarity", f.polarity, "Device polarity")->check(CLI::IsMember({"n", "p"}));
        sub->add_option("--fins", f.fins, "Fin count");
    };

    auto* dc = app.add_subcommand("dc", "Operating point -> dc.json");
    input(dc), common(dc), cell_flag(dc);
    auto* tran = app.add_subcommand("tran", "Transient waveforms -> tran.csv");
    input(tran), common(tran), method(tran), cell_flag(tran);
    tran->add_option("--tstop", f.tstop, "End time in s (default: one sensing cycle)");
    auto* sweep = app.add_subcommand("sweep", "Hysteretic DC sweep or parameter study -> CSV");
    input(sweep), common(sweep), cell_flag(sweep);
    sweep->add_option("--source", f.source, "Swept source");
    sweep->add_option("--from", f.from, "Sweep start");
    sweep->add_option("--to", f.to, "Sweep end");
    sweep->add_option("--points", f.points, "Sweep points");
    sweep->add_option("--probe", f.probe, "Element whose current is recorded");
    sweep->add_option("--study", f.study, "Study kind")
        ->check(CLI::IsMember({"window-vs-dvth", "imt-vs-dvth", "mit-vs-dvth", "vds-imt-vs-dvth", "imt-vs-rhoins"}));
    sweep->add_option("--axis", f.axis, "Study axis lo:hi:n or a comma list");
    sweep->add_option("--polarity", f.polarity, "Device polarity")->check(CLI::IsMember({"n", "p"}));
    sweep->add_option("--fins", f.fins, "Comma-separated fin counts");
    auto* sense = app.add_subcommand("sense", "Sensing cycle -> sense.csv + sense.json");
    sense->add_option("--topology", f.topology, "Sense amplifier topology");
    common(sense), method(sense), cell_flag(sense);
    auto* transitions = app.add_subcommand("transitions", "Hyper-FET transition voltages -> transitions.json");
    common(transitions), device(transitions);
    auto* window = app.add_subcommand("window", "Mirror sensing window -> window.json");
    common(window), device(window);
    auto* mc = app.add_subcommand("mc", "Monte Carlo -> mc_samples.csv + mc_summary.json");
    mc->add_option("--topology", f.topology, "Sense amplifier topology");
    common(mc), method(mc);
    mc->add_option("--samples", f.samples, "Sample count");
    mc->add_option("--seed", f.seed, "Master seed");
    mc->add_option("--workers", f.workers, "Worker threads");
    mc->add_option("--mode", f.mode, "all-at-once or one-at-a-time");
    mc->add_option("--family", f.family, "Varied family in one-at-a-time mode: v_c_imt, l_ptm or vth");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return 1;
    }

    const Context ctx{f, out};
    try {
        if (dc->parsed()) run_dc(ctx);
        else if (tran->parsed()) run_tran(ctx);
        else if (sweep->parsed()) run_sweep(ctx);
        else if (sense->parsed()) run_sense_cmd(ctx);
        else if (transitions->parsed()) run_transitions(ctx);
        else if (window->parsed()) run_window(ctx);
        else if (mc->parsed()) run_mc_cmd(ctx);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace ptmsa
