#include "nhqc/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nhqc/acceptance.hpp"
#include "nhqc/controllability.hpp"
#include "nhqc/errors.hpp"
#include "nhqc/json_io.hpp"
#include "nhqc/lattice.hpp"
#include "nhqc/oracles.hpp"
#include "nhqc/version.hpp"

namespace nhqc::cli {

namespace {

// Provenance block embedded in every output file.  Wall-clock time is printed
// to the console but kept out of files so identical inputs give identical bytes.
struct RunManifest {
    std::string command;
    std::vector<std::string> inputs;
    std::optional<std::uint64_t> seed;
    json tolerance_overrides = json::object();
    std::vector<std::string> outputs;

    json to_json() const {
        json j;
        j["command"] = command;
        j["inputs"] = inputs;
        if (seed) j["seed"] = *seed;
        j["tolerance_overrides"] = tolerance_overrides;
        j["outputs"] = outputs;
        j["toolkit_version"] = toolkit_version;
        return j;
    }
};

struct CommonFlags {
    std::string params_path;
    std::uint64_t seed = 1;
    double tol = 0.0;
    bool tol_given = false;
    std::string out_dir = ".";
    std::string format = "json";
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_seed, bool with_tol) {
    cmd->add_option("--params", flags.params_path,
                    "cell parameter file (default: cell_params_default.json in "
                    "$NHQC_CONFIG_DIR, else built-in reference values)");
    if (with_seed) cmd->add_option("--seed", flags.seed, "search seed (default 1)");
    if (with_tol)
        cmd->add_option("--tol", flags.tol, "override the command's acceptance tolerance")
            ->each([&flags](const std::string&) { flags.tol_given = true; });
    cmd->add_option("--out", flags.out_dir, "output directory (default .)");
    cmd->add_option("--format", flags.format, "json | csv (csv adds plot-ready tables)")
        ->check(CLI::IsMember({"json", "csv"}));
}

// Resolves the parameter file: explicit flag, then the config-directory
// environment variable, then built-in defaults.
CellParams resolve_params(CommonFlags& flags, RunManifest& manifest) {
    std::string path = flags.params_path;
    if (path.empty()) {
        if (const char* dir = std::getenv("NHQC_CONFIG_DIR")) {
            const std::filesystem::path candidate =
                std::filesystem::path(dir) / "cell_params_default.json";
            if (std::filesystem::exists(candidate)) path = candidate.string();
        }
    }
    if (path.empty()) return CellParams{};
    manifest.inputs.push_back(path);
    return cell_params_from_json(load_json_file(path));
}

std::string output_path(const CommonFlags& flags, const std::string& name) {
    std::filesystem::create_directories(flags.out_dir);
    return (std::filesystem::path(flags.out_dir) / name).string();
}

void write_json_output(const std::string& path, json document, const RunManifest& manifest) {
    document["manifest"] = manifest.to_json();
    write_text_file(path, document.dump(2) + "\n");
}

void write_csv_output(const std::string& path, const std::string& table,
                      const RunManifest& manifest) {
    // Manifest as a single comment line so the table stays machine-readable.
    write_text_file(path, "# manifest " + manifest.to_json().dump() + "\n" + table);
}

double pauli_expectation(const RegisterState& state, int atom, int alpha) {
    static const complexd sigma[3][2][2] = {
        {{0.0, 1.0}, {1.0, 0.0}},                                      // X
        {{0.0, complexd(0.0, -1.0)}, {complexd(0.0, 1.0), 0.0}},       // Y
        {{1.0, 0.0}, {0.0, -1.0}},                                     // Z
    };
    const int bit = atom - 1;
    complexd acc = 0.0;
    const std::uint64_t dim = std::uint64_t{1} << state.n;
    for (std::uint64_t x = 0; x < dim; ++x) {
        const int b = static_cast<int>((x >> bit) & 1);
        for (int bp = 0; bp < 2; ++bp) {
            const std::uint64_t y = (x & ~(std::uint64_t{1} << bit)) |
                                    (static_cast<std::uint64_t>(bp) << bit);
            acc += std::conj(state.amplitudes(static_cast<Eigen::Index>(x))) *
                   sigma[alpha - 1][b][bp] * state.amplitudes(static_cast<Eigen::Index>(y));
        }
    }
    return acc.real();
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int cmd_check(CommonFlags& flags) {
    Stopwatch watch;
    RunManifest manifest;
    manifest.command = "check";
    const CellParams params = resolve_params(flags, manifest);
    double rank_tol = default_tolerances.closure_rank;
    if (flags.tol_given) {
        rank_tol = flags.tol;
        manifest.tolerance_overrides["closure_rank"] = flags.tol;
    }

    const CellOperators ops = build_cell_operators(params);
    const ClosureReport report = lie_closure({ops.H0, ops.P_omega, ops.P_S}, rank_tol);

    const std::string path = output_path(flags, "closure_report.json");
    manifest.outputs.push_back(path);
    write_json_output(path, to_json(report), manifest);
    std::cout << "closure: " << report.verdict << " (dim " << report.dim_reached << " of "
              << report.target_dim << ", " << report.generations_used << " generations) in "
              << watch.seconds() << " s\n"
              << "wrote " << path << "\n";
    return 0;
}

int cmd_synth_identity(CommonFlags& flags) {
    Stopwatch watch;
    RunManifest manifest;
    manifest.command = "synth-identity";
    manifest.seed = flags.seed;
    const CellParams params = resolve_params(flags, manifest);
    IdentityOptions opt;
    if (flags.tol_given) {
        opt.objective_goal = flags.tol;
        manifest.tolerance_overrides["identity_objective"] = flags.tol;
    }

    const CellOperators ops = build_cell_operators(params);
    const IdentityResult result = find_identity_sequence(ops, flags.seed, params.T, opt);

    const std::string json_path = output_path(flags, "identity_sequence.json");
    const std::string csv_path = output_path(flags, "identity_sequence.csv");
    manifest.outputs.push_back(json_path);
    manifest.outputs.push_back(csv_path);

    json document = to_json(result.sequence);
    json verification;
    verification["objective"] = result.objective;
    verification["identity_distance"] = result.identity_distance;
    verification["max_eigenphase_error"] = result.max_eigenphase_error;
    verification["trials_used"] = result.trials_used;
    document["verification"] = std::move(verification);
    write_json_output(json_path, std::move(document), manifest);
    write_csv_output(csv_path, control_sequence_csv(result.sequence), manifest);

    std::cout << "identity sequence found on trial " << result.trials_used << ": objective "
              << result.objective << ", distance " << result.identity_distance << " in "
              << watch.seconds() << " s\n"
              << "wrote " << json_path << "\n"
              << "wrote " << csv_path << "\n";
    return 0;
}

int cmd_synth_gate(CommonFlags& flags, const std::string& gate_path,
                   const std::string& base_path) {
    Stopwatch watch;
    RunManifest manifest;
    manifest.command = "synth-gate";
    manifest.seed = flags.seed;
    const CellParams params = resolve_params(flags, manifest);
    double distance_tol = default_tolerances.gate_distance;
    if (flags.tol_given) {
        distance_tol = flags.tol;
        manifest.tolerance_overrides["gate_distance"] = flags.tol;
    }

    manifest.inputs.push_back(gate_path);
    const GateSpec spec = gate_spec_from_json(load_json_file(gate_path));
    const CellOperators ops = build_cell_operators(params);

    ControlSequence base;
    SynthesisResult result;
    std::optional<std::uint64_t> base_seed;
    if (!base_path.empty()) {
        manifest.inputs.push_back(base_path);
        base = control_sequence_from_json(load_json_file(base_path));
        result = effect_unitary(ops, base, gate_matrix(spec), distance_tol);
    } else {
        // Identity roots vary in quality as control bases: some leave the
        // linearized system too ill-conditioned for refinement to follow.
        // Walk successive seeds until a root synthesizes the requested gate.
        std::vector<std::string> rejected;
        for (std::uint64_t s = flags.seed; s < flags.seed + 8 && !base_seed; ++s) {
            try {
                const IdentityResult id = find_identity_sequence(ops, s, params.T);
                result = effect_unitary(ops, id.sequence, gate_matrix(spec), distance_tol);
                base = id.sequence;
                base_seed = s;
            } catch (const std::runtime_error& e) {
                std::cout << "base root from seed " << s << " rejected: " << e.what() << "\n";
                rejected.push_back("seed " + std::to_string(s) + ": " + e.what());
            }
        }
        if (!base_seed)
            throw synthesis_error(
                "gate synthesis failed from the identity roots of 8 successive seeds",
                std::move(rejected));
    }

    const std::string json_path = output_path(flags, "gate_sequence.json");
    manifest.outputs.push_back(json_path);
    const bool with_csv = (flags.format == "csv");
    const std::string csv_path = output_path(flags, "gate_sequence.csv");
    if (with_csv) manifest.outputs.push_back(csv_path);

    json document = to_json(result.sequence);
    json verification;
    verification["gate"] = to_json(spec);
    verification["distance"] = result.distance;
    verification["epsilon"] = result.epsilon;
    verification["m"] = result.m;
    verification["split"] = result.split;
    verification["residual_phase"] = result.residual_phase;
    if (base_seed) verification["base_seed"] = *base_seed;
    verification["attempts"] = result.attempts;
    document["verification"] = std::move(verification);
    write_json_output(json_path, std::move(document), manifest);
    if (with_csv) write_csv_output(csv_path, control_sequence_csv(result.sequence, &base), manifest);

    std::cout << "gate synthesized with m = " << result.m << ", phase-aligned distance "
              << result.distance << " in " << watch.seconds() << " s\n"
              << "wrote " << json_path << "\n";
    if (with_csv) std::cout << "wrote " << csv_path << "\n";
    return 0;
}

int cmd_compile_qft(CommonFlags& flags, int n, int leaves) {
    Stopwatch watch;
    RunManifest manifest;
    manifest.command = "compile-qft";
    if (leaves == 0) {
        leaves = 1;
        while (3 * leaves < n) leaves *= 3;
    }
    const DeviceTopology topo = DeviceTopology::ternary_tree(leaves);
    const GateProgram prog = compile_qft(topo, n);

    const std::string path = output_path(flags, "gate_program.json");
    manifest.outputs.push_back(path);
    json document = to_json(prog);
    document["transform_width"] = n;
    document["leaves"] = leaves;
    write_json_output(path, std::move(document), manifest);
    std::cout << "compiled " << n << "-qubit transform over " << topo.n_atoms << " atoms: "
              << prog.steps.size() << " steps, " << prog.exchange_count << " exchanges in "
              << watch.seconds() << " s\n"
              << "wrote " << path << "\n";
    return 0;
}

int cmd_run(CommonFlags& flags, const std::string& program_path,
            const std::string& state_path) {
    Stopwatch watch;
    RunManifest manifest;
    manifest.command = "run";
    manifest.inputs.push_back(program_path);
    manifest.inputs.push_back(state_path);
    const GateProgram prog = gate_program_from_json(load_json_file(program_path));
    const RegisterState input = register_state_from_json(load_json_file(state_path));
    const RegisterState output = run_program(input, prog);

    const std::string path = output_path(flags, "output_state.json");
    manifest.outputs.push_back(path);
    write_json_output(path, to_json(output), manifest);
    std::cout << "ran " << prog.steps.size() << " steps on a " << prog.n
              << "-qubit register in " << watch.seconds() << " s\n"
              << "wrote " << path << "\n";
    return 0;
}

int cmd_lower(CommonFlags& flags, const std::string& program_path,
              const std::string& base_path) {
    Stopwatch watch;
    RunManifest manifest;
    manifest.command = "lower";
    manifest.seed = flags.seed;
    const CellParams params = resolve_params(flags, manifest);
    manifest.inputs.push_back(program_path);
    const GateProgram prog = gate_program_from_json(load_json_file(program_path));
    const CellOperators ops = build_cell_operators(params);

    LoweredProgram lowered;
    std::optional<std::uint64_t> base_seed;
    if (!base_path.empty()) {
        manifest.inputs.push_back(base_path);
        const ControlSequence base = control_sequence_from_json(load_json_file(base_path));
        lowered = lower_to_controls(prog, ops, base);
    } else {
        // Same base-root sweep as gate synthesis: lowering must synthesize
        // every distinct unitary in the program from one root.
        std::vector<std::string> rejected;
        for (std::uint64_t s = flags.seed; s < flags.seed + 8 && !base_seed; ++s) {
            try {
                const IdentityResult id = find_identity_sequence(ops, s, params.T);
                lowered = lower_to_controls(prog, ops, id.sequence);
                base_seed = s;
            } catch (const std::runtime_error& e) {
                std::cout << "base root from seed " << s << " rejected: " << e.what() << "\n";
                rejected.push_back("seed " + std::to_string(s) + ": " + e.what());
            }
        }
        if (!base_seed)
            throw synthesis_error(
                "program lowering failed from the identity roots of 8 successive seeds",
                std::move(rejected));
    }

    const std::string path = output_path(flags, "lowered_program.json");
    manifest.outputs.push_back(path);
    json document;
    document["schema"] = "lowered_program/1";
    if (base_seed) document["base_seed"] = *base_seed;
    document["total_intervals"] = lowered.total_intervals;
    document["steps"] = json::array();
    for (const LoweredStep& step : lowered.steps) {
        json js;
        js["label"] = step.label;
        js["m"] = step.m;
        js["sequence"] = to_json(step.seq);
        document["steps"].push_back(std::move(js));
    }
    write_json_output(path, std::move(document), manifest);
    std::cout << "lowered " << lowered.steps.size() << " steps to control sequences: "
              << lowered.total_intervals << " intervals total in " << watch.seconds() << " s\n"
              << "wrote " << path << "\n";
    return 0;
}

int cmd_emulate(CommonFlags& flags, const std::string& config_path) {
    Stopwatch watch;
    RunManifest manifest;
    manifest.command = "emulate";
    manifest.inputs.push_back(config_path);
    const json config = load_json_file(config_path);
    if (!config.contains("schema") || config["schema"] != "lattice_config/1")
        throw structural_error("document does not carry schema \"lattice_config/1\"");

    const int rows = config.at("rows").get<int>();
    const int cols = config.at("cols").get<int>();
    const double epsilon = config.at("epsilon").get<double>();
    const int steps = config.at("steps").get<int>();
    const RegroupSchedule schedule = regroup_schedule(rows, cols);
    const int n = schedule.n_atoms();

    // Coefficient tables: per period, per triad, 64 reals in tensor-basis order.
    if (!config.contains("coefficients") || !config["coefficients"].is_array() ||
        config["coefficients"].size() != 3)
        throw structural_error("lattice config needs 3 period entries under \"coefficients\"");
    std::array<std::vector<PauliDecomposition>, 3> tables;
    for (int p = 0; p < 3; ++p) {
        const json& period = config["coefficients"][static_cast<std::size_t>(p)];
        if (!period.is_array() ||
            period.size() != schedule.periods[static_cast<std::size_t>(p)].size())
            throw structural_error("period " + std::to_string(p + 1) + " must list " +
                                   std::to_string(schedule.periods[0].size()) +
                                   " triad tables");
        for (const json& table : period) {
            if (!table.is_array() || table.size() != 64)
                throw structural_error("each triad table holds 64 coefficients");
            PauliDecomposition d;
            for (int i = 0; i < 64; ++i)
                d.c[static_cast<std::size_t>(i)] =
                    table[static_cast<std::size_t>(i)].get<double>();
            tables[static_cast<std::size_t>(p)].push_back(d);
        }
    }

    RegisterState initial = RegisterState::basis_state(n, 0);
    if (config.contains("initial_basis"))
        initial = RegisterState::basis_state(n, config["initial_basis"].get<std::uint64_t>());
    else if (config.contains("initial"))
        initial = register_state_from_json(config["initial"]);
    if (initial.n != n) throw structural_error("initial state width does not match lattice");

    // Observables: single-atom Pauli expectations, default Z on every atom.
    std::vector<std::pair<int, int>> observables;
    if (config.contains("observables")) {
        for (const json& o : config["observables"]) {
            const std::string letter = o.at("pauli").get<std::string>();
            const int alpha = (letter == "X") ? 1 : (letter == "Y") ? 2 : (letter == "Z") ? 3 : 0;
            if (alpha == 0)
                throw structural_error("observable pauli must be X, Y, or Z");
            const int atom = o.at("atom").get<int>();
            if (atom < 1 || atom > n) throw structural_error("observable atom outside lattice");
            observables.emplace_back(atom, alpha);
        }
    } else {
        for (int a = 1; a <= n; ++a) observables.emplace_back(a, 3);
    }

    const CoefficientFn coeffs = [&tables](int, int period, int triad) {
        return tables[static_cast<std::size_t>(period)][static_cast<std::size_t>(triad)];
    };

    std::ostringstream table;
    table << "step";
    const char* letters[4] = {"", "X", "Y", "Z"};
    for (const auto& [atom, alpha] : observables)
        table << ",<" << letters[alpha] << atom << ">";
    table << "\n";
    RegisterState state = initial;
    for (int t = 0; t <= steps; ++t) {
        table << t;
        for (const auto& [atom, alpha] : observables)
            table << ',' << json(pauli_expectation(state, atom, alpha)).dump();
        table << "\n";
        if (t == steps) break;
        // Advance one step while sampling between steps: a single-step call
        // always runs period 0, so rotate the schedule to put step t's period
        // (t mod 3) in front.
        const int p = t % 3;
        RegroupSchedule rotated = schedule;
        rotated.periods[0] = schedule.periods[static_cast<std::size_t>(p)];
        const CoefficientFn shifted = [&coeffs, t, p](int, int, int triad) {
            return coeffs(t, p, triad);
        };
        state = emulate_field(rotated, shifted, epsilon, 1, state);
    }
    std::string csv = table.str();

    const std::string path = output_path(flags, "trajectory.csv");
    manifest.outputs.push_back(path);
    write_csv_output(path, csv, manifest);
    std::cout << "emulated " << steps << " steps on " << n << " atoms in " << watch.seconds()
              << " s\n"
              << "wrote " << path << "\n";
    return 0;
}

int cmd_selftest(const std::string& filter) {
    const int failures = run_acceptance(filter);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"non-holonomic control toolkit for triad cell devices"};
    app.require_subcommand(1);

    CommonFlags check_flags, ident_flags, gate_flags, qft_flags, run_flags, lower_flags,
        emu_flags;
    std::string gate_path, base_path, program_path, state_path, config_path, lower_base,
        selftest_filter;
    int qft_n = 0, qft_leaves = 0;

    CLI::App* check = app.add_subcommand("check", "certify cell controllability");
    add_common_flags(check, check_flags, false, true);

    CLI::App* ident = app.add_subcommand("synth-identity", "find a root-of-identity sequence");
    add_common_flags(ident, ident_flags, true, true);

    CLI::App* gate = app.add_subcommand("synth-gate", "synthesize a control sequence for a gate");
    add_common_flags(gate, gate_flags, true, true);
    gate->add_option("--gate", gate_path, "gate specification file")->required();
    gate->add_option("--base", base_path,
                     "base identity sequence file (default: synthesize from --seed)");

    CLI::App* qft = app.add_subcommand("compile-qft", "compile a Fourier-transform program");
    add_common_flags(qft, qft_flags, false, false);
    qft->add_option("--n", qft_n, "transform width in qubits")->required();
    qft->add_option("--leaves", qft_leaves,
                    "ternary-tree leaf count (default: smallest tree that fits)");

    CLI::App* runc = app.add_subcommand("run", "run a gate program on a register state");
    add_common_flags(runc, run_flags, false, false);
    runc->add_option("--program", program_path, "gate program file")->required();
    runc->add_option("--state", state_path, "input register state file")->required();

    CLI::App* lower = app.add_subcommand("lower", "lower a gate program to control sequences");
    add_common_flags(lower, lower_flags, true, false);
    lower->add_option("--program", program_path, "gate program file")->required();
    lower->add_option("--base", lower_base,
                      "base identity sequence file (default: synthesize from --seed)");

    CLI::App* emu = app.add_subcommand("emulate", "run a lattice-field emulation");
    add_common_flags(emu, emu_flags, false, false);
    emu->add_option("--config", config_path, "lattice configuration file")->required();

    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in acceptance checks");
    selftest->add_option("--filter", selftest_filter, "only checks whose name contains this");

    try {
        std::vector<const char*> argv;
        argv.push_back("nhqc");
        for (const std::string& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (check->parsed()) return cmd_check(check_flags);
        if (ident->parsed()) return cmd_synth_identity(ident_flags);
        if (gate->parsed()) return cmd_synth_gate(gate_flags, gate_path, base_path);
        if (qft->parsed()) return cmd_compile_qft(qft_flags, qft_n, qft_leaves);
        if (runc->parsed()) return cmd_run(run_flags, program_path, state_path);
        if (lower->parsed()) return cmd_lower(lower_flags, program_path, lower_base);
        if (emu->parsed()) return cmd_emulate(emu_flags, config_path);
        if (selftest->parsed()) return cmd_selftest(selftest_filter);
    } catch (const synthesis_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const std::string& line : e.diagnostics) std::cerr << "  " << line << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand selected\n";
    return 2;
}

int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args);
}

}  // namespace nhqc::cli
