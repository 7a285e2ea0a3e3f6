#include "nhqc/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "nhqc/cli.hpp"
#include "nhqc/controllability.hpp"
#include "nhqc/errors.hpp"
#include "nhqc/gates.hpp"
#include "nhqc/json_io.hpp"
#include "nhqc/lattice.hpp"
#include "nhqc/oracles.hpp"

// Release gate: one check per shipped guarantee, each printing a single
// [PASS]/[FAIL] line.  Checks share one lazily computed context (reference
// operators, one synthesized identity-root sequence) so the suite stays inside
// the stated runtime budgets.  Tolerances are pinned here on purpose --
// loosening them is a contract change, not a tuning knob.
namespace nhqc {

namespace {

constexpr double kPi = std::numbers::pi;

struct Context {
    CellParams params;  // reference operating point
    CellOperators ops = build_cell_operators(params);
    std::optional<IdentityResult> identity;

    const IdentityResult& identity_result() {
        if (!identity) identity = find_identity_sequence(ops, 1, params.T);
        return *identity;
    }

    // Gate-synthesis probe: one outcome per reference gate, all from the same
    // identity root.
    struct GateRun {
        const char* name;
        int m_cap;
        bool failed = false;
        std::string failure;
        SynthesisResult result;
        double seconds = 0.0;
    };
    std::optional<std::vector<GateRun>> gate_runs;
    std::uint64_t gate_base_seed = 0;
    std::optional<ControlSequence> gate_base;

    // Identity roots vary in quality as control bases, so walk seeds until one
    // root synthesizes every reference gate within its repetition cap.  The
    // accepted root (or the last one tried) backs the gate and routing checks.
    const std::vector<GateRun>& gate_results() {
        if (gate_runs) return *gate_runs;
        const struct {
            const char* name;
            GateSpec spec;
            int m_cap;
        } targets[] = {
            {"Toffoli", GateSpec::Toffoli(), 8},
            {"perm(1,2)", GateSpec::Perm(1, 2), 16},
            {"perm(2,3)", GateSpec::Perm(2, 3), 16},
            {"cond-phase(pi/32)", GateSpec::CondPhase(1, 2, kPi / 32.0), 16},
        };
        for (std::uint64_t seed = 1; seed <= 8 && !gate_runs; ++seed) {
            const ControlSequence base =
                (seed == 1) ? identity_result().sequence
                            : find_identity_sequence(ops, seed, params.T).sequence;
            std::vector<GateRun> runs;
            bool all_ok = true;
            for (const auto& target : targets) {
                GateRun run{target.name, target.m_cap};
                const auto start = std::chrono::steady_clock::now();
                try {
                    run.result = effect_unitary(ops, base, gate_matrix(target.spec));
                } catch (const synthesis_error& e) {
                    run.failed = true;
                    run.failure = e.what();
                }
                run.seconds = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
                all_ok = all_ok && !run.failed && run.result.distance < 1e-8 &&
                         run.result.m <= target.m_cap;
                runs.push_back(std::move(run));
            }
            if (all_ok || seed == 8) {
                gate_runs = std::move(runs);
                gate_base_seed = seed;
                gate_base = base;
            }
        }
        return *gate_runs;
    }

    const ControlSequence& synthesis_base() {
        gate_results();
        return *gate_base;
    }
};

// Per-check scratch: accumulate failure reasons; empty means pass.
struct CheckLog {
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    template <typename T>
    void require_le(T value, T limit, const std::string& what) {
        if (!(value <= limit)) {
            std::ostringstream msg;
            msg << what << " = " << value << " exceeds " << limit;
            failures.push_back(msg.str());
        }
    }
    void require_lt(double value, double limit, const std::string& what) {
        if (!(value < limit)) {
            std::ostringstream msg;
            msg << what << " = " << value << " not below " << limit;
            failures.push_back(msg.str());
        }
    }
};

double elapsed_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- 1. Controllability ----------------------------------------------------

void check_controllability(Context& ctx, CheckLog& log) {
    const auto start = std::chrono::steady_clock::now();
    const ClosureReport report = lie_closure({ctx.ops.H0, ctx.ops.P_omega, ctx.ops.P_S});
    const bool full = report.dim_reached == 64;
    const bool phase_only =
        report.dim_reached == 63 && report.verdict == "controllable up to global phase";
    log.require(full || phase_only,
                "closure dimension " + std::to_string(report.dim_reached) +
                    " with verdict \"" + report.verdict + "\"");
    log.require_lt(elapsed_since(start), 10.0, "runtime [s]");
}

// ---- 2. Identity-root synthesis ---------------------------------------------

void check_identity_synthesis(Context& ctx, CheckLog& log) {
    const auto start = std::chrono::steady_clock::now();
    const IdentityResult& result = ctx.identity_result();
    for (const Segment& s : result.sequence.segments)
        if (s.C <= 0.0) {
            log.require(false, "segment " + std::to_string(s.k) + " strength not positive");
            break;
        }
    log.require_lt(result.identity_distance, 1e-6, "||U(64T) - I||_F");
    log.require_lt(result.max_eigenphase_error, 1e-7, "worst eighth-root phase deviation");
    log.require_le(result.trials_used, 200, "restart trials");
    log.require_lt(elapsed_since(start), 300.0, "runtime [s]");
}

// ---- 3. Jacobian vs finite differences --------------------------------------

void check_jacobian(Context& ctx, CheckLog& log) {
    const ControlSequence& base = ctx.identity_result().sequence;
    const std::vector<Matrix> J = control_jacobian(ctx.ops, base);
    double worst = 0.0;
    int worst_k = 0;
    for (int k = 0; k < 64; ++k) {
        const Matrix fd = oracles::fd_jacobian_direction(ctx.ops, base, k);
        const double rel = (J[static_cast<std::size_t>(k)] - fd).norm() / fd.norm();
        if (rel > worst) {
            worst = rel;
            worst_k = k;
        }
    }
    log.require_lt(worst, 1e-6,
                   "relative Jacobian error (direction " + std::to_string(worst_k) + ")");
}

// ---- 4. Gate synthesis -------------------------------------------------------

void check_gate_synthesis(Context& ctx, CheckLog& log) {
    for (const Context::GateRun& run : ctx.gate_results()) {
        if (run.failed) {
            log.require(false, std::string(run.name) + " synthesis failed: " + run.failure);
            continue;
        }
        log.require_lt(run.result.distance, 1e-8,
                       std::string(run.name) + " phase-aligned distance");
        log.require_le(run.result.m, run.m_cap, std::string(run.name) + " repetitions");
        log.require_lt(run.seconds, 120.0, std::string(run.name) + " runtime [s]");
    }
}

// ---- 5. Toffoli closed forms -------------------------------------------------

void check_toffoli_closed_form(Context&, CheckLog& log) {
    const GateGenerator gen = gate_generator(GateSpec::Toffoli());
    log.require_lt((gen.H_cal * gen.H_cal - gen.H_cal).cwiseAbs().maxCoeff(), 1e-14,
                   "generator idempotency defect");
    log.require_lt(
        (expm_hermitian(gen.H_cal, gen.epsilon) - gate_matrix(GateSpec::Toffoli())).norm(),
        1e-12, "||exp(-i pi H) - U||_F");
}

// ---- 6. Fourier-transform compilation ----------------------------------------

double vector_phase_aligned_distance(const Vector& a, const Vector& b) {
    const complexd overlap = b.dot(a);  // conjugated on b
    const double phase = (std::abs(overlap) == 0.0) ? 0.0 : std::arg(overlap);
    return (a - std::exp(complexd(0.0, phase)) * b).norm();
}

void check_qft(Context&, CheckLog& log) {
    const auto start = std::chrono::steady_clock::now();

    // Width 3: the compiled program must realize the 8x8 transform matrix.
    {
        const DeviceTopology topo = DeviceTopology::ternary_tree(1);
        const GateProgram prog = compile_qft(topo, 3);
        Matrix realized(8, 8);
        for (int x = 0; x < 8; ++x)
            realized.col(x) = run_program(RegisterState::basis_state(3, x), prog).amplitudes;
        Matrix reference(8, 8);
        for (int x = 0; x < 8; ++x) {
            Vector e = Vector::Zero(8);
            e(x) = 1.0;
            reference.col(x) = oracles::fft_forward(e);
        }
        log.require_lt(phase_aligned_distance(realized, reference), 1e-8,
                       "width-3 transform distance");
    }

    // Width 9: compiled program vs the fast-transform oracle on random inputs.
    {
        const DeviceTopology topo = DeviceTopology::ternary_tree(3);
        const GateProgram prog = compile_qft(topo, 9);
        std::mt19937_64 rng(7);
        const auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const std::uint64_t x = rng() % 512;
            const RegisterState out = run_program(RegisterState::basis_state(9, x), prog);
            Vector e = Vector::Zero(512);
            e(static_cast<Eigen::Index>(x)) = 1.0;
            worst = std::max(
                worst, vector_phase_aligned_distance(out.amplitudes, oracles::fft_forward(e)));
        }
        RegisterState super;
        super.n = 9;
        super.amplitudes = Vector(512);
        for (int i = 0; i < 512; ++i)
            super.amplitudes(i) = complexd(uniform() - 0.5, uniform() - 0.5);
        super.amplitudes /= super.amplitudes.norm();
        const RegisterState out = run_program(super, prog);
        worst = std::max(worst, vector_phase_aligned_distance(
                                    out.amplitudes, oracles::fft_forward(super.amplitudes)));
        log.require_lt(worst, 1e-8, "width-9 transform distance (worst of 21 inputs)");
    }
    log.require_lt(elapsed_since(start), 30.0, "runtime [s]");
}

// ---- 7. Routing bound ---------------------------------------------------------

void check_routing(Context& ctx, CheckLog& log) {
    for (int leaves : {3, 9, 27}) {
        const DeviceTopology topo = DeviceTopology::ternary_tree(leaves);
        const int bound = static_cast<int>(std::lround(
            6.0 * std::log(static_cast<double>(leaves)) / std::log(3.0)));
        const int worst = oracles::max_routing_distance(topo, 3);
        log.require_le(worst, bound,
                       "worst co-location distance at " + std::to_string(leaves) + " leaves");
    }

    // Interval accounting for one worst-case routed operation on the 9-leaf
    // tree: route in, run a Toffoli on the host triad, route back.
    const DeviceTopology topo = DeviceTopology::ternary_tree(9);
    const auto distances = oracles::routing_distance_map(topo, 3);
    std::vector<int> worst_triple;
    int worst_distance = -1;
    for (int a = 1; a <= topo.n_atoms; ++a)
        for (int b = 1; b <= topo.n_atoms; ++b)
            for (int c = 1; c <= topo.n_atoms; ++c) {
                if (a == b || b == c || a == c) continue;
                const auto it = distances.find(oracles::encode_positions({a, b, c}));
                if (it != distances.end() && it->second > worst_distance) {
                    worst_distance = it->second;
                    worst_triple = {a, b, c};
                }
            }
    const RouteResult route = route_to_common_cell(topo, worst_triple);
    log.require(static_cast<int>(route.exchanges.size()) == worst_distance,
                "router route length " + std::to_string(route.exchanges.size()) +
                    " differs from oracle distance " + std::to_string(worst_distance));

    GateProgram prog;
    prog.n = topo.n_atoms;
    for (const auto& [a, b] : route.exchanges)
        prog.steps.push_back(ProgramStep::Exchange(a, b, "route"));
    prog.steps.push_back(ProgramStep::CellOp(
        {route.host[0], route.host[1], route.host[2]}, gate_matrix(GateSpec::Toffoli()),
        "toffoli"));
    for (auto it = route.exchanges.rbegin(); it != route.exchanges.rend(); ++it)
        prog.steps.push_back(ProgramStep::Exchange(it->first, it->second, "unroute"));
    const LoweredProgram lowered = lower_to_controls(prog, ctx.ops, ctx.synthesis_base());
    log.require_le(lowered.total_intervals, static_cast<long long>(64 * 16 * 12 * 2),
                   "routed-operation intervals at 9 leaves");
}

// ---- 8. Lattice emulation ------------------------------------------------------

Matrix embed_triad(const Matrix& H8, const std::array<int, 3>& triad, int n) {
    // Lift an 8x8 triad operator to the n-atom register, identity elsewhere.
    // The r-th listed atom carries local bit r-1, matching the coefficient
    // slot convention of the tensor decomposition.
    const int shifts[3] = {triad[0] - 1, triad[1] - 1, triad[2] - 1};
    const std::uint64_t mask = (std::uint64_t{1} << shifts[0]) |
                               (std::uint64_t{1} << shifts[1]) |
                               (std::uint64_t{1} << shifts[2]);
    const auto local_of = [&](std::uint64_t x) {
        return static_cast<int>(((x >> shifts[0]) & 1) | (((x >> shifts[1]) & 1) << 1) |
                                (((x >> shifts[2]) & 1) << 2));
    };
    const auto with_local = [&](std::uint64_t base, int l) {
        std::uint64_t x = base;
        if (l & 1) x |= std::uint64_t{1} << shifts[0];
        if (l & 2) x |= std::uint64_t{1} << shifts[1];
        if (l & 4) x |= std::uint64_t{1} << shifts[2];
        return x;
    };
    const Eigen::Index dim = Eigen::Index{1} << n;
    Matrix full = Matrix::Zero(dim, dim);
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
        const std::uint64_t base = x & ~mask;
        const int l = local_of(x);
        for (int lp = 0; lp < 8; ++lp)
            full(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(with_local(base, lp))) +=
                H8(l, lp);
    }
    return full;
}

void check_lattice(Context&, CheckLog& log) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(11);
    const auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };

    // Decompose / reconstruct round trip on random Hermitian operators.
    double worst_roundtrip = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Matrix M(8, 8);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c) M(r, c) = complexd(uniform() - 0.5, uniform() - 0.5);
        const Matrix H = (M + M.adjoint()) / 2.0;
        worst_roundtrip =
            std::max(worst_roundtrip, (pauli_reconstruct(pauli_decompose(H)) - H).norm());
    }
    log.require_lt(worst_roundtrip, 1e-12, "decompose/reconstruct round trip");

    // 3x3 lattice, constant (time-independent) coefficients.
    const RegroupSchedule schedule = regroup_schedule(3, 3);
    const int n = schedule.n_atoms();
    std::array<std::vector<PauliDecomposition>, 3> tables;
    for (int p = 0; p < 3; ++p)
        for (std::size_t q = 0; q < schedule.periods[static_cast<std::size_t>(p)].size(); ++q) {
            PauliDecomposition d;
            for (int i = 0; i < 64; ++i)
                d.c[static_cast<std::size_t>(i)] = 0.4 * (uniform() - 0.5);
            tables[static_cast<std::size_t>(p)].push_back(d);
        }
    const CoefficientFn coeffs = [&tables](int, int period, int triad) {
        return tables[static_cast<std::size_t>(period)][static_cast<std::size_t>(triad)];
    };

    // Average-field generator sum_p H_p (per-period sums of disjoint triads).
    const Eigen::Index dim = Eigen::Index{1} << n;
    Matrix H_sum = Matrix::Zero(dim, dim);
    for (int p = 0; p < 3; ++p) {
        const auto& triads = schedule.periods[static_cast<std::size_t>(p)];
        for (std::size_t q = 0; q < triads.size(); ++q)
            H_sum += embed_triad(pauli_reconstruct(coeffs(0, p, static_cast<int>(q))),
                                 triads[q], n);
    }

    // Superposition start so the dynamics are not an eigenstate fixed point.
    RegisterState initial;
    initial.n = n;
    initial.amplitudes = Vector(dim);
    std::mt19937_64 rng_state(13);
    for (Eigen::Index i = 0; i < dim; ++i)
        initial.amplitudes(i) = complexd((rng_state() >> 11) * 0x1.0p-53 - 0.5,
                                         (rng_state() >> 11) * 0x1.0p-53 - 0.5);
    initial.amplitudes /= initial.amplitudes.norm();

    // Trotter defect at matched elapsed time halves with the step size.
    const int cycles = 8;
    const auto defect = [&](double eps, int steps) {
        const RegisterState emulated = emulate_field(schedule, coeffs, eps, steps, initial);
        const Vector exact =
            expm_hermitian(H_sum, eps * static_cast<double>(steps) / 3.0) * initial.amplitudes;
        return (emulated.amplitudes - exact).norm();
    };
    const double d1 = defect(0.02, 3 * cycles);
    const double d2 = defect(0.01, 6 * cycles);
    const double ratio = d2 / d1;
    log.require(ratio > 0.4 && ratio < 0.6,
                "Trotter defect ratio " + std::to_string(ratio) + " outside 0.5 +- 20%");

    // Motion of single-atom expectations follows the average-field commutator.
    const auto heisenberg_error = [&](double eps) {
        const int steps = 9;
        std::vector<RegisterState> trajectory{initial};
        for (int t = 0; t < steps; ++t) {
            RegroupSchedule rotated = schedule;
            rotated.periods[0] = schedule.periods[static_cast<std::size_t>(t % 3)];
            const int p = t % 3;
            const CoefficientFn shifted = [&coeffs, p](int, int, int triad) {
                return coeffs(0, p, triad);
            };
            trajectory.push_back(emulate_field(rotated, shifted, eps, 1, trajectory.back()));
        }
        double worst = 0.0;
        for (int atom = 1; atom <= n; atom += 4)
            for (int alpha = 1; alpha <= 3; ++alpha) {
                Matrix sigma2(2, 2);
                if (alpha == 1) sigma2 << 0, 1, 1, 0;
                if (alpha == 2) sigma2 << 0, complexd(0, -1), complexd(0, 1), 0;
                if (alpha == 3) sigma2 << 1, 0, 0, -1;
                // I x..x sigma x..x I with the letter at `atom`.
                Matrix sigma_full = Matrix::Identity(1, 1);
                for (int a = n; a >= 1; --a) {
                    const Matrix factor =
                        (a == atom) ? sigma2 : Matrix::Identity(2, 2).eval();
                    Matrix next(sigma_full.rows() * 2, sigma_full.cols() * 2);
                    for (Eigen::Index r = 0; r < sigma_full.rows(); ++r)
                        for (Eigen::Index c = 0; c < sigma_full.cols(); ++c)
                            next.block(r * 2, c * 2, 2, 2) = sigma_full(r, c) * factor;
                    sigma_full = next;
                }
                const Matrix commutator =
                    complexd(0, 1) * (H_sum / 3.0 * sigma_full - sigma_full * H_sum / 3.0);
                // Centered difference over one full period cycle.
                for (int t = 3; t + 3 <= steps; t += 3) {
                    const auto expect = [&](const RegisterState& s, const Matrix& O) {
                        return (s.amplitudes.adjoint() * O * s.amplitudes)(0, 0).real();
                    };
                    const double fd =
                        (expect(trajectory[static_cast<std::size_t>(t + 3)], sigma_full) -
                         expect(trajectory[static_cast<std::size_t>(t - 3)], sigma_full)) /
                        (6.0 * eps);
                    const double rhs =
                        expect(trajectory[static_cast<std::size_t>(t)], commutator);
                    worst = std::max(worst, std::abs(fd - rhs));
                }
            }
        return worst;
    };
    const double h1 = heisenberg_error(0.02);
    const double h2 = heisenberg_error(0.01);
    log.require(h2 < 0.75 * h1 || h2 < 1e-6,
                "motion-equation defect did not shrink linearly: " + std::to_string(h1) +
                    " -> " + std::to_string(h2));
    log.require_lt(elapsed_since(start), 60.0, "runtime [s]");
}

// ---- 9. CLI determinism ---------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void check_cli_determinism(Context&, CheckLog& log) {
    const std::filesystem::path root =
        std::filesystem::temp_directory_path() / "nhqc_selftest";
    std::filesystem::remove_all(root);

    // Byte-identical output requires an identical manifest, so both passes run
    // with the same arguments into the same directory; the first pass's file is
    // snapshotted before the rerun overwrites it.
    const auto run_twice = [&](const std::string& tag, std::vector<std::string> args,
                               const std::string& output_name) {
        const std::filesystem::path dir = root / tag;
        std::string first;
        for (int pass = 1; pass <= 2; ++pass) {
            std::vector<std::string> full = args;
            full.push_back("--out");
            full.push_back(dir.string());
            // Mute the command's console summary; only the files matter here.
            std::ostringstream sink;
            std::streambuf* saved = std::cout.rdbuf(sink.rdbuf());
            const int code = cli::dispatch(full);
            std::cout.rdbuf(saved);
            log.require(code == 0, tag + " pass " + std::to_string(pass) + " exited " +
                                       std::to_string(code));
            if (code != 0) return;
            if (pass == 1) first = read_file(dir / output_name);
        }
        const std::string second = read_file(dir / output_name);
        log.require(!first.empty() && first == second, tag + " outputs differ between runs");
    };

    run_twice("check", {"check"}, "closure_report.json");
    run_twice("qft", {"compile-qft", "--n", "3"}, "gate_program.json");
    run_twice("ident", {"synth-identity", "--seed", "1"}, "identity_sequence.json");
    std::filesystem::remove_all(root);
}

}  // namespace

int run_acceptance(const std::string& filter) {
    Context ctx;
    struct Entry {
        const char* name;
        std::function<void(Context&, CheckLog&)> run;
    };
    const std::vector<Entry> checks = {
        {"controllability", check_controllability},
        {"identity-synthesis", check_identity_synthesis},
        {"jacobian", check_jacobian},
        {"gate-synthesis", check_gate_synthesis},
        {"toffoli-closed-form", check_toffoli_closed_form},
        {"fourier-compilation", check_qft},
        {"routing-bound", check_routing},
        {"lattice-emulation", check_lattice},
        {"cli-determinism", check_cli_determinism},
    };

    int failures = 0;
    int selected = 0;
    for (const Entry& entry : checks) {
        if (!filter.empty() && std::string(entry.name).find(filter) == std::string::npos)
            continue;
        ++selected;
        CheckLog log;
        const auto start = std::chrono::steady_clock::now();
        try {
            entry.run(ctx, log);
        } catch (const std::exception& e) {
            log.require(false, std::string("unexpected error: ") + e.what());
        }
        const double seconds = elapsed_since(start);
        if (log.failures.empty()) {
            std::printf("[PASS] %-22s (%.2f s)\n", entry.name, seconds);
        } else {
            ++failures;
            std::string detail = log.failures.front();
            for (std::size_t i = 1; i < log.failures.size(); ++i)
                detail += "; " + log.failures[i];
            std::printf("[FAIL] %-22s (%.2f s): %s\n", entry.name, seconds, detail.c_str());
        }
        std::fflush(stdout);
    }
    if (selected == 0) {
        std::printf("no checks match filter \"%s\"\n", filter.c_str());
        return 1;
    }
    std::printf("%d of %d checks failed\n", failures, selected);
    return failures;
}

}  // namespace nhqc
