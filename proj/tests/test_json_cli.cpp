#include <doctest.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "nhqc/cli.hpp"
#include "nhqc/errors.hpp"
#include "nhqc/gates.hpp"
#include "nhqc/json_io.hpp"

using namespace nhqc;
namespace fs = std::filesystem;

namespace {

// Per-case scratch directory under the test runner's working directory.
fs::path scratch(const std::string& name) {
    const fs::path dir = fs::current_path() / "unit_scratch" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

}  // namespace

TEST_SUITE("json_cli") {
    TEST_CASE("cell parameters round trip and match the shipped defaults") {
        CellParams p;
        p.D12 = 1.25;
        p.Delta3 = 0.05;
        p.A2 = -0.01;
        p.T = 199.0;
        const CellParams back = cell_params_from_json(to_json(p));
        CHECK(back.D12 == p.D12);
        CHECK(back.D23 == p.D23);
        CHECK(back.D13 == p.D13);
        CHECK(back.V1 == p.V1);
        CHECK(back.V2 == p.V2);
        CHECK(back.V3 == p.V3);
        CHECK(back.Delta1 == p.Delta1);
        CHECK(back.Delta2 == p.Delta2);
        CHECK(back.Delta3 == p.Delta3);
        CHECK(back.A1 == p.A1);
        CHECK(back.A2 == p.A2);
        CHECK(back.A3 == p.A3);
        CHECK(back.T == p.T);

        // The shipped default parameter file is exactly the built-in record.
        const CellParams shipped = cell_params_from_json(
            load_json_file(std::string(NHQC_SOURCE_DIR) + "/configs/cell_params_default.json"));
        const json builtin = to_json(CellParams{});
        CHECK(to_json(shipped) == builtin);

        json wrong = to_json(p);
        wrong["schema"] = "cell_params/2";
        CHECK_THROWS_AS(cell_params_from_json(wrong), structural_error);
        json missing = to_json(p);
        missing.erase("T");
        CHECK_THROWS_AS(cell_params_from_json(missing), structural_error);
    }

    TEST_CASE("control sequences round trip") {
        ControlSequence seq = tile_eight({1.1, 0.9, 1.3, 0.7, 1.6, 0.8, 1.2, 1.0}, 250.0);
        seq.repetitions = 3;
        seq.warnings.push_back("segment 12 strength close to zero");

        const ControlSequence back = control_sequence_from_json(to_json(seq));
        CHECK(back.T == seq.T);
        CHECK(back.repetitions == 3);
        CHECK(back.strengths() == seq.strengths());
        CHECK(back.warnings == seq.warnings);
        for (std::size_t i = 0; i < 64; ++i)
            CHECK(back.segments[i].perturbation == seq.segments[i].perturbation);

        // Loaders validate: a parity break or a truncated table is rejected.
        json parity = to_json(seq);
        parity["segments"][1]["perturbation"] = "S";
        CHECK_THROWS_AS(control_sequence_from_json(parity), structural_error);
        json truncated = to_json(seq);
        truncated["segments"].erase(63);
        CHECK_THROWS_AS(control_sequence_from_json(truncated), structural_error);
        json unknown = to_json(seq);
        unknown["segments"][0]["perturbation"] = "X";
        CHECK_THROWS_AS(control_sequence_from_json(unknown), structural_error);
    }

    TEST_CASE("control sequence table output") {
        const ControlSequence base = tile_eight({1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, 250.0);
        ControlSequence seq = base;
        seq.segments[0].C = 1.25;

        const std::string csv = control_sequence_csv(seq, &base);
        std::istringstream lines(csv);
        std::string line;
        REQUIRE(std::getline(lines, line));
        CHECK(line == "k,perturbation,C,delta_C");
        REQUIRE(std::getline(lines, line));
        CHECK(line == "1,S,1.25,0.25");
        REQUIRE(std::getline(lines, line));
        CHECK(line == "2,omega,1.0,0.0");
        int rows = 2;
        while (std::getline(lines, line)) ++rows;
        CHECK(rows == 64);

        // Without a baseline the delta column is zero.
        const std::string flat = control_sequence_csv(base, nullptr);
        std::istringstream flat_lines(flat);
        std::getline(flat_lines, line);
        std::getline(flat_lines, line);
        CHECK(line == "1,S,1.0,0.0");
    }

    TEST_CASE("gate specifications round trip") {
        const std::vector<GateSpec> specs = {GateSpec::Toffoli(), GateSpec::Perm(2, 3),
                                             GateSpec::Split(2),
                                             GateSpec::CondPhase(1, 3, -std::numbers::pi / 8)};
        for (const GateSpec& spec : specs) {
            const GateSpec back = gate_spec_from_json(to_json(spec));
            CHECK(back.kind == spec.kind);
            CHECK(back.q1 == spec.q1);
            CHECK(back.q2 == spec.q2);
            CHECK(back.phi == spec.phi);
            CHECK((gate_matrix(back) - gate_matrix(spec)).norm() == 0.0);
        }

        json unknown = to_json(GateSpec::Toffoli());
        unknown["kind"] = "fredkin";
        CHECK_THROWS_AS(gate_spec_from_json(unknown), structural_error);
        json clash = to_json(GateSpec::Perm(2, 3));
        clash["q2"] = 2;
        CHECK_THROWS_AS(gate_spec_from_json(clash), structural_error);
    }

    TEST_CASE("register states round trip") {
        RegisterState psi;
        psi.n = 2;
        psi.amplitudes = Vector(4);
        psi.amplitudes << complexd(0.5, 0.0), complexd(0.0, 0.5), complexd(-0.5, 0.0),
            complexd(0.0, -0.5);
        const RegisterState back = register_state_from_json(to_json(psi));
        CHECK(back.n == 2);
        CHECK((back.amplitudes - psi.amplitudes).norm() == 0.0);

        RegisterState unnormalized = psi;
        unnormalized.amplitudes *= 1.5;
        CHECK_THROWS_AS(to_json(unnormalized), structural_error);
        json doc = to_json(psi);
        doc["amplitudes"][0] = json::array({0.9, 0.0});
        CHECK_THROWS_AS(register_state_from_json(doc), structural_error);
        json short_doc = to_json(psi);
        short_doc["amplitudes"].erase(3);
        CHECK_THROWS_AS(register_state_from_json(short_doc), structural_error);
    }

    TEST_CASE("gate programs round trip") {
        GateProgram prog;
        prog.n = 3;
        prog.steps.push_back(
            ProgramStep::CellOp({3, 1}, nhqc::testing::random_unitary(4, 131), "entangle"));
        prog.steps.push_back(ProgramStep::Exchange(1, 2, "shuffle"));
        prog.exchange_count = 1;

        const GateProgram back = gate_program_from_json(to_json(prog));
        CHECK(back.n == 3);
        REQUIRE(back.steps.size() == 2);
        CHECK(back.steps[0].type == ProgramStep::Type::cell_op);
        CHECK(back.steps[0].atoms == std::vector<int>{3, 1});
        CHECK((back.steps[0].U - prog.steps[0].U).norm() == 0.0);
        CHECK(back.steps[0].label == "entangle");
        CHECK(back.steps[1].type == ProgramStep::Type::exchange);
        CHECK(back.steps[1].a == 1);
        CHECK(back.steps[1].b == 2);
        CHECK(back.exchange_count == 1);  // recomputed while loading

        json doc = to_json(prog);
        doc["steps"][1]["type"] = "teleport";
        CHECK_THROWS_AS(gate_program_from_json(doc), structural_error);
    }

    TEST_CASE("matrices round trip byte for byte") {
        const Matrix M = nhqc::testing::random_complex(5, 3, 132);
        const Matrix back = matrix_from_json(matrix_to_json(M));
        CHECK(back.rows() == 5);
        CHECK(back.cols() == 3);
        CHECK((back - M).norm() == 0.0);

        json ragged = matrix_to_json(M);
        ragged[2].erase(2);
        CHECK_THROWS_AS(matrix_from_json(ragged), structural_error);
        CHECK_THROWS_AS(matrix_from_json(json::object()), structural_error);
    }

    TEST_CASE("file loading") {
        const fs::path dir = scratch("files");
        CHECK_THROWS_AS(load_json_file((dir / "absent.json").string()), structural_error);
        write_text_file((dir / "broken.json").string(), "{ not json");
        CHECK_THROWS_AS(load_json_file((dir / "broken.json").string()), structural_error);
        write_text_file((dir / "ok.json").string(), "{\"schema\": \"cell_params/1\"}\n");
        CHECK(load_json_file((dir / "ok.json").string())["schema"] == "cell_params/1");
    }

    TEST_CASE("command dispatch exit codes") {
        CHECK(cli::dispatch(std::vector<std::string>{}) == 2);
        CHECK(cli::dispatch({"bogus"}) == 2);
        CHECK(cli::dispatch({"synth-gate"}) == 2);  // --gate is required
        CHECK(cli::dispatch({"check", "--params", "/nonexistent/params.json"}) == 1);
    }

    TEST_CASE("controllability certificate through the command line") {
        const fs::path dir = scratch("check");
        CHECK(cli::dispatch({"check", "--out", dir.string()}) == 0);
        const json report = load_json_file((dir / "closure_report.json").string());
        CHECK(report["schema"] == "closure_report/1");
        CHECK(report["dim_reached"] == 64);
        CHECK(report["verdict"] == "completely controllable");
        CHECK(report.contains("manifest"));
    }

    TEST_CASE("running a program through the command line") {
        const fs::path dir = scratch("run");

        GateProgram prog;
        prog.n = 2;
        prog.steps.push_back(ProgramStep::Exchange(1, 2));
        prog.exchange_count = 1;
        write_text_file((dir / "program.json").string(), to_json(prog).dump(2));
        const RegisterState input = RegisterState::basis_state(2, 1);
        write_text_file((dir / "state.json").string(), to_json(input).dump(2));

        CHECK(cli::dispatch({"run", "--program", (dir / "program.json").string(), "--state",
                             (dir / "state.json").string(), "--out", dir.string()}) == 0);
        const RegisterState output =
            register_state_from_json(load_json_file((dir / "output_state.json").string()));
        // The exchange moves the excitation from atom 1 to atom 2.
        CHECK(std::abs(output.amplitudes(2) - 1.0) == 0.0);

        // An empty program is the identity channel on the state document.
        GateProgram empty;
        empty.n = 2;
        write_text_file((dir / "empty.json").string(), to_json(empty).dump(2));
        CHECK(cli::dispatch({"run", "--program", (dir / "empty.json").string(), "--state",
                             (dir / "state.json").string(), "--out", dir.string()}) == 0);
        const RegisterState echoed =
            register_state_from_json(load_json_file((dir / "output_state.json").string()));
        CHECK((echoed.amplitudes - input.amplitudes).norm() == 0.0);

        // A program too wide for the state is a domain error, not a crash.
        GateProgram wide;
        wide.n = 3;
        write_text_file((dir / "wide.json").string(), to_json(wide).dump(2));
        CHECK(cli::dispatch({"run", "--program", (dir / "wide.json").string(), "--state",
                             (dir / "state.json").string(), "--out", dir.string()}) == 1);
    }

    TEST_CASE("lattice emulation through the command line") {
        const fs::path dir = scratch("emulate");

        json config;
        config["schema"] = "lattice_config/1";
        config["rows"] = 1;
        config["cols"] = 3;
        config["epsilon"] = 0.1;
        config["steps"] = 4;
        json period = json::array();
        period.push_back(std::vector<double>(64, 0.0));
        config["coefficients"] = json::array({period, period, period});
        config["initial_basis"] = 5;
        write_text_file((dir / "config.json").string(), config.dump(2));

        CHECK(cli::dispatch({"emulate", "--config", (dir / "config.json").string(), "--out",
                             dir.string()}) == 0);
        const std::string csv = slurp(dir / "trajectory.csv");
        std::istringstream lines(csv);
        std::string line;
        REQUIRE(std::getline(lines, line));
        CHECK(line.rfind("# manifest ", 0) == 0);
        REQUIRE(std::getline(lines, line));
        CHECK(line == "step,<Z1>,<Z2>,<Z3>");
        // Zero coefficients freeze the trajectory: |101> keeps <Z> = (-1,1,-1).
        REQUIRE(std::getline(lines, line));
        CHECK(line == "0,-1.0,1.0,-1.0");
        int rows = 1;
        while (std::getline(lines, line)) ++rows;
        CHECK(rows == 5);

        json bad = config;
        bad["coefficients"][0][0] = std::vector<double>(63, 0.0);
        write_text_file((dir / "bad.json").string(), bad.dump(2));
        CHECK(cli::dispatch({"emulate", "--config", (dir / "bad.json").string(), "--out",
                             dir.string()}) == 1);
    }
}
