#include "nhqc/json_io.hpp"

#include <fstream>
#include <sstream>

#include "nhqc/errors.hpp"

namespace nhqc {

namespace {

void require_schema(const json& j, const std::string& tag) {
    if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string() ||
        j["schema"].get<std::string>() != tag)
        throw structural_error("document does not carry schema \"" + tag + "\"");
}

double number_field(const json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_number())
        throw structural_error(std::string("missing or non-numeric field \"") + name + "\"");
    return j[name].get<double>();
}

int int_field(const json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_number_integer())
        throw structural_error(std::string("missing or non-integer field \"") + name + "\"");
    return j[name].get<int>();
}

std::string string_field(const json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_string())
        throw structural_error(std::string("missing or non-string field \"") + name + "\"");
    return j[name].get<std::string>();
}

json complex_to_json(const complexd& z) { return json::array({z.real(), z.imag()}); }

complexd complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw structural_error("complex entries are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json to_json(const CellParams& p) {
    json j;
    j["schema"] = "cell_params/1";
    j["D12"] = p.D12;
    j["D23"] = p.D23;
    j["D13"] = p.D13;
    j["V1"] = p.V1;
    j["V2"] = p.V2;
    j["V3"] = p.V3;
    j["Delta1"] = p.Delta1;
    j["Delta2"] = p.Delta2;
    j["Delta3"] = p.Delta3;
    j["A1"] = p.A1;
    j["A2"] = p.A2;
    j["A3"] = p.A3;
    j["T"] = p.T;
    return j;
}

CellParams cell_params_from_json(const json& j) {
    require_schema(j, "cell_params/1");
    CellParams p;
    p.D12 = number_field(j, "D12");
    p.D23 = number_field(j, "D23");
    p.D13 = number_field(j, "D13");
    p.V1 = number_field(j, "V1");
    p.V2 = number_field(j, "V2");
    p.V3 = number_field(j, "V3");
    p.Delta1 = number_field(j, "Delta1");
    p.Delta2 = number_field(j, "Delta2");
    p.Delta3 = number_field(j, "Delta3");
    p.A1 = number_field(j, "A1");
    p.A2 = number_field(j, "A2");
    p.A3 = number_field(j, "A3");
    p.T = number_field(j, "T");
    if (!(p.T > 0.0)) throw structural_error("segment duration T must be positive");
    return p;
}

json to_json(const ControlSequence& seq) {
    json j;
    j["schema"] = "control_sequence/1";
    j["T"] = seq.T;
    j["m"] = seq.repetitions;
    j["segments"] = json::array();
    for (const Segment& s : seq.segments) {
        json js;
        js["k"] = s.k;
        js["perturbation"] = (s.perturbation == Perturbation::S) ? "S" : "omega";
        js["C"] = s.C;
        j["segments"].push_back(std::move(js));
    }
    if (!seq.warnings.empty()) j["warnings"] = seq.warnings;
    return j;
}

ControlSequence control_sequence_from_json(const json& j) {
    require_schema(j, "control_sequence/1");
    ControlSequence seq;
    seq.T = number_field(j, "T");
    seq.repetitions = int_field(j, "m");
    if (!j.contains("segments") || !j["segments"].is_array())
        throw structural_error("control sequence needs a \"segments\" array");
    for (const json& js : j["segments"]) {
        Segment s;
        s.k = int_field(js, "k");
        const std::string p = string_field(js, "perturbation");
        if (p == "S")
            s.perturbation = Perturbation::S;
        else if (p == "omega")
            s.perturbation = Perturbation::omega;
        else
            throw structural_error("perturbation must be \"S\" or \"omega\", got \"" + p + "\"");
        s.C = number_field(js, "C");
        seq.segments.push_back(s);
    }
    if (j.contains("warnings"))
        for (const json& w : j["warnings"]) seq.warnings.push_back(w.get<std::string>());
    validate_sequence(seq);
    return seq;
}

std::string control_sequence_csv(const ControlSequence& seq, const ControlSequence* base) {
    std::ostringstream out;
    out << "k,perturbation,C,delta_C\n";
    for (std::size_t i = 0; i < seq.segments.size(); ++i) {
        const Segment& s = seq.segments[i];
        const double delta = base ? (s.C - base->segments.at(i).C) : 0.0;
        // Route doubles through the JSON formatter so CSV and JSON agree
        // byte-for-byte on every value.
        out << s.k << ',' << ((s.perturbation == Perturbation::S) ? "S" : "omega") << ','
            << json(s.C).dump() << ',' << json(delta).dump() << '\n';
    }
    return out.str();
}

json to_json(const ClosureReport& report, bool include_basis) {
    json j;
    j["schema"] = "closure_report/1";
    j["dim_reached"] = report.dim_reached;
    j["target_dim"] = report.target_dim;
    j["rank_tolerance"] = report.rank_tolerance;
    j["generations_used"] = report.generations_used;
    j["verdict"] = report.verdict;
    if (include_basis) {
        j["basis"] = json::array();
        for (const Matrix& b : report.basis) j["basis"].push_back(matrix_to_json(b));
    }
    return j;
}

json to_json(const GateSpec& spec) {
    json j;
    j["schema"] = "gate_spec/1";
    switch (spec.kind) {
        case GateSpec::Kind::toffoli: j["kind"] = "toffoli"; break;
        case GateSpec::Kind::perm: j["kind"] = "perm"; break;
        case GateSpec::Kind::split: j["kind"] = "split"; break;
        case GateSpec::Kind::cond_phase: j["kind"] = "cond_phase"; break;
    }
    j["q1"] = spec.q1;
    j["q2"] = spec.q2;
    j["phi"] = spec.phi;
    return j;
}

GateSpec gate_spec_from_json(const json& j) {
    require_schema(j, "gate_spec/1");
    const std::string kind = string_field(j, "kind");
    GateSpec spec;
    if (kind == "toffoli")
        spec.kind = GateSpec::Kind::toffoli;
    else if (kind == "perm")
        spec.kind = GateSpec::Kind::perm;
    else if (kind == "split")
        spec.kind = GateSpec::Kind::split;
    else if (kind == "cond_phase")
        spec.kind = GateSpec::Kind::cond_phase;
    else
        throw structural_error("unknown gate kind \"" + kind + "\"");
    if (j.contains("q1")) spec.q1 = int_field(j, "q1");
    if (j.contains("q2")) spec.q2 = int_field(j, "q2");
    if (j.contains("phi")) spec.phi = number_field(j, "phi");
    gate_matrix(spec);  // validates the indices
    return spec;
}

json to_json(const RegisterState& state) {
    require_normalized(state);
    json j;
    j["schema"] = "register_state/1";
    j["n"] = state.n;
    j["amplitudes"] = json::array();
    for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i)
        j["amplitudes"].push_back(complex_to_json(state.amplitudes(i)));
    return j;
}

RegisterState register_state_from_json(const json& j) {
    require_schema(j, "register_state/1");
    RegisterState state;
    state.n = int_field(j, "n");
    if (state.n < 1 || state.n > 30) throw structural_error("register width out of range");
    if (!j.contains("amplitudes") || !j["amplitudes"].is_array())
        throw structural_error("register state needs an \"amplitudes\" array");
    state.amplitudes = Vector::Zero(std::int64_t{1} << state.n);
    if (static_cast<Eigen::Index>(j["amplitudes"].size()) != state.amplitudes.size())
        throw structural_error("amplitude count does not match 2^n");
    for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i)
        state.amplitudes(i) = complex_from_json(j["amplitudes"][static_cast<std::size_t>(i)]);
    require_normalized(state);
    return state;
}

json to_json(const GateProgram& prog) {
    json j;
    j["schema"] = "gate_program/1";
    j["n"] = prog.n;
    j["exchange_count"] = prog.exchange_count;
    j["steps"] = json::array();
    for (const ProgramStep& step : prog.steps) {
        json js;
        if (step.type == ProgramStep::Type::cell_op) {
            js["type"] = "cell_op";
            js["atoms"] = step.atoms;
            js["U"] = matrix_to_json(step.U);
        } else {
            js["type"] = "exchange";
            js["a"] = step.a;
            js["b"] = step.b;
        }
        js["label"] = step.label;
        j["steps"].push_back(std::move(js));
    }
    return j;
}

GateProgram gate_program_from_json(const json& j) {
    require_schema(j, "gate_program/1");
    GateProgram prog;
    prog.n = int_field(j, "n");
    if (!j.contains("steps") || !j["steps"].is_array())
        throw structural_error("gate program needs a \"steps\" array");
    for (const json& js : j["steps"]) {
        const std::string type = string_field(js, "type");
        ProgramStep step;
        if (type == "cell_op") {
            step.type = ProgramStep::Type::cell_op;
            if (!js.contains("atoms") || !js["atoms"].is_array())
                throw structural_error("cell_op step needs an \"atoms\" array");
            for (const json& a : js["atoms"]) step.atoms.push_back(a.get<int>());
            step.U = matrix_from_json(js.at("U"));
        } else if (type == "exchange") {
            step.type = ProgramStep::Type::exchange;
            step.a = int_field(js, "a");
            step.b = int_field(js, "b");
            ++prog.exchange_count;
        } else {
            throw structural_error("unknown step type \"" + type + "\"");
        }
        if (js.contains("label")) step.label = string_field(js, "label");
        prog.steps.push_back(std::move(step));
    }
    return prog;
}

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(complex_to_json(M(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw structural_error("matrix JSON must be a row array");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw structural_error("matrix JSON rows have inconsistent lengths");
        for (Eigen::Index c = 0; c < cols; ++c)
            M(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    return M;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw structural_error("cannot open \"" + path + "\"");
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw structural_error("malformed JSON in \"" + path + "\": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw structural_error("cannot write \"" + path + "\"");
    out << text;
    if (!out) throw structural_error("write to \"" + path + "\" failed");
}

}  // namespace nhqc
