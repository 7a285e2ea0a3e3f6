#pragma once

#include <string>

#include <json.hpp>

#include "nhqc/controllability.hpp"
#include "nhqc/device.hpp"
#include "nhqc/gates.hpp"
#include "nhqc/hamiltonians.hpp"
#include "nhqc/synthesis.hpp"

namespace nhqc {

// All documents carry a versioned "schema" field; loaders reject documents
// whose schema tag does not match.  Field order is fixed (ordered_json) and
// doubles serialize via shortest round-trip formatting, so identical inputs
// produce byte-identical documents.
using json = nlohmann::ordered_json;

json to_json(const CellParams& p);
CellParams cell_params_from_json(const json& j);

json to_json(const ControlSequence& seq);
ControlSequence control_sequence_from_json(const json& j);
std::string control_sequence_csv(const ControlSequence& seq, const ControlSequence* base = nullptr);

json to_json(const ClosureReport& report, bool include_basis = false);

json to_json(const GateSpec& spec);
GateSpec gate_spec_from_json(const json& j);

json to_json(const RegisterState& state);
RegisterState register_state_from_json(const json& j);

json to_json(const GateProgram& prog);
GateProgram gate_program_from_json(const json& j);

json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const json& j);

// Reads a whole file; throws structural_error on missing/unreadable paths.
json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace nhqc
