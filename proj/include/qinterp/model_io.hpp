#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "qinterp/spectral.hpp"

namespace qinterp {

// Malformed operator files (bad JSON, wrong shapes, unknown kinds).
struct ModelIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// {"kind": "dense", "n": N, "entries": [[w,x,y,z], ...]} row-major, or
// {"kind": "diagonal", "entries": [[w,x,y,z], ...]}.
nlohmann::json operator_to_json(const OperatorModel& model);
OperatorModel operator_from_json(const nlohmann::json& j);

OperatorModel load_operator(const std::string& path);
void save_operator(const std::string& path, const OperatorModel& model);

}  // namespace qinterp
