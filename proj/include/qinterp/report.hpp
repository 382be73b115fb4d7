// Verification reports: one inequality check with its parameters, measured
// quantity, bound, margin and pass flag, serialized as JSON lines and CSV.
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qinterp {

struct VerificationReport {
    std::string check;
    nlohmann::json params = nlohmann::json::object();
    double measured = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool pass = false;
    double solver_gap = 0.0;
    double quad_err = 0.0;
    // Serialized as 0 so that fixed-seed reruns are byte-identical; wall time
    // is reported on the human-readable channel only.

    // (bound - measured)/bound, with the 0/0 case mapped to 0 and a positive
    // measurement against a zero bound mapped to -1.
    static double margin_of(double measured, double bound);
    void finalize(double tol);

    nlohmann::json to_json() const;
    std::string to_json_line() const;
    static VerificationReport from_json(const nlohmann::json& j);
};

// CSV table: check,params,measured,bound,margin,pass,dedup with rows sorted
// by check name then serialized params; dedup = 1 marks repeated
// (check, params) keys.
std::string csv_from_reports(std::vector<VerificationReport> reports);

}  // namespace qinterp
