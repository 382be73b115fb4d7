#include "qinterp/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace qinterp {

double VerificationReport::margin_of(double measured, double bound) {
    if (bound > 0.0) return (bound - measured) / bound;
    return measured <= 0.0 ? 0.0 : -1.0;
}

void VerificationReport::finalize(double tol) {
    margin = margin_of(measured, bound);
    pass = margin >= -tol;
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json j;
    j["check"] = check;
    j["params"] = params;
    j["measured"] = measured;
    j["bound"] = bound;
    j["margin"] = margin;
    j["pass"] = pass;
    j["solver_gap"] = solver_gap;
    j["quad_err"] = quad_err;
    j["ms"] = 0;
    return j;
}

std::string VerificationReport::to_json_line() const { return to_json().dump(); }

VerificationReport VerificationReport::from_json(const nlohmann::json& j) {
    VerificationReport r;
    r.check = j.at("check").get<std::string>();
    r.params = j.at("params");
    r.measured = j.at("measured").get<double>();
    r.bound = j.at("bound").get<double>();
    r.margin = j.at("margin").get<double>();
    r.pass = j.at("pass").get<bool>();
    r.solver_gap = j.at("solver_gap").get<double>();
    r.quad_err = j.at("quad_err").get<double>();
    return r;
}

namespace {
// RFC 4180 style quoting; params strings contain commas and quotes.
std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

std::string num_repr(double v) {
    nlohmann::json j = v;
    return j.dump();
}
}  // namespace

std::string csv_from_reports(std::vector<VerificationReport> reports) {
    struct Row {
        std::string check, params_s;
        const VerificationReport* r;
    };
    std::vector<Row> rows;
    rows.reserve(reports.size());
    for (const auto& r : reports) rows.push_back({r.check, r.params.dump(), &r});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.check != b.check ? a.check < b.check : a.params_s < b.params_s;
    });
    std::map<std::pair<std::string, std::string>, int> multiplicity;
    for (const auto& row : rows) ++multiplicity[{row.check, row.params_s}];
    std::ostringstream out;
    out << "check,params,measured,bound,margin,pass,dedup\n";
    for (const auto& row : rows) {
        const bool dup = multiplicity[{row.check, row.params_s}] > 1;
        out << csv_escape(row.check) << ',' << csv_escape(row.params_s) << ','
            << num_repr(row.r->measured) << ',' << num_repr(row.r->bound) << ','
            << num_repr(row.r->margin) << ',' << (row.r->pass ? "true" : "false")
            << ',' << (dup ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace qinterp
