#include "qinterp/model_io.hpp"

#include <fstream>

namespace qinterp {
namespace {

nlohmann::json quat_to_json(const Quaternion& q) {
    return nlohmann::json::array({q.w, q.x, q.y, q.z});
}

Quaternion quat_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4)
        throw ModelIoError("quaternion entry must be a 4-element array");
    for (const auto& c : j)
        if (!c.is_number()) throw ModelIoError("quaternion components must be numbers");
    return Quaternion{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                      j[3].get<double>()};
}

}  // namespace

nlohmann::json operator_to_json(const OperatorModel& model) {
    nlohmann::json j;
    nlohmann::json entries = nlohmann::json::array();
    if (model.diagonal) {
        j["kind"] = "diagonal";
        for (const auto& q : model.diag_entries) entries.push_back(quat_to_json(q));
    } else {
        j["kind"] = "dense";
        j["n"] = model.dense.n;
        for (const auto& q : model.dense.a) entries.push_back(quat_to_json(q));
    }
    j["entries"] = std::move(entries);
    return j;
}

OperatorModel operator_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ModelIoError("operator file must hold a JSON object");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ModelIoError("operator file needs a string \"kind\"");
    if (!j.contains("entries") || !j["entries"].is_array())
        throw ModelIoError("operator file needs an \"entries\" array");
    const std::string kind = j["kind"].get<std::string>();
    const auto& entries = j["entries"];

    if (kind == "diagonal") {
        std::vector<Quaternion> d;
        d.reserve(entries.size());
        for (const auto& e : entries) d.push_back(quat_from_json(e));
        if (d.empty()) throw ModelIoError("diagonal operator needs at least one entry");
        return OperatorModel::make_diagonal(std::move(d));
    }
    if (kind == "dense") {
        if (!j.contains("n") || !j["n"].is_number_integer())
            throw ModelIoError("dense operator needs an integer \"n\"");
        const int n = j["n"].get<int>();
        if (n < 1) throw ModelIoError("dense operator needs n >= 1");
        if (entries.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
            throw ModelIoError("dense operator needs n*n entries");
        QMatrix m(n);
        for (size_t i = 0; i < entries.size(); ++i) m.a[i] = quat_from_json(entries[i]);
        return OperatorModel::make_dense(std::move(m));
    }
    throw ModelIoError("unknown operator kind: " + kind);
}

OperatorModel load_operator(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelIoError("cannot open operator file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelIoError("cannot parse operator file " + path + ": " + e.what());
    }
    return operator_from_json(j);
}

void save_operator(const std::string& path, const OperatorModel& model) {
    std::ofstream out(path);
    if (!out) throw ModelIoError("cannot write operator file: " + path);
    out << operator_to_json(model).dump(2) << "\n";
}

}  // namespace qinterp
