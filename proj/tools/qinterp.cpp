#include <glob.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qinterp/checks.hpp"
#include "qinterp/model_io.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitIo = 3;

std::string format_sphere(const qinterp::Quaternion& s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%.12g,%.12g)", qinterp::re(s),
                  qinterp::im_abs(s));
    return buf;
}

int cmd_spectrum(const std::string& file) {
    const auto model = qinterp::load_operator(file);
    const auto spheres = qinterp::s_spectrum(model);
    std::string line;
    for (size_t j = 0; j < spheres.size(); ++j) {
        if (j) line += ", ";
        line += format_sphere(spheres[j]);
    }
    std::cout << line << "\n";
    return kExitPass;
}

int cmd_sectorial(const std::string& file, double omega, const qinterp::LogGrid& grid) {
    const auto model = qinterp::load_operator(file);
    const auto profile = qinterp::sectorial_scan(model, omega, grid);

    nlohmann::json j;
    j["omega"] = profile.omega;
    j["grid_t"] = profile.grid_t;
    j["q_scaled"] = profile.q_scaled;
    j["tq_scaled"] = profile.tq_scaled;
    j["measured_M"] = profile.measured_M;
    std::cout << j.dump() << "\n";

    size_t wq = 0, wtq = 0;
    for (size_t i = 0; i < profile.grid_t.size(); ++i) {
        if (profile.q_scaled[i] > profile.q_scaled[wq]) wq = i;
        if (profile.tq_scaled[i] > profile.tq_scaled[wtq]) wtq = i;
    }
    std::cerr << "measured_M = " << profile.measured_M << "\n"
              << "worst t^2*||Q^-1|| = " << profile.q_scaled[wq] << " at t = "
              << profile.grid_t[wq] << "\n"
              << "worst t*||T Q^-1|| = " << profile.tq_scaled[wtq] << " at t = "
              << profile.grid_t[wtq] << "\n";
    return kExitPass;
}

int cmd_verify(qinterp::CheckConfig cfg, const std::string& p_text,
               const std::string& json_out) {
    if (p_text == "inf" || p_text == "Inf" || p_text == "INF") {
        cfg.p = std::numeric_limits<double>::infinity();
    } else {
        try {
            size_t used = 0;
            cfg.p = std::stod(p_text, &used);
            if (used != p_text.size()) throw std::invalid_argument(p_text);
        } catch (const std::exception&) {
            throw std::invalid_argument("--p must be a number or \"inf\"");
        }
    }

    const auto start = std::chrono::steady_clock::now();
    const qinterp::VerificationReport r = qinterp::run_check(cfg);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();

    const std::string line = r.to_json_line();
    std::cout << line << "\n";
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) throw qinterp::ModelIoError("cannot write report file: " + json_out);
        out << line << "\n";
    }
    std::cerr << r.check << (r.pass ? " pass" : " FAIL") << "  margin=" << r.margin
              << "  measured=" << r.measured << "  bound=" << r.bound << "  ("
              << ms << " ms)\n";
    return r.pass ? kExitPass : kExitFail;
}

int cmd_report(const std::string& pattern, const std::string& csv_out) {
    glob_t g{};
    const int rc = glob(pattern.c_str(), 0, nullptr, &g);
    std::vector<std::string> files;
    if (rc == 0)
        for (size_t i = 0; i < g.gl_pathc; ++i) files.emplace_back(g.gl_pathv[i]);
    globfree(&g);
    if (rc != 0 && rc != GLOB_NOMATCH)
        throw qinterp::ModelIoError("cannot expand pattern: " + pattern);

    std::vector<qinterp::VerificationReport> reports;
    std::vector<std::string> bad;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) {
            bad.push_back(file + ": cannot open");
            continue;
        }
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                reports.push_back(
                    qinterp::VerificationReport::from_json(nlohmann::json::parse(line)));
            } catch (const std::exception& e) {
                bad.push_back(file + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    if (!bad.empty()) {
        for (const auto& b : bad) std::cerr << b << "\n";
        return kExitIo;
    }

    const std::string csv = qinterp::csv_from_reports(std::move(reports));
    std::cout << csv;
    if (!csv_out.empty()) {
        std::ofstream out(csv_out);
        if (!out) throw qinterp::ModelIoError("cannot write csv file: " + csv_out);
        out << csv;
    }
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verifier for quaternionic operator interpolation inequalities"};
    app.require_subcommand(1);

    std::string spectrum_file;
    auto* sp = app.add_subcommand("spectrum", "print spherical spectrum representatives");
    sp->add_option("file", spectrum_file, "operator file")->required();

    std::string sect_file;
    double sect_omega = qinterp::kPi;
    std::vector<double> sect_grid = {1e-3, 1e3, 200};
    auto* se = app.add_subcommand("sectorial", "scan a spectral ray for decay constants");
    se->add_option("file", sect_file, "operator file")->required();
    se->add_option("--omega", sect_omega, "ray angle in [0, pi]");
    se->add_option("--grid", sect_grid, "TMIN TMAX COUNT")->expected(3);

    qinterp::CheckConfig cfg;
    std::string p_text = "2";
    std::string json_out;
    auto* ve = app.add_subcommand("verify", "run one inequality check");
    ve->add_option("check", cfg.check, "check name")->required();
    ve->add_option("--operator", cfg.operator_file, "operator file");
    ve->add_option("--builtin", cfg.builtin, "builtin family, e.g. a, b:8, diag-real");
    ve->add_option("--omega", cfg.omega, "ray angle in [0, pi]");
    ve->add_option("--theta", cfg.theta, "interpolation parameter in (0, 1)");
    ve->add_option("--p", p_text, "exponent in [1, inf], \"inf\" allowed");
    auto* opt_n = ve->add_option("--n", cfg.n, "power index (series: truncation order)");
    ve->add_option("--k", cfg.k, "middle power index");
    ve->add_option("--m", cfg.m, "high power index");
    auto* opt_samples =
        ve->add_option("--samples", cfg.samples, "sample vector count (series: matrix count)");
    ve->add_option("--seed", cfg.seed, "random seed");
    ve->add_option("--tol", cfg.tol, "margin tolerance");
    ve->add_option("--json", json_out, "also write the JSON report line to this file");

    std::string report_glob, csv_out;
    auto* re = app.add_subcommand("report", "summarize JSON report lines as CSV");
    re->add_option("glob", report_glob, "glob of JSON-lines files")->required();
    re->add_option("--csv", csv_out, "also write the CSV to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitIo;
    }

    try {
        if (sp->parsed()) return cmd_spectrum(spectrum_file);
        if (se->parsed()) {
            const qinterp::LogGrid grid(sect_grid[0], sect_grid[1],
                                        static_cast<int>(sect_grid[2]));
            return cmd_sectorial(sect_file, sect_omega, grid);
        }
        if (ve->parsed()) {
            if (cfg.check == "series") {
                if (!opt_n->count()) cfg.n = 40;
                if (!opt_samples->count()) cfg.samples = 20;
            }
            return cmd_verify(cfg, p_text, json_out);
        }
        if (re->parsed()) return cmd_report(report_glob, csv_out);
    } catch (const qinterp::SpectralPointError& e) {
        std::cerr << "spectral grid point: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const qinterp::ModelIoError& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    } catch (const qinterp::SingularMatrixError& e) {
        std::cerr << e.what() << "\n";
        return kExitPrecondition;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::domain_error& e) {
        std::cerr << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitPrecondition;
    }
    return kExitPass;
}
