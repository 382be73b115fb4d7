#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "qinterp/checks.hpp"

using namespace qinterp;

TEST_CASE("builtin family a is diagonal with log spaced imaginary entries") {
    const OperatorModel T = builtin_model("a:4", 1);
    REQUIRE(T.diagonal);
    REQUIRE(T.dim() == 4);
    CHECK(builtin_dim("a") == 16);
    CHECK(builtin_dim("a:4") == 4);

    CHECK(abs(T.diag_entries[0]) == doctest::Approx(1e-2));
    CHECK(abs(T.diag_entries[3]) == doctest::Approx(1e2));
    for (const auto& q : T.diag_entries) CHECK(re(q) == 0.0);

    // The alias and the short name build the same operator, independent of seed.
    const OperatorModel alias = builtin_model("diag-imag:4", 99);
    for (size_t j = 0; j < 4; ++j)
        CHECK(approx_equal(T.diag_entries[j], alias.diag_entries[j], 0.0));

    // Entries sit on distinct spheres.
    std::set<std::pair<double, double>> seen;
    for (const auto& q : T.diag_entries) seen.insert({re(q), im_abs(q)});
    CHECK(seen.size() == 4);
}

TEST_CASE("builtin family c is real positive diagonal") {
    const OperatorModel T = builtin_model("c:3", 1);
    REQUIRE(T.diagonal);
    for (const auto& q : T.diag_entries) {
        CHECK(im_abs(q) == 0.0);
        CHECK(re(q) > 0.0);
    }
    CHECK(re(T.diag_entries[0]) == doctest::Approx(1e-2));
    CHECK(re(T.diag_entries[2]) == doctest::Approx(1e2));
}

TEST_CASE("builtin family b conjugates family a by a seeded unitary") {
    const OperatorModel B = builtin_model("b:6", 3);
    REQUIRE_FALSE(B.diagonal);
    CHECK(op_norm(B.dense) == doctest::Approx(1e2).epsilon(1e-6));

    const OperatorModel A = builtin_model("a:6", 3);
    auto sa = s_spectrum(A);
    auto sb = s_spectrum(B);
    REQUIRE(sa.size() == sb.size());
    // Real-part noise in the dense eigenvalues perturbs the (Re, |Im|) sort
    // order, so compare the sphere sets ordered by radius.
    const auto by_radius = [](const Quaternion& l, const Quaternion& r) {
        return im_abs(l) < im_abs(r);
    };
    std::sort(sa.begin(), sa.end(), by_radius);
    std::sort(sb.begin(), sb.end(), by_radius);
    for (size_t j = 0; j < sa.size(); ++j) {
        CHECK(re(sa[j]) == doctest::Approx(re(sb[j])).epsilon(1e-8));
        CHECK(im_abs(sa[j]) ==
              doctest::Approx(im_abs(sb[j])).epsilon(1e-8).scale(1.0));
    }

    const OperatorModel B2 = builtin_model("b:6", 3);
    bool identical = true;
    for (size_t j = 0; j < B.dense.a.size(); ++j)
        identical = identical && approx_equal(B.dense.a[j], B2.dense.a[j], 0.0);
    CHECK(identical);

    const OperatorModel B3 = builtin_model("b:6", 4);
    bool differs = false;
    for (size_t j = 0; j < B.dense.a.size(); ++j)
        differs = differs || !approx_equal(B.dense.a[j], B3.dense.a[j], 0.0);
    CHECK(differs);
}

TEST_CASE("builtin parsing rejects malformed names") {
    CHECK_THROWS_AS((void)builtin_model("z", 1), std::invalid_argument);
    CHECK_THROWS_AS((void)builtin_model("a:x", 1), std::invalid_argument);
    CHECK_THROWS_AS((void)builtin_model("a:4y", 1), std::invalid_argument);
    CHECK_THROWS_AS((void)builtin_model("a:0", 1), std::invalid_argument);
    CHECK_THROWS_AS((void)builtin_dim("c:-2"), std::invalid_argument);
}

TEST_CASE("sample vectors start with the basis and stay unit length") {
    const auto vecs = sample_vectors(3, 6, 1);
    REQUIRE(vecs.size() == 6);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            CHECK(abs(vecs[static_cast<size_t>(j)][static_cast<size_t>(i)]) ==
                  doctest::Approx(i == j ? 1.0 : 0.0));
    for (const auto& c : vecs[3]) CHECK(re(c) == doctest::Approx(1.0 / std::sqrt(3.0)));
    for (const auto& v : vecs) CHECK(l2_norm(v) == doctest::Approx(1.0));

    const auto again = sample_vectors(3, 6, 1);
    for (size_t j = 0; j < 6; ++j)
        for (size_t i = 0; i < 3; ++i) CHECK(approx_equal(vecs[j][i], again[j][i], 0.0));

    const auto reseeded = sample_vectors(3, 6, 2);
    bool tail_differs = false;
    for (size_t i = 0; i < 3; ++i)
        tail_differs = tail_differs || !approx_equal(vecs[5][i], reseeded[5][i], 0.0);
    CHECK(tail_differs);
}

TEST_CASE("rng streams are deterministic and in range") {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng c(7);
    for (int i = 0; i < 10; ++i) {
        const double v = c.log_uniform(0.1, 10.0);
        CHECK(v >= 0.1);
        CHECK(v <= 10.0);
    }
    CHECK(l2_norm(Rng(3).unit_vector(5)) == doctest::Approx(1.0));
}

namespace {

CheckConfig fast_config(const std::string& check) {
    CheckConfig cfg;
    cfg.check = check;
    cfg.builtin = "a:6";
    cfg.samples = 2;
    cfg.grid = LogGrid(1e-2, 1e2, 24);
    return cfg;
}

}  // namespace

TEST_CASE("run_check passes for every check on a small model") {
    for (const std::string name : {"lemma-power-bound", "embedding", "series", "thm36"}) {
        CAPTURE(name);
        CheckConfig cfg = fast_config(name);
        cfg.n = 0;
        cfg.k = 1;
        cfg.m = 2;
        const VerificationReport r = run_check(cfg);
        CHECK(r.pass);
        CHECK(r.params.at("source") == "builtin:a:6");
        CHECK(r.params.at("seed") == 1);
    }
}

TEST_CASE("run_check couple props on the default grid") {
    // The closed-form quadrature sub-check needs the default grid resolution.
    CheckConfig cfg = fast_config("couple-props");
    cfg.grid = LogGrid();
    const VerificationReport r = run_check(cfg);
    CHECK(r.check == "couple-props");
    CHECK(r.pass);
}

TEST_CASE("run_check passes for the interpolation checks") {
    {
        CheckConfig cfg = fast_config("thm35");
        cfg.n = 1;
        const VerificationReport r = run_check(cfg);
        CHECK(r.check == "thm35");
        CHECK(r.pass);
        CHECK(r.params.at("M").get<double>() > 0.0);
        CHECK(r.params.at("const_variant") == "(1+3M)^ceil(n/2)");
    }
    {
        CheckConfig cfg = fast_config("thm37");
        cfg.n = 0;
        cfg.k = 1;
        cfg.m = 2;
        const VerificationReport r = run_check(cfg);
        CHECK(r.check == "thm37");
        CHECK(r.pass);
        CHECK(r.measured <= r.bound + cfg.tol);
    }
    {
        CheckConfig cfg = fast_config("op-interp");
        cfg.builtin = "a:4";
        const VerificationReport r = run_check(cfg);
        CHECK(r.check == "op-interp");
        CHECK(r.pass);
        CHECK(r.params.at("p") == 2.0);
    }
}

TEST_CASE("run_check echoes infinite p as a string") {
    CheckConfig cfg = fast_config("thm35");
    cfg.n = 1;
    cfg.p = std::numeric_limits<double>::infinity();
    const VerificationReport r = run_check(cfg);
    CHECK(r.params.at("p") == "inf");
    CHECK(r.pass);
}

TEST_CASE("run_check is deterministic") {
    CheckConfig cfg = fast_config("thm36");
    cfg.n = 0;
    cfg.k = 1;
    cfg.m = 2;
    const std::string once = run_check(cfg).to_json_line();
    const std::string twice = run_check(cfg).to_json_line();
    CHECK(once == twice);
    CHECK(once.find("\"ms\":0") != std::string::npos);
}

TEST_CASE("run_check rejects unknown names and bad power orders") {
    CheckConfig cfg = fast_config("nope");
    CHECK_THROWS_AS((void)run_check(cfg), std::invalid_argument);

    CheckConfig bad = fast_config("thm36");
    bad.n = 2;
    bad.k = 1;
    bad.m = 3;
    CHECK_THROWS_AS((void)run_check(bad), std::invalid_argument);
}
