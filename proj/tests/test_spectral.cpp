#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qinterp/spectral.hpp"

using namespace qinterp;

namespace {

const Quaternion e1{0, 1, 0, 0};
const Quaternion e2{0, 0, 1, 0};

OperatorModel fixed_diag() {
    return OperatorModel::make_diagonal(
        {0.1 * e1, Quaternion{0, 0, 2, 0}, Quaternion{0, 3, 0, 4}});
}

QVector basis(int dim, int j) {
    QVector v(static_cast<size_t>(dim));
    v[static_cast<size_t>(j)] = Quaternion(1.0);
    return v;
}

}  // namespace

TEST_CASE("model application and powers agree with the dense form") {
    const OperatorModel D = fixed_diag();
    const OperatorModel A = OperatorModel::make_dense(D.to_dense());
    const QVector x = {Quaternion{1, 0, -1, 0}, Quaternion{0, 2, 0, 0}, Quaternion{0.5, 0, 0, 1}};
    for (int n = 0; n <= 3; ++n) {
        const QVector dx = apply_power(D, n, x);
        const QVector ax = apply_power(A, n, x);
        for (size_t j = 0; j < x.size(); ++j) CHECK(approx_equal(dx[j], ax[j], 1e-12));
        CHECK(power_norm(D, n) == doctest::Approx(power_norm(A, n)).epsilon(1e-9));
    }
    CHECK(power_norm(D, 1) == doctest::Approx(5.0));
    CHECK(op_norm(D) == doctest::Approx(5.0));
}

TEST_CASE("q operator closed form on a unit entry") {
    const OperatorModel T = OperatorModel::make_diagonal({e1});
    const OperatorModel q = q_op(T, Quaternion(-1.0));
    REQUIRE(q.diagonal);
    CHECK(approx_equal(q.diag_entries[0], 2.0 * e1, 1e-15));
}

TEST_CASE("q operator depends only on the sphere of s") {
    const OperatorModel T = fixed_diag();
    const Quaternion s{1.5, 0.3, -2, 0.7};
    const OperatorModel qa = q_op(T, s);
    const OperatorModel qb = q_op(T, sphere_rep(s));
    for (size_t j = 0; j < qa.diag_entries.size(); ++j)
        CHECK(approx_equal(qa.diag_entries[j], qb.diag_entries[j], 1e-12));
}

TEST_CASE("resolvent set membership on a diagonal model") {
    const OperatorModel T = OperatorModel::make_diagonal({e1});
    CHECK_FALSE(in_resolvent_set(T, e2));
    CHECK(in_resolvent_set(T, 2.0 * e1));
    CHECK(in_resolvent_set(T, Quaternion(-1.0)));

    const OperatorModel A = OperatorModel::make_dense(T.to_dense());
    CHECK_FALSE(in_resolvent_set(A, e2));
    CHECK(in_resolvent_set(A, 2.0 * e1));
}

TEST_CASE("spectrum deduplicates spheres and sorts representatives") {
    const OperatorModel T =
        OperatorModel::make_diagonal({e1, 2.0 * e2, Quaternion{0, 0, 0, 1}});
    const auto reps = s_spectrum(T);
    REQUIRE(reps.size() == 2);
    CHECK(approx_equal(reps[0], Quaternion{0, 1, 0, 0}, 1e-12));
    CHECK(approx_equal(reps[1], Quaternion{0, 2, 0, 0}, 1e-12));
}

TEST_CASE("dense spectrum matches the diagonal construction") {
    const OperatorModel D = fixed_diag();
    const OperatorModel A = OperatorModel::make_dense(D.to_dense());
    const auto rd = s_spectrum(D);
    const auto ra = s_spectrum(A);
    REQUIRE(rd.size() == ra.size());
    for (size_t j = 0; j < rd.size(); ++j) CHECK(approx_equal(rd[j], ra[j], 1e-8));
}

TEST_CASE("pseudo resolvent application against the scalar closed form") {
    const OperatorModel T = OperatorModel::make_diagonal({Quaternion(2.0)});
    const Quaternion s = ray_point(1.0, kPi, e1_unit());  // s = -1
    // Q = 4 + 4 + 1 = 9 for the entry q = 2.
    const QVector y = apply_power_qinv(T, s, 1, 1, basis(1, 0));
    CHECK(approx_equal(y[0], Quaternion(2.0 / 9.0), 1e-14));
    CHECK(power_qinv_norm(T, s, 1, 1) == doctest::Approx(2.0 / 9.0));
    CHECK_THROWS_AS((void)apply_power_qinv(OperatorModel::make_diagonal({e1}), e2, 0, 1,
                                           basis(1, 0)),
                    SingularMatrixError);
}

TEST_CASE("diagonal and dense pseudo resolvents agree") {
    const OperatorModel D = fixed_diag();
    const OperatorModel A = OperatorModel::make_dense(D.to_dense());
    const Quaternion s = ray_point(0.7, kPi, e1_unit());
    const QVector x = {Quaternion{1, 1, 0, 0}, Quaternion{0, 0, 1, -1}, Quaternion(0.5)};
    for (int m = 1; m <= 2; ++m)
        for (int n = 0; n <= 2 * m; ++n) {
            const QVector yd = apply_power_qinv(D, s, n, m, x);
            const QVector ya = apply_power_qinv(A, s, n, m, x);
            for (size_t j = 0; j < x.size(); ++j) CHECK(approx_equal(yd[j], ya[j], 1e-9));
            CHECK(power_qinv_norm(D, s, n, m) ==
                  doctest::Approx(power_qinv_norm(A, s, n, m)).epsilon(1e-8));
        }
}

TEST_CASE("sectorial scan of an imaginary unit against the closed form") {
    const OperatorModel T = OperatorModel::make_diagonal({e1});
    const auto profile = sectorial_scan(T, kPi, LogGrid());
    // t^2 ||Q^-1|| = t^2/(1+t^2) and t ||T Q^-1|| = t/(1+t^2).
    for (size_t i = 0; i < profile.grid_t.size(); ++i) {
        const double t = profile.grid_t[i];
        CHECK(profile.q_scaled[i] == doctest::Approx(t * t / (1 + t * t)).epsilon(1e-10));
        CHECK(profile.tq_scaled[i] == doctest::Approx(t / (1 + t * t)).epsilon(1e-10));
    }
    CHECK(profile.measured_M == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(safe_M(profile) > profile.measured_M);
}

TEST_CASE("sectorial scan reports the spectral grid point") {
    const OperatorModel T = OperatorModel::make_diagonal({e1});
    // The ray at pi/2 meets the sphere of e1 at t = 1, which this grid hits.
    try {
        sectorial_scan(T, kPi / 2.0, LogGrid(0.1, 10.0, 201));
        FAIL("expected SpectralPointError");
    } catch (const SpectralPointError& e) {
        CHECK(e.t == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("negative real entry is sectorial on the positive axis") {
    const OperatorModel T = OperatorModel::make_diagonal({Quaternion(-1.0)});
    const auto profile = sectorial_scan(T, 0.0, LogGrid(0.1, 10.0, 201));
    // t^2/(1+t)^2 < 1 and t/(1+t)^2 <= 1/4.
    CHECK(profile.measured_M < 1.0);
    CHECK(profile.measured_M > 0.5);
}

TEST_CASE("dense sectorial scan matches the diagonal one") {
    const OperatorModel D = fixed_diag();
    const OperatorModel A = OperatorModel::make_dense(D.to_dense());
    const LogGrid grid(1e-2, 1e2, 40);
    const auto pd = sectorial_scan(D, kPi, grid);
    const auto pa = sectorial_scan(A, kPi, grid);
    CHECK(pd.measured_M == doctest::Approx(pa.measured_M).epsilon(1e-8));
}

TEST_CASE("power resolvent bound holds with the measured constant") {
    const OperatorModel T = fixed_diag();
    const LogGrid grid;
    const double M = safe_M(sectorial_scan(T, kPi, grid));
    for (int m = 1; m <= 4; ++m) {
        const auto reports = power_resolvent_bound_sweep(T, kPi, grid, m, M);
        REQUIRE(static_cast<int>(reports.size()) == 2 * m + 1);
        for (const auto& r : reports) {
            CHECK(r.check == "lemma-power-bound");
            CHECK(r.pass);
            CHECK(r.margin >= -1e-9);
        }
        const auto single = power_resolvent_bound_check(T, kPi, grid, m, m, M);
        CHECK(single.pass);
    }
    CHECK_THROWS_AS((void)power_resolvent_bound_check(T, kPi, grid, 3, 1, M),
                    std::invalid_argument);
}

TEST_CASE("graph norms and the power embedding") {
    const OperatorModel T = OperatorModel::make_diagonal({Quaternion(2.0)});
    const QVector x = basis(1, 0);
    CHECK(graph_norm(T, 0, x) == doctest::Approx(2.0));
    CHECK(graph_norm(T, 1, x) == doctest::Approx(3.0));
    CHECK(graph_norm(T, 2, x) == doctest::Approx(5.0));

    CHECK(embedding_constant(0.0, 1, 2, 1.0) == doctest::Approx(17.0));
    CHECK(embedding_constant(0.0, 0, 1, 2.0) == doctest::Approx(5.0));
    CHECK_THROWS_AS((void)embedding_constant(1.0, 2, 1, 1.0), std::invalid_argument);

    const OperatorModel D = fixed_diag();
    const double M = safe_M(sectorial_scan(D, kPi, LogGrid()));
    const std::vector<QVector> samples = {basis(3, 0), basis(3, 2),
                                          QVector{Quaternion(1), Quaternion(1), Quaternion(1)}};
    const auto r = embedding_constant_check(D, M, 1, 2, ray_point(1.0, kPi, e1_unit()),
                                            samples);
    CHECK(r.check == "embedding");
    CHECK(r.pass);
}

TEST_CASE("resolvent series identity within the geometric tail") {
    QMatrix m(2);
    m.at(0, 0) = Quaternion{0.5, 0.25, 0, 0};
    m.at(0, 1) = Quaternion{0, 0, 1, 0};
    m.at(1, 0) = Quaternion{0.25, 0, 0, -0.5};
    m.at(1, 1) = Quaternion{0, 0.5, 0, 0.5};
    const OperatorModel T = OperatorModel::make_dense(m);
    const double nt = op_norm(T);
    const Quaternion s = (2.0 * nt) * Quaternion{0.5, 0.5, 0.5, 0.5};

    const auto r = resolvent_series_check(T, s, 30);
    CHECK(r.check == "series");
    CHECK(r.pass);
    CHECK(r.measured <= r.bound);

    CHECK_THROWS_AS((void)resolvent_series_check(T, (0.5 * nt) * Quaternion(1.0), 10),
                    std::invalid_argument);
}
