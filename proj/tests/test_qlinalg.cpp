#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "qinterp/qlinalg.hpp"

using namespace qinterp;

namespace {

const Quaternion e1{0, 1, 0, 0};
const Quaternion e2{0, 0, 1, 0};
const Quaternion e3{0, 0, 0, 1};

QMatrix fixed_matrix3() {
    QMatrix m(3);
    m.at(0, 0) = {1, 0.5, 0, 0};
    m.at(0, 1) = {0, -1, 2, 0};
    m.at(0, 2) = {0.25, 0, 0, 1};
    m.at(1, 0) = {-2, 0, 0.5, 0};
    m.at(1, 1) = {0, 0, 0, -1};
    m.at(1, 2) = {1, 1, 1, 1};
    m.at(2, 0) = {0, 0.125, 0, 0};
    m.at(2, 1) = {3, 0, -0.5, 0};
    m.at(2, 2) = {-1, 0, 0, 0.75};
    return m;
}

QVector fixed_vector3() {
    return {Quaternion{1, -1, 0, 2}, Quaternion{0, 0.5, 0.5, 0}, Quaternion{-2, 0, 1, 0}};
}

}  // namespace

TEST_CASE("vector arithmetic and right scaling") {
    const QVector v = fixed_vector3();
    CHECK(l2_norm_sq(v) == doctest::Approx(6.0 + 0.5 + 5.0));
    const Quaternion s{0.5, 1, -2, 0.25};
    CHECK(l2_norm(rscale(v, s)) == doctest::Approx(l2_norm(v) * abs(s)).epsilon(1e-13));
    CHECK(approx_equal(inner(v, v), Quaternion(l2_norm_sq(v)), 1e-13));
    CHECK_THROWS_AS(vadd(v, QVector(2)), DimensionError);
}

TEST_CASE("matvec is right linear") {
    const QMatrix T = fixed_matrix3();
    const QVector v = fixed_vector3();
    const Quaternion s{1, -0.5, 2, 0.125};
    const QVector lhs = matvec(T, rscale(v, s));
    const QVector rhs = rscale(matvec(T, v), s);
    for (size_t j = 0; j < lhs.size(); ++j) CHECK(approx_equal(lhs[j], rhs[j], 1e-12));
    CHECK_THROWS_AS(matvec(T, QVector(2)), DimensionError);
}

TEST_CASE("complex adjoint of scalar units") {
    const Eigen::MatrixXcd a1 = complex_adjoint(QMatrix::diag({e1}));
    CHECK(std::abs(a1(0, 0) - std::complex<double>(0, 1)) < 1e-15);
    CHECK(std::abs(a1(1, 1) - std::complex<double>(0, -1)) < 1e-15);
    CHECK(std::abs(a1(0, 1)) < 1e-15);
    CHECK(std::abs(a1(1, 0)) < 1e-15);

    const Eigen::MatrixXcd a2 = complex_adjoint(QMatrix::diag({e2}));
    CHECK(std::abs(a2(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(a2(1, 0) + 1.0) < 1e-15);
    CHECK(std::abs(a2(0, 0)) < 1e-15);
    CHECK(std::abs(a2(1, 1)) < 1e-15);
}

TEST_CASE("complex adjoint is an algebra homomorphism") {
    const QMatrix A = fixed_matrix3();
    QMatrix B = fixed_matrix3();
    B.at(0, 1) = {0.5, 0, -1, 2};
    B.at(2, 2) = e3;
    const Eigen::MatrixXcd lhs = complex_adjoint(matmul(A, B));
    const Eigen::MatrixXcd rhs = complex_adjoint(A) * complex_adjoint(B);
    CHECK((lhs - rhs).norm() < 1e-12);

    const QMatrix back = from_complex_adjoint(complex_adjoint(A));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(approx_equal(back.at(i, j), A.at(i, j), 1e-14));
}

TEST_CASE("vector embedding intertwines and is isometric") {
    const QMatrix T = fixed_matrix3();
    const QVector v = fixed_vector3();
    const Eigen::VectorXcd lhs = complex_adjoint(T) * complex_embed(v);
    const Eigen::VectorXcd rhs = complex_embed(matvec(T, v));
    CHECK((lhs - rhs).norm() < 1e-12);
    CHECK(complex_embed(v).norm() == doctest::Approx(l2_norm(v)).epsilon(1e-14));
    const QVector round = complex_unembed(complex_embed(v));
    for (size_t j = 0; j < v.size(); ++j) CHECK(approx_equal(round[j], v[j], 1e-15));
}

TEST_CASE("inverse through the adjoint") {
    const QMatrix T = fixed_matrix3();
    REQUIRE(is_invertible(T));
    const QMatrix P = matmul(T, inverse(T));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(approx_equal(P.at(i, j), Quaternion(i == j ? 1.0 : 0.0), 1e-12));

    QMatrix singular(2);
    singular.at(0, 0) = e1;
    singular.at(0, 1) = e1;
    singular.at(1, 0) = e1;
    singular.at(1, 1) = e1;
    CHECK_FALSE(is_invertible(singular));
    CHECK_THROWS_AS((void)inverse(singular), SingularMatrixError);
}

TEST_CASE("operator norm on diagonal and unitary matrices") {
    CHECK(op_norm(QMatrix::diag({3.0 * e1, Quaternion(4.0)})) == doctest::Approx(4.0));
    CHECK(op_norm(QMatrix::identity(5)) == doctest::Approx(1.0));

    const QMatrix T = fixed_matrix3();
    const QVector v = fixed_vector3();
    CHECK(l2_norm(matvec(T, v)) <= op_norm(T) * l2_norm(v) + 1e-12);
    CHECK(op_norm(matmul(T, T)) <= op_norm(T) * op_norm(T) + 1e-12);
    CHECK(op_norm(qm_add(T, T)) <= 2.0 * op_norm(T) + 1e-12);
}

TEST_CASE("eigen spheres of diagonal matrices") {
    const auto reps = eigen_spheres(QMatrix::diag({e1, 2.0 * e2}));
    REQUIRE(reps.size() == 2);
    CHECK(approx_equal(reps[0], Quaternion{0, 1, 0, 0}, 1e-10));
    CHECK(approx_equal(reps[1], Quaternion{0, 2, 0, 0}, 1e-10));

    const auto one = eigen_spheres(QMatrix::diag({Quaternion{1, 0, 0, 2}}));
    REQUIRE(one.size() == 1);
    CHECK(approx_equal(one[0], Quaternion{1, 2, 0, 0}, 1e-10));
}

TEST_CASE("gram schmidt produces a unitary") {
    const QMatrix U = gram_schmidt_unitary(fixed_matrix3());
    const QMatrix P = matmul(conj_transpose(U), U);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(approx_equal(P.at(i, j), Quaternion(i == j ? 1.0 : 0.0), 1e-12));
    CHECK(op_norm(U) == doctest::Approx(1.0).epsilon(1e-12));

    QMatrix deficient(2);
    deficient.at(0, 0) = Quaternion(1.0);
    deficient.at(1, 0) = Quaternion(1.0);
    CHECK_THROWS_AS((void)gram_schmidt_unitary(deficient), SingularMatrixError);
}

TEST_CASE("rayleigh quotients never exceed the operator norm") {
    const QMatrix T = fixed_matrix3();
    const double nrm = op_norm(T);
    CHECK(rayleigh(T, fixed_vector3()) <= nrm + 1e-12);
    QVector basis(3);
    basis[1] = Quaternion(1.0);
    CHECK(rayleigh(T, basis) <= nrm + 1e-12);
}

TEST_CASE("power iteration oracle matches the adjoint norm") {
    const QMatrix T = fixed_matrix3();
    const double nrm = op_norm(T);
    CHECK(oracle_spectral_norm(T, 11) == doctest::Approx(nrm).epsilon(1e-8));

    const QMatrix D = QMatrix::diag({Quaternion(0.5), 2.0 * e3, Quaternion{1, 1, 1, 1}});
    CHECK(oracle_spectral_norm(D, 3) == doctest::Approx(op_norm(D)).epsilon(1e-8));
}
