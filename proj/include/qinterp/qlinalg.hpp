// Right-linear operators on H^N: quaternionic vectors and matrices, plus the
// complex adjoint representation that provides inversion, operator norms and
// eigenvalue spheres.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qinterp/quaternion.hpp"

namespace qinterp {

using QVector = std::vector<Quaternion>;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

QVector vadd(const QVector& a, const QVector& b);
QVector vsub(const QVector& a, const QVector& b);
// Entrywise right scalar multiplication (v s)_j = v_j s.
QVector rscale(const QVector& v, const Quaternion& s);
QVector scaled(const QVector& v, double c);
double l2_norm_sq(const QVector& v);
double l2_norm(const QVector& v);
// Quaternion-valued inner product sum conj(u_j) v_j, right linear in v.
Quaternion inner(const QVector& u, const QVector& v);

struct QMatrix {
    int n = 0;
    std::vector<Quaternion> a;  // row-major n*n

    QMatrix() = default;
    explicit QMatrix(int dim) : n(dim), a(static_cast<size_t>(dim) * dim) {}

    Quaternion& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const Quaternion& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    static QMatrix identity(int dim);
    static QMatrix zero(int dim) { return QMatrix(dim); }
    static QMatrix diag(const std::vector<Quaternion>& entries);
};

// Left matrix-vector product, entry j = sum_k T_jk v_k; right linear in v.
QVector matvec(const QMatrix& T, const QVector& v);
QMatrix matmul(const QMatrix& A, const QMatrix& B);
QMatrix matpow(const QMatrix& T, int p);
QMatrix qm_add(const QMatrix& A, const QMatrix& B);
QMatrix qm_sub(const QMatrix& A, const QMatrix& B);
QMatrix qm_scale(const QMatrix& A, double c);
// Entrywise right scalar multiplication (T s)_ij = T_ij s.
QMatrix qm_rscale(const QMatrix& A, const Quaternion& s);
QMatrix conj_transpose(const QMatrix& A);

// 2N x 2N complex matrix [[A, B], [-conj(B), conj(A)]] from the split
// T = A + B e2 over the reference plane spanned by 1 and e1.
Eigen::MatrixXcd complex_adjoint(const QMatrix& T);
QMatrix from_complex_adjoint(const Eigen::MatrixXcd& M);
// Isometric vector embedding compatible with the adjoint: v = a + b e2 maps
// to [a; -conj(b)], so complex_adjoint(T) * embed(v) = embed(T v).
Eigen::VectorXcd complex_embed(const QVector& v);
QVector complex_unembed(const Eigen::VectorXcd& x);

// Inverse through the complex adjoint; throws SingularMatrixError.
QMatrix inverse(const QMatrix& T);
bool is_invertible(const QMatrix& T);

// Largest singular value of the complex adjoint; the induced l2 operator norm.
double op_norm(const QMatrix& T);
double op_norm_cd(const Eigen::MatrixXcd& M);

// Sorts sphere representatives by (Re, |Im|) and merges near duplicates.
std::vector<Quaternion> dedupe_sphere_reps(std::vector<Quaternion> reps);

// Canonical sphere representatives of the right eigenvalue spheres, sorted by
// (Re, |Im|) and deduplicated as a set.
std::vector<Quaternion> eigen_spheres(const QMatrix& T);

// Orthonormalize the columns of G (inner product sum conj(u_j) v_j, span
// coefficients multiplied from the right); throws on rank deficiency.
QMatrix gram_schmidt_unitary(const QMatrix& G);

double rayleigh(const QMatrix& T, const QVector& v);

// Power iteration on T^H T in pure quaternion arithmetic, with repeated
// squaring for gap amplification; independent of the complex adjoint path.
double oracle_spectral_norm(const QMatrix& T, std::uint64_t seed);

}  // namespace qinterp
