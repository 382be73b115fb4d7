#include "qinterp/qlinalg.hpp"

#include <algorithm>
#include <cmath>

#include "qinterp/rng.hpp"

namespace qinterp {

namespace {
void require_same_dim(size_t a, size_t b, const char* what) {
    if (a != b) throw DimensionError(std::string(what) + ": dimension mismatch");
}
}  // namespace

QVector vadd(const QVector& a, const QVector& b) {
    require_same_dim(a.size(), b.size(), "vadd");
    QVector r(a.size());
    for (size_t j = 0; j < a.size(); ++j) r[j] = a[j] + b[j];
    return r;
}

QVector vsub(const QVector& a, const QVector& b) {
    require_same_dim(a.size(), b.size(), "vsub");
    QVector r(a.size());
    for (size_t j = 0; j < a.size(); ++j) r[j] = a[j] - b[j];
    return r;
}

QVector rscale(const QVector& v, const Quaternion& s) {
    QVector r(v.size());
    for (size_t j = 0; j < v.size(); ++j) r[j] = v[j] * s;
    return r;
}

QVector scaled(const QVector& v, double c) {
    QVector r(v.size());
    for (size_t j = 0; j < v.size(); ++j) r[j] = c * v[j];
    return r;
}

double l2_norm_sq(const QVector& v) {
    double s = 0.0;
    for (const auto& q : v) s += norm_sq(q);
    return s;
}

double l2_norm(const QVector& v) { return std::sqrt(l2_norm_sq(v)); }

Quaternion inner(const QVector& u, const QVector& v) {
    require_same_dim(u.size(), v.size(), "inner");
    Quaternion s{};
    for (size_t j = 0; j < u.size(); ++j) s += conj(u[j]) * v[j];
    return s;
}

QMatrix QMatrix::identity(int dim) {
    QMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = Quaternion{1.0, 0.0, 0.0, 0.0};
    return m;
}

QMatrix QMatrix::diag(const std::vector<Quaternion>& entries) {
    QMatrix m(static_cast<int>(entries.size()));
    for (int i = 0; i < m.n; ++i) m.at(i, i) = entries[static_cast<size_t>(i)];
    return m;
}

QVector matvec(const QMatrix& T, const QVector& v) {
    require_same_dim(static_cast<size_t>(T.n), v.size(), "matvec");
    QVector r(v.size());
    for (int i = 0; i < T.n; ++i) {
        Quaternion s{};
        for (int j = 0; j < T.n; ++j) s += T.at(i, j) * v[static_cast<size_t>(j)];
        r[static_cast<size_t>(i)] = s;
    }
    return r;
}

QMatrix matmul(const QMatrix& A, const QMatrix& B) {
    require_same_dim(static_cast<size_t>(A.n), static_cast<size_t>(B.n), "matmul");
    QMatrix C(A.n);
    for (int i = 0; i < A.n; ++i)
        for (int k = 0; k < A.n; ++k) {
            const Quaternion aik = A.at(i, k);
            if (norm_sq(aik) == 0.0) continue;
            for (int j = 0; j < A.n; ++j) C.at(i, j) += aik * B.at(k, j);
        }
    return C;
}

QMatrix matpow(const QMatrix& T, int p) {
    QMatrix r = QMatrix::identity(T.n);
    for (int i = 0; i < p; ++i) r = matmul(r, T);
    return r;
}

QMatrix qm_add(const QMatrix& A, const QMatrix& B) {
    require_same_dim(static_cast<size_t>(A.n), static_cast<size_t>(B.n), "qm_add");
    QMatrix C(A.n);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.a[i] + B.a[i];
    return C;
}

QMatrix qm_sub(const QMatrix& A, const QMatrix& B) {
    require_same_dim(static_cast<size_t>(A.n), static_cast<size_t>(B.n), "qm_sub");
    QMatrix C(A.n);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.a[i] - B.a[i];
    return C;
}

QMatrix qm_scale(const QMatrix& A, double c) {
    QMatrix C(A.n);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = c * A.a[i];
    return C;
}

QMatrix qm_rscale(const QMatrix& A, const Quaternion& s) {
    QMatrix C(A.n);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.a[i] * s;
    return C;
}

QMatrix conj_transpose(const QMatrix& A) {
    QMatrix C(A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) C.at(j, i) = conj(A.at(i, j));
    return C;
}

Eigen::MatrixXcd complex_adjoint(const QMatrix& T) {
    const int n = T.n;
    Eigen::MatrixXcd M(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Quaternion& q = T.at(i, j);
            const std::complex<double> a(q.w, q.x);
            const std::complex<double> b(q.y, q.z);
            M(i, j) = a;
            M(i, j + n) = b;
            M(i + n, j) = -std::conj(b);
            M(i + n, j + n) = std::conj(a);
        }
    return M;
}

QMatrix from_complex_adjoint(const Eigen::MatrixXcd& M) {
    const int n = static_cast<int>(M.rows()) / 2;
    QMatrix T(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::complex<double> a = M(i, j);
            const std::complex<double> b = M(i, j + n);
            T.at(i, j) = Quaternion{a.real(), a.imag(), b.real(), b.imag()};
        }
    return T;
}

Eigen::VectorXcd complex_embed(const QVector& v) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd x(2 * n);
    for (int j = 0; j < n; ++j) {
        const Quaternion& q = v[static_cast<size_t>(j)];
        x(j) = std::complex<double>(q.w, q.x);
        x(j + n) = -std::conj(std::complex<double>(q.y, q.z));
    }
    return x;
}

QVector complex_unembed(const Eigen::VectorXcd& x) {
    const int n = static_cast<int>(x.size()) / 2;
    QVector v(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const std::complex<double> a = x(j);
        const std::complex<double> b = -std::conj(x(j + n));
        v[static_cast<size_t>(j)] = Quaternion{a.real(), a.imag(), b.real(), b.imag()};
    }
    return v;
}

namespace {
Eigen::FullPivLU<Eigen::MatrixXcd> adjoint_lu(const QMatrix& T) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(complex_adjoint(T));
    lu.setThreshold(1e-12);
    return lu;
}
}  // namespace

bool is_invertible(const QMatrix& T) { return adjoint_lu(T).isInvertible(); }

QMatrix inverse(const QMatrix& T) {
    auto lu = adjoint_lu(T);
    if (!lu.isInvertible())
        throw SingularMatrixError("inverse: singular quaternionic matrix");
    return from_complex_adjoint(lu.inverse());
}

double op_norm_cd(const Eigen::MatrixXcd& M) {
    if (M.rows() == 0) return 0.0;
    const Eigen::MatrixXcd G = M.adjoint() * M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    return lmax > 0.0 ? std::sqrt(lmax) : 0.0;
}

double op_norm(const QMatrix& T) { return op_norm_cd(complex_adjoint(T)); }

std::vector<Quaternion> dedupe_sphere_reps(std::vector<Quaternion> reps) {
    std::sort(reps.begin(), reps.end(), [](const Quaternion& a, const Quaternion& b) {
        return a.w != b.w ? a.w < b.w : a.x < b.x;
    });
    std::vector<Quaternion> out;
    for (const auto& r : reps) {
        // Noise in the real part can interleave members of distinct spheres
        // under the sort, so compare against every kept representative.
        const double tol = 1e-9 * (1.0 + std::fabs(r.w) + r.x);
        bool dup = false;
        for (const auto& kept : out)
            dup = dup || (std::fabs(kept.w - r.w) <= tol &&
                          std::fabs(kept.x - r.x) <= tol);
        if (!dup) out.push_back(r);
    }
    return out;
}

std::vector<Quaternion> eigen_spheres(const QMatrix& T) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(complex_adjoint(T), false);
    std::vector<Quaternion> reps;
    reps.reserve(static_cast<size_t>(2 * T.n));
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const std::complex<double> l = es.eigenvalues()(i);
        reps.push_back(Quaternion{l.real(), std::fabs(l.imag()), 0.0, 0.0});
    }
    return dedupe_sphere_reps(std::move(reps));
}

QMatrix gram_schmidt_unitary(const QMatrix& G) {
    const int n = G.n;
    std::vector<QVector> cols(static_cast<size_t>(n), QVector(static_cast<size_t>(n)));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) cols[static_cast<size_t>(j)][static_cast<size_t>(i)] = G.at(i, j);
    for (int k = 0; k < n; ++k) {
        QVector v = cols[static_cast<size_t>(k)];
        for (int j = 0; j < k; ++j) {
            const Quaternion c = inner(cols[static_cast<size_t>(j)], v);
            v = vsub(v, rscale(cols[static_cast<size_t>(j)], c));
        }
        const double nv = l2_norm(v);
        if (nv < 1e-10)
            throw SingularMatrixError("gram_schmidt_unitary: rank deficient input");
        cols[static_cast<size_t>(k)] = scaled(v, 1.0 / nv);
    }
    QMatrix U(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) U.at(i, j) = cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
    return U;
}

double rayleigh(const QMatrix& T, const QVector& v) {
    const double nv = l2_norm(v);
    if (nv == 0.0) return 0.0;
    return l2_norm(matvec(T, v)) / nv;
}

double oracle_spectral_norm(const QMatrix& T, std::uint64_t seed) {
    const int n = T.n;
    if (n == 0) return 0.0;
    QMatrix B = matmul(conj_transpose(T), T);
    // Repeated squaring with Frobenius rescaling; log_scale tracks the factor.
    double log_scale = 0.0;
    const int squarings = 6;  // working matrix represents (T^H T)^64
    for (int s = 0; s < squarings; ++s) {
        B = matmul(B, B);
        double fr = 0.0;
        for (const auto& q : B.a) fr += norm_sq(q);
        fr = std::sqrt(fr);
        if (fr == 0.0) return 0.0;
        B = qm_scale(B, 1.0 / fr);
        log_scale = 2.0 * log_scale + std::log(fr);
    }
    Rng rng(seed);
    QVector v = rng.gaussian_vector(n);
    double nv = l2_norm(v);
    if (nv == 0.0) return 0.0;
    v = scaled(v, 1.0 / nv);
    double log_lambda_prev = 0.0;
    int stable = 0;
    for (int it = 0; it < 3000; ++it) {
        const QVector w = matvec(B, v);
        const double lam = re(inner(v, w));  // real for hermitian positive B
        const double nw = l2_norm(w);
        if (nw == 0.0 || lam <= 0.0) return 0.0;
        v = scaled(w, 1.0 / nw);
        const double log_lambda = std::log(lam);
        if (it > 0 && std::fabs(log_lambda - log_lambda_prev) < 1e-12) {
            if (++stable >= 2) {
                log_lambda_prev = log_lambda;
                break;
            }
        } else {
            stable = 0;
        }
        log_lambda_prev = log_lambda;
    }
    // lambda e^{log_scale} approximates sigma_max^(2 * 64).
    return std::exp((log_lambda_prev + log_scale) / 128.0);
}

}  // namespace qinterp
