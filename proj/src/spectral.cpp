#include "qinterp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace qinterp {
namespace {

using Eigen::MatrixXcd;

MatrixXcd chi_of(const OperatorModel& T) {
    return complex_adjoint(T.diagonal ? T.to_dense() : T.dense);
}

// chi(Q_s(T)) assembled directly in the adjoint representation; Q_s has real
// scalar coefficients, so it commutes with the representation.
MatrixXcd q_chi(const MatrixXcd& A, const Quaternion& s) {
    const auto n = A.rows();
    return A * A - 2.0 * re(s) * A + norm_sq(s) * MatrixXcd::Identity(n, n);
}

MatrixXcd inv_checked(const MatrixXcd& M) {
    Eigen::FullPivLU<MatrixXcd> lu(M);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw SingularMatrixError("second-order resolvent is singular");
    return lu.inverse();
}

// Per-entry value of Q_s at a diagonal entry q; real coefficients, so the
// result commutes with q.
Quaternion q_scalar(const Quaternion& q, const Quaternion& s) {
    return q * q - (2.0 * re(s)) * q + Quaternion{norm_sq(s), 0.0, 0.0, 0.0};
}

void check_power_indices(int n, int m) {
    if (m < 1) throw std::invalid_argument("resolvent power m must be >= 1");
    if (n < 0 || n > 2 * m)
        throw std::invalid_argument("operator power n must satisfy 0 <= n <= 2m");
}

}  // namespace

OperatorModel OperatorModel::make_dense(QMatrix m) {
    OperatorModel out;
    out.diagonal = false;
    out.dense = std::move(m);
    return out;
}

OperatorModel OperatorModel::make_diagonal(std::vector<Quaternion> entries) {
    OperatorModel out;
    out.diagonal = true;
    out.diag_entries = std::move(entries);
    return out;
}

QMatrix OperatorModel::to_dense() const {
    return diagonal ? QMatrix::diag(diag_entries) : dense;
}

QVector apply(const OperatorModel& T, const QVector& x) {
    if (static_cast<int>(x.size()) != T.dim())
        throw DimensionError("apply: vector dimension mismatch");
    if (!T.diagonal) return matvec(T.dense, x);
    QVector y(x.size());
    for (size_t j = 0; j < x.size(); ++j) y[j] = T.diag_entries[j] * x[j];
    return y;
}

QVector apply_power(const OperatorModel& T, int n, const QVector& x) {
    if (n < 0) throw std::invalid_argument("apply_power: negative power");
    QVector y = x;
    for (int i = 0; i < n; ++i) y = qinterp::apply(T, y);
    return y;
}

double power_norm(const OperatorModel& T, int n) {
    if (n < 0) throw std::invalid_argument("power_norm: negative power");
    if (n == 0) return 1.0;
    if (T.diagonal) {
        double worst = 0.0;
        for (const auto& q : T.diag_entries) worst = std::max(worst, abs(q));
        return std::pow(worst, n);
    }
    const MatrixXcd A = complex_adjoint(T.dense);
    MatrixXcd P = A;
    for (int i = 1; i < n; ++i) P = A * P;
    return op_norm_cd(P);
}

double op_norm(const OperatorModel& T) { return power_norm(T, 1); }

OperatorModel q_op(const OperatorModel& T, const Quaternion& s) {
    if (T.diagonal) {
        std::vector<Quaternion> entries(T.diag_entries.size());
        for (size_t j = 0; j < entries.size(); ++j)
            entries[j] = q_scalar(T.diag_entries[j], s);
        return OperatorModel::make_diagonal(std::move(entries));
    }
    const QMatrix& A = T.dense;
    QMatrix Q = qm_add(qm_sub(matmul(A, A), qm_scale(A, 2.0 * re(s))),
                       qm_scale(QMatrix::identity(A.n), norm_sq(s)));
    return OperatorModel::make_dense(std::move(Q));
}

bool in_resolvent_set(const OperatorModel& T, const Quaternion& s) {
    if (T.diagonal) {
        for (const auto& q : T.diag_entries)
            if (same_sphere(q, s)) return false;
        return true;
    }
    Eigen::FullPivLU<MatrixXcd> lu(q_chi(complex_adjoint(T.dense), s));
    lu.setThreshold(1e-12);
    return lu.isInvertible();
}

std::vector<Quaternion> s_spectrum(const OperatorModel& T) {
    if (!T.diagonal) return eigen_spheres(T.dense);
    std::vector<Quaternion> reps(T.diag_entries.size());
    for (size_t j = 0; j < reps.size(); ++j) reps[j] = sphere_rep(T.diag_entries[j]);
    return dedupe_sphere_reps(std::move(reps));
}

QVector apply_power_qinv(const OperatorModel& T, const Quaternion& s, int n,
                         int m, const QVector& x) {
    check_power_indices(n, m);
    if (static_cast<int>(x.size()) != T.dim())
        throw DimensionError("apply_power_qinv: vector dimension mismatch");
    if (T.diagonal) {
        QVector y(x.size());
        for (size_t j = 0; j < x.size(); ++j) {
            const Quaternion qj = T.diag_entries[j];
            const Quaternion Qj = q_scalar(qj, s);
            if (norm_sq(Qj) == 0.0)
                throw SingularMatrixError("second-order resolvent is singular");
            y[j] = qpow(qj, n) * qpow(inverse(Qj), m) * x[j];
        }
        return y;
    }
    const MatrixXcd A = complex_adjoint(T.dense);
    Eigen::FullPivLU<MatrixXcd> lu(q_chi(A, s));
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw SingularMatrixError("second-order resolvent is singular");
    // Q commutes with T, so group into bounded factors (T^2 Q^-1)^alpha
    // (T Q^-1)^beta (Q^-1)^gamma with n = 2 alpha + beta. Applying all m solves
    // first and then n multiplications by A amplifies the roundoff of the
    // near-singular directions by ||T||^n.
    const int alpha = std::max(0, n - m);
    const int beta = n - 2 * alpha;
    Eigen::VectorXcd v = complex_embed(x);
    for (int i = 0; i < m; ++i) {
        v = lu.solve(v);
        if (i < alpha) v = A * (A * v).eval();
        else if (i < alpha + beta) v = A * v;
    }
    return complex_unembed(v);
}

double power_qinv_norm(const OperatorModel& T, const Quaternion& s, int n, int m) {
    check_power_indices(n, m);
    if (T.diagonal) {
        double worst = 0.0;
        for (const auto& qj : T.diag_entries) {
            const Quaternion Qj = q_scalar(qj, s);
            if (norm_sq(Qj) == 0.0)
                throw SingularMatrixError("second-order resolvent is singular");
            worst = std::max(worst, std::pow(abs(qj), n) / std::pow(abs(Qj), m));
        }
        return worst;
    }
    const MatrixXcd A = chi_of(T);
    const MatrixXcd Qinv = inv_checked(q_chi(A, s));
    // Same bounded-factor grouping as apply_power_qinv: forming Q^-m first and
    // multiplying by A^n amplifies roundoff by ||T||^n.
    const int alpha = std::max(0, n - m);
    const int beta = n - 2 * alpha;
    const MatrixXcd G1 = A * Qinv;
    const MatrixXcd G2 = A * G1;
    MatrixXcd P = MatrixXcd::Identity(A.rows(), A.cols());
    for (int i = 0; i < m; ++i) {
        if (i < alpha) P = G2 * P;
        else if (i < alpha + beta) P = G1 * P;
        else P = Qinv * P;
    }
    return op_norm_cd(P);
}

SectorialProfile sectorial_scan(const OperatorModel& T, double omega,
                                const LogGrid& grid) {
    SectorialProfile out;
    out.omega = omega;
    out.grid_t = grid.scan_points();
    out.q_scaled.reserve(out.grid_t.size());
    out.tq_scaled.reserve(out.grid_t.size());

    const bool dense = !T.diagonal;
    const MatrixXcd A = dense ? chi_of(T) : MatrixXcd();
    for (const double t : out.grid_t) {
        const Quaternion s = ray_point(t, omega, e1_unit());
        double nq = 0.0, ntq = 0.0;
        if (dense) {
            Eigen::FullPivLU<MatrixXcd> lu(q_chi(A, s));
            lu.setThreshold(1e-12);
            if (!lu.isInvertible()) throw SpectralPointError(t);
            const MatrixXcd Qinv = lu.inverse();
            nq = op_norm_cd(Qinv);
            ntq = op_norm_cd(A * Qinv);
        } else {
            for (const auto& qj : T.diag_entries) {
                const Quaternion Qj = q_scalar(qj, s);
                if (same_sphere(qj, s)) throw SpectralPointError(t);
                const double inv = 1.0 / abs(Qj);
                nq = std::max(nq, inv);
                ntq = std::max(ntq, abs(qj) * inv);
            }
        }
        out.q_scaled.push_back(t * t * nq);
        out.tq_scaled.push_back(t * ntq);
        out.measured_M = std::max(out.measured_M,
                                  std::max(out.q_scaled.back(), out.tq_scaled.back()));
    }
    return out;
}

namespace {

// One grid pass evaluating ||T^n Q^{-m}|| for all n in [0, 2m]; returns the
// worst (value, bound) pair per n.
std::vector<std::pair<double, double>> sweep_worst(const OperatorModel& T,
                                                   double omega,
                                                   const LogGrid& grid, int m,
                                                   double M) {
    const double cm = std::pow(1.0 + 3.0 * M, m);
    std::vector<std::pair<double, double>> worst(2 * m + 1, {0.0, 0.0});
    std::vector<double> margins(2 * m + 1, std::numeric_limits<double>::infinity());

    const bool dense = !T.diagonal;
    const MatrixXcd A = dense ? chi_of(T) : MatrixXcd();
    for (const double t : grid.scan_points()) {
        const Quaternion s = ray_point(t, omega, e1_unit());
        std::vector<double> values(2 * m + 1, 0.0);
        if (dense) {
            Eigen::FullPivLU<MatrixXcd> lu(q_chi(A, s));
            lu.setThreshold(1e-12);
            if (!lu.isInvertible()) throw SpectralPointError(t);
            const MatrixXcd Qinv = lu.inverse();
            // Bounded-factor grouping per n, as in power_qinv_norm; building
            // Q^-m once and multiplying A in amplifies roundoff by ||T||^n.
            const MatrixXcd G1 = A * Qinv;
            const MatrixXcd G2 = A * G1;
            for (int n = 0; n <= 2 * m; ++n) {
                const int alpha = std::max(0, n - m);
                const int beta = n - 2 * alpha;
                MatrixXcd P = MatrixXcd::Identity(A.rows(), A.cols());
                for (int i = 0; i < m; ++i) {
                    if (i < alpha) P = G2 * P;
                    else if (i < alpha + beta) P = G1 * P;
                    else P = Qinv * P;
                }
                values[n] = op_norm_cd(P);
            }
        } else {
            for (const auto& qj : T.diag_entries) {
                const Quaternion Qj = q_scalar(qj, s);
                if (norm_sq(Qj) == 0.0) throw SpectralPointError(t);
                const double aq = abs(qj), iQ = 1.0 / std::pow(abs(Qj), m);
                double p = iQ;
                for (int n = 0; n <= 2 * m; ++n, p *= aq)
                    values[n] = std::max(values[n], p);
            }
        }
        for (int n = 0; n <= 2 * m; ++n) {
            const double bound = cm / std::pow(t, 2 * m - n);
            const double margin = (bound - values[n]) / bound;
            if (margin < margins[n]) {
                margins[n] = margin;
                worst[n] = {values[n], bound};
            }
        }
    }
    return worst;
}

}  // namespace

std::vector<VerificationReport> power_resolvent_bound_sweep(
    const OperatorModel& T, double omega, const LogGrid& grid, int m, double M,
    double tol) {
    check_power_indices(0, m);
    const auto worst = sweep_worst(T, omega, grid, m, M);
    std::vector<VerificationReport> out;
    out.reserve(worst.size());
    for (int n = 0; n <= 2 * m; ++n) {
        VerificationReport r;
        r.check = "lemma-power-bound";
        r.params = {{"n", n}, {"m", m}, {"omega", omega}, {"M", M}};
        r.measured = worst[n].first;
        r.bound = worst[n].second;
        r.finalize(tol);
        out.push_back(std::move(r));
    }
    return out;
}

VerificationReport power_resolvent_bound_check(const OperatorModel& T,
                                               double omega, const LogGrid& grid,
                                               int n, int m, double M,
                                               double tol) {
    check_power_indices(n, m);
    auto reports = power_resolvent_bound_sweep(T, omega, grid, m, M, tol);
    return reports[static_cast<size_t>(n)];
}

double graph_norm(const OperatorModel& T, int n, const QVector& x) {
    if (n < 0) throw std::invalid_argument("graph_norm: negative power");
    return l2_norm(x) + l2_norm(apply_power(T, n, x));
}

double embedding_constant(double M, int n, int m, double s_abs) {
    if (n < 0 || m < n) throw std::invalid_argument("embedding_constant: need 0 <= n <= m");
    if (!(s_abs > 0.0)) throw std::invalid_argument("embedding_constant: |s| must be positive");
    const double c = std::pow(4.0 + 12.0 * M, m);
    return std::max(1.0 + c * std::pow(s_abs, n), c / std::pow(s_abs, m - n));
}

VerificationReport embedding_constant_check(const OperatorModel& T, double M,
                                            int n, int m, const Quaternion& s,
                                            const std::vector<QVector>& samples,
                                            double tol) {
    VerificationReport r;
    r.check = "embedding";
    r.bound = embedding_constant(M, n, m, abs(s));
    r.measured = 0.0;
    for (const auto& x : samples) {
        const double denom = graph_norm(T, m, x);
        if (denom == 0.0) continue;
        r.measured = std::max(r.measured, graph_norm(T, n, x) / denom);
    }
    r.finalize(tol);
    return r;
}

VerificationReport resolvent_series_check(const OperatorModel& T,
                                          const Quaternion& s, int n_terms,
                                          double tol) {
    if (n_terms < 0) throw std::invalid_argument("resolvent_series_check: negative order");
    const double tnorm = op_norm(T);
    const double sa = abs(s);
    if (!(sa > tnorm))
        throw std::invalid_argument("resolvent_series_check: series needs |s| > ||T||");

    const QMatrix A = T.to_dense();
    const int N = A.n;
    const Quaternion sinv = inverse(s);

    QMatrix partial = QMatrix::zero(N);
    QMatrix pw = QMatrix::identity(N);
    Quaternion coeff = sinv;
    for (int j = 0;; ++j) {
        partial = qm_add(partial, qm_rscale(pw, coeff));
        if (j == n_terms) break;
        pw = matmul(A, pw);
        coeff = coeff * sinv;
    }

    const QMatrix qinv = inverse(q_op(OperatorModel::make_dense(A), s).to_dense());
    const QMatrix rhs = matmul(qinv, qm_sub(qm_rscale(QMatrix::identity(N), conj(s)), A));

    VerificationReport r;
    r.check = "series";
    r.measured = op_norm(qm_sub(partial, rhs));
    r.bound = std::pow(tnorm, n_terms + 1) / std::pow(sa, n_terms + 2) /
              (1.0 - tnorm / sa);
    r.finalize(tol);
    return r;
}

}  // namespace qinterp
