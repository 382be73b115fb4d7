// Second-order resolvent machinery: the operator Q_s(T) = T^2 - 2 Re(s) T
// + |s|^2, the spherical spectrum, ray sectoriality scans, power-resolvent
// bounds, graph norms, embedding constants and the resolvent series identity.
#pragma once

#include <stdexcept>
#include <vector>

#include "qinterp/grid.hpp"
#include "qinterp/qlinalg.hpp"
#include "qinterp/report.hpp"

namespace qinterp {

// A grid point of a scan fell on the spherical spectrum.
struct SpectralPointError : std::runtime_error {
    double t;
    explicit SpectralPointError(double t_)
        : std::runtime_error("grid point on the spherical spectrum at t = " +
                             std::to_string(t_)),
          t(t_) {}
};

// Right-linear operator on H^N, dense or diagonal. Diagonal models evaluate
// every derived norm entrywise in closed form, with no linear solve.
struct OperatorModel {
    bool diagonal = false;
    QMatrix dense;
    std::vector<Quaternion> diag_entries;

    static OperatorModel make_dense(QMatrix m);
    static OperatorModel make_diagonal(std::vector<Quaternion> entries);

    int dim() const {
        return diagonal ? static_cast<int>(diag_entries.size()) : dense.n;
    }
    QMatrix to_dense() const;
};

QVector apply(const OperatorModel& T, const QVector& x);
QVector apply_power(const OperatorModel& T, int n, const QVector& x);
double power_norm(const OperatorModel& T, int n);
double op_norm(const OperatorModel& T);

// T^2 - 2 Re(s) T + |s|^2; depends on s only through Re(s) and |s|.
OperatorModel q_op(const OperatorModel& T, const Quaternion& s);

bool in_resolvent_set(const OperatorModel& T, const Quaternion& s);
std::vector<Quaternion> s_spectrum(const OperatorModel& T);

// T^n Q_s^{-m}(T) x and its operator norm; throws SingularMatrixError when s
// is spectral.
QVector apply_power_qinv(const OperatorModel& T, const Quaternion& s, int n,
                         int m, const QVector& x);
double power_qinv_norm(const OperatorModel& T, const Quaternion& s, int n, int m);

struct SectorialProfile {
    double omega = 0.0;
    std::vector<double> grid_t;
    std::vector<double> q_scaled;   // t^2 ||Q_{t e^{i w}}^{-1}(T)||
    std::vector<double> tq_scaled;  // t ||T Q_{t e^{i w}}^{-1}(T)||
    double measured_M = 0.0;
};

// Scans the ray {t e^{i w}} on the grid's scan points; every point must be
// in the resolvent set, otherwise SpectralPointError carries the offending t.
SectorialProfile sectorial_scan(const OperatorModel& T, double omega,
                                const LogGrid& grid);

// Safety factor applied on top of a grid-measured supremum.
inline double safe_M(const SectorialProfile& p) { return p.measured_M * 1.01; }

// ||T^n Q_s^{-m}|| <= (1+3M)^m / |s|^(2m-n) on every scan point, 0 <= n <= 2m.
VerificationReport power_resolvent_bound_check(const OperatorModel& T,
                                               double omega, const LogGrid& grid,
                                               int n, int m, double M,
                                               double tol = 1e-9);

// Same bound for every 0 <= n <= 2m in one grid pass; one report per n.
std::vector<VerificationReport> power_resolvent_bound_sweep(
    const OperatorModel& T, double omega, const LogGrid& grid, int m, double M,
    double tol = 1e-9);

// ||x|| + ||T^n x||; n = 0 gives 2||x|| (the identity-power convention).
double graph_norm(const OperatorModel& T, int n, const QVector& x);

// max{1 + (4+12M)^m |s|^n, (4+12M)^m / |s|^(m-n)} for n <= m.
double embedding_constant(double M, int n, int m, double s_abs);

// ||x||_{D(T^n)} <= embedding_constant * ||x||_{D(T^m)} over sample vectors.
VerificationReport embedding_constant_check(const OperatorModel& T, double M,
                                            int n, int m, const Quaternion& s,
                                            const std::vector<QVector>& samples,
                                            double tol = 1e-9);

// || sum_{j<=N} T^j s^{-j-1} - Q_s^{-1}(T)(conj(s) I - T) || within the
// geometric tail ||T||^(N+1) |s|^(-N-2) / (1 - ||T||/|s|); needs |s| > ||T||.
VerificationReport resolvent_series_check(const OperatorModel& T,
                                          const Quaternion& s, int n_terms,
                                          double tol = 1e-9);

}  // namespace qinterp
