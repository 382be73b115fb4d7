// Real interpolation machinery: K-functionals on quaternionic couples,
// weighted L^p_* quadrature with analytic tails, interpolation norms, the
// psi functional and the trinomial proof decompositions that seed the solver.
#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "qinterp/grid.hpp"
#include "qinterp/qlinalg.hpp"
#include "qinterp/report.hpp"
#include "qinterp/spectral.hpp"

namespace qinterp {

enum class NormKind { L2, WeightedL2, Graph };

// One side of a couple: plain l2, entrywise weighted l2, or the graph norm
// ||v|| + ||T^n v|| of an operator power (n = 0 gives 2||v||).
struct NormSpec {
    NormKind kind = NormKind::L2;
    std::vector<double> weights;
    std::shared_ptr<OperatorModel> model;
    int power = 1;

    static NormSpec l2();
    static NormSpec weighted(std::vector<double> w);
    static NormSpec graph(std::shared_ptr<OperatorModel> T, int n);
};

double norm_eval(const NormSpec& spec, const QVector& v);

struct Couple {
    int dim = 0;
    NormSpec X, Y;
};

// ||x - b||_X + t ||b||_Y, the quantity the K-functional minimizes over b.
double k_objective(const Couple& c, double t, const QVector& x, const QVector& b);

struct KEstimate {
    double t = 0.0;
    double value = 0.0;
    QVector a, b;  // x = a + b at the best split found
    int solver_iterations = 0;
    double gap_estimate = 0.0;
};

// Upper estimate of K(t, x) by first-order minimization; the result never
// exceeds the objective at b = 0, b = x, or any supplied warm start.
KEstimate k_functional(const Couple& c, double t, const QVector& x,
                       const std::vector<QVector>& warm_starts = {});

// K estimates at every grid midpoint; node_seeds[j] (when given) are extra
// warm starts for node j. Nodes are solved independently, so the profile is
// deterministic under any worker count.
std::vector<KEstimate> k_profile(const Couple& c, const LogGrid& grid,
                                 const QVector& x,
                                 const std::vector<std::vector<QVector>>& node_seeds = {});

// K_{X,Y}(t, x) = t K_{Y,X}(1/t, x), verified with cross-seeded solves; the
// bound is twice the combined solver gap.
VerificationReport k_swap_identity_check(const Couple& c, double t, const QVector& x,
                                         double tol = 1e-9);

// L^p_* norm of nonnegative samples at the grid midpoints. For p < infinity
// the tails are additive contributions to the integral of f^p; for
// p = infinity they are sup bounds over the uncovered regions.
double lp_star_norm(const std::vector<double>& values, const LogGrid& grid,
                    double p, double tail_lo, double tail_hi,
                    double* quad_err = nullptr);

struct NormEstimate {
    double value = 0.0;
    double quad_err = 0.0;
    double solver_gap = 0.0;
};

// || t^{-theta} K(t, x) ||_{L^p_*} with tails from K(t,x) <= t ||x||_Y below
// the grid and K(t,x) <= ||x||_X above it.
NormEstimate interp_norm(const Couple& c, double theta, double p, const QVector& x,
                         const LogGrid& grid = LogGrid(),
                         const std::vector<std::vector<QVector>>& node_seeds = {});

// n even: ||T^n Q_{te^{iw}}^{-n/2} x||; n odd: ||T^{n+1} Q^{-(n+1)/2} x|| +
// t ||T^n Q^{-(n+1)/2} x||. Independent of the imaginary unit of the ray.
double psi(const OperatorModel& T, double omega, int n, double t, const QVector& x);

// ||x|| + || t^{n theta} psi_x(t) ||_{L^p_*}, tails from the power-resolvent
// bound: psi <= 2(1+3M)^ceil(n/2) ||x|| uniformly and
// psi <= 2(1+3M)^ceil(n/2) ||T^n x|| / t^n for the decay side.
NormEstimate interp_norm_star(const OperatorModel& T, double omega, int n,
                              double theta, double p, const QVector& x, double M,
                              const LogGrid& grid = LogGrid());

// x = a + b through the trinomial expansion of Q_{te^{iw}}^e Q^{-e}; part a
// collects the terms with T-power 2 alpha + beta >= min_a.
std::pair<QVector, QVector> trinomial_split(const OperatorModel& T, double omega,
                                            int exponent, double t, int min_a,
                                            const QVector& x);

// The split used to bound K(1/t^n, x) from above for t >= 1: exponent n,
// threshold n + 1.
std::pair<QVector, QVector> proof_decomposition(const OperatorModel& T, double omega,
                                                int n, double t, const QVector& x);

// sum of m! 2^beta / (alpha! beta! gamma!) over alpha+beta+gamma = m; equals 4^m.
double trinomial_weight_total(int m);

// || T x ||_{(V,W)_{theta,p}} <= ||T||_{X->V}^{1-theta} ||T||_{Y->W}^{theta}
// ||x||_{(X,Y)_{theta,p}} on sample vectors. Norms must be l2 or weighted so
// the restricted operator norms are exact; target solves are seeded with the
// images of the source splits at the matching scaled grid nodes.
VerificationReport operator_interpolation_check(const Couple& source,
                                                const Couple& target,
                                                const QMatrix& T, double theta,
                                                double p,
                                                const std::vector<QVector>& samples,
                                                const LogGrid& grid = LogGrid(),
                                                double tol = 1e-9);

// Smallest empirical constants of the two intermediate-space classes:
// C_J = max ||x||_E / (||x||_X^{1-theta} ||x||_Y^theta) over samples,
// C_K = max K(t,x) / (t^theta ||x||_E) over samples and scan points.
std::pair<double, double> intermediate_constants(const Couple& c, const NormSpec& E,
                                                 double theta,
                                                 const std::vector<QVector>& samples,
                                                 const LogGrid& grid = LogGrid());

}  // namespace qinterp
