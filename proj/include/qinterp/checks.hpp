#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qinterp/grid.hpp"
#include "qinterp/interpolation.hpp"
#include "qinterp/report.hpp"
#include "qinterp/spectral.hpp"

namespace qinterp {

// Deterministic random source: mt19937_64 with explicit uniform and
// Box-Muller transforms, so streams are identical across platforms.
struct Rng {
    std::mt19937_64 gen;
    bool has_spare = false;
    double spare = 0.0;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform();  // [0, 1)
    double normal();
    double log_uniform(double lo, double hi);
    Quaternion quat_normal();
    QVector unit_vector(int dim);
    QMatrix dense_normal(int dim);
};

struct CheckConfig {
    std::string check;
    std::string operator_file;  // empty: use the builtin family
    std::string builtin = "a";
    double omega = kPi;
    double theta = 0.5;
    double p = 2.0;  // infinity allowed
    int n = 1;
    int k = 2;
    int m = 3;
    int samples = 32;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    LogGrid grid{};
};

// Families: "a"/"diag-imag" (purely imaginary diagonal, radii log-spaced in
// [1e-2, 1e2], units on a Fibonacci sphere), "b"/"dense-unitary" (family (a)
// conjugated by a seeded random unitary), "c"/"diag-real" (positive real
// diagonal). An optional ":N" suffix sets the dimension (default 16).
OperatorModel builtin_model(const std::string& name, std::uint64_t seed);
int builtin_dim(const std::string& name);

// Coordinate basis vectors first, then the normalized all-ones vector, then
// seeded random unit vectors, up to count.
std::vector<QVector> sample_vectors(int dim, int count, std::uint64_t seed);

// Dispatches on cfg.check: lemma-power-bound, embedding, series, thm35,
// thm36, thm37, couple-props, op-interp. Aggregates the worst margin over
// samples (and grid points where applicable) into one report.
VerificationReport run_check(const CheckConfig& cfg);

}  // namespace qinterp
