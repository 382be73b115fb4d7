// Deterministic sampling helpers. The raw mt19937_64 stream is portable; the
// standard library distributions are not, so the mappings are done by hand.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qinterp/quaternion.hpp"

namespace qinterp {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; one value per call, cached pair.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Quaternion gaussian_quaternion() {
        const double w = gaussian();
        const double x = gaussian();
        const double y = gaussian();
        const double z = gaussian();
        return {w, x, y, z};
    }

    Quaternion unit_quaternion() {
        Quaternion q = gaussian_quaternion();
        double n = abs(q);
        while (n < 1e-8) {
            q = gaussian_quaternion();
            n = abs(q);
        }
        return (1.0 / n) * q;
    }

    ImaginaryUnit unit_imaginary() {
        double x = gaussian(), y = gaussian(), z = gaussian();
        while (x * x + y * y + z * z < 1e-16) {
            x = gaussian();
            y = gaussian();
            z = gaussian();
        }
        return ImaginaryUnit::from_direction(x, y, z);
    }

    std::vector<Quaternion> gaussian_vector(int n) {
        std::vector<Quaternion> v(n);
        for (auto& q : v) q = gaussian_quaternion();
        return v;
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qinterp
