// Scalar arithmetic of the quaternion algebra and its sphere geometry.
#pragma once

#include <cmath>
#include <stdexcept>

namespace qinterp {

// Absolute tolerance for scalar equality tests throughout the library.
inline constexpr double kScalarTol = 1e-12;

inline constexpr double kPi = 3.14159265358979323846;

struct Quaternion {
    double w = 0.0;  // real part
    double x = 0.0;  // e1 coefficient
    double y = 0.0;  // e2 coefficient
    double z = 0.0;  // e3 coefficient

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_)
        : w(w_), x(x_), y(y_), z(z_) {}
    constexpr Quaternion(double real) : w(real) {}

    friend constexpr Quaternion operator+(const Quaternion& a, const Quaternion& b) {
        return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend constexpr Quaternion operator-(const Quaternion& a, const Quaternion& b) {
        return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
    }
    friend constexpr Quaternion operator-(const Quaternion& a) {
        return {-a.w, -a.x, -a.y, -a.z};
    }
    Quaternion& operator+=(const Quaternion& b) { *this = *this + b; return *this; }
    Quaternion& operator-=(const Quaternion& b) { *this = *this - b; return *this; }
};

// Hamilton product: e1 e2 = e3, e2 e3 = e1, e3 e1 = e2, anticommuting.
constexpr Quaternion mul(const Quaternion& a, const Quaternion& b) {
    return {
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    };
}
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) { return mul(a, b); }
constexpr Quaternion operator*(double c, const Quaternion& a) {
    return {c * a.w, c * a.x, c * a.y, c * a.z};
}
constexpr Quaternion operator*(const Quaternion& a, double c) { return c * a; }

constexpr Quaternion conj(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }
constexpr double re(const Quaternion& q) { return q.w; }
constexpr double norm_sq(const Quaternion& q) {
    return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z;
}
inline double abs(const Quaternion& q) { return std::sqrt(norm_sq(q)); }
inline double im_abs(const Quaternion& q) {
    return std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
}

inline Quaternion inverse(const Quaternion& q) {
    const double n2 = norm_sq(q);
    if (n2 == 0.0) throw std::domain_error("inverse: division by zero quaternion");
    return (1.0 / n2) * conj(q);
}

// Unit purely imaginary quaternion; validated on construction.
struct ImaginaryUnit {
    Quaternion q;
    explicit ImaginaryUnit(const Quaternion& v) : q(v) {
        if (std::fabs(re(v)) > kScalarTol || std::fabs(abs(v) - 1.0) > kScalarTol)
            throw std::domain_error("ImaginaryUnit: not a unit imaginary quaternion");
    }
    static ImaginaryUnit from_direction(double x, double y, double z) {
        const double n = std::sqrt(x * x + y * y + z * z);
        if (n == 0.0) throw std::domain_error("ImaginaryUnit: zero direction");
        return ImaginaryUnit(Quaternion{0.0, x / n, y / n, z / n});
    }
};

inline const ImaginaryUnit& e1_unit() {
    static const ImaginaryUnit u(Quaternion{0.0, 1.0, 0.0, 0.0});
    return u;
}

// t (cos w + i sin w) with t > 0; independent of i when sin w = 0.
inline Quaternion ray_point(double t, double omega, const ImaginaryUnit& i) {
    if (!(t > 0.0)) throw std::domain_error("ray_point: t must be positive");
    if (omega < 0.0 || omega > kPi + kScalarTol)
        throw std::domain_error("ray_point: omega outside [0, pi]");
    return Quaternion{t * std::cos(omega), 0.0, 0.0, 0.0} +
           (t * std::sin(omega)) * i.q;
}

// q and s lie on the same 2-sphere: equal real parts and imaginary moduli.
inline bool same_sphere(const Quaternion& q, const Quaternion& s, double tol = kScalarTol) {
    return std::fabs(re(q) - re(s)) <= tol && std::fabs(im_abs(q) - im_abs(s)) <= tol;
}

// Canonical representative of the sphere through q: Re(q) + |Im(q)| e1.
inline Quaternion sphere_rep(const Quaternion& q) {
    return {re(q), im_abs(q), 0.0, 0.0};
}

inline bool approx_equal(const Quaternion& a, const Quaternion& b, double tol = kScalarTol) {
    return std::fabs(a.w - b.w) <= tol && std::fabs(a.x - b.x) <= tol &&
           std::fabs(a.y - b.y) <= tol && std::fabs(a.z - b.z) <= tol;
}

// Integer power by repeated multiplication; q^0 = 1.
inline Quaternion qpow(Quaternion q, int n) {
    Quaternion r{1.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) r = r * q;
    return r;
}

}  // namespace qinterp
