#pragma once

#include <cmath>
#include <complex>

namespace gfm {

/// Two-axis rotating-frame quantity (voltage or current phasor) in p.u.
struct DqPair {
    double d = 0.0;
    double q = 0.0;

    constexpr DqPair() = default;
    constexpr DqPair(double d_, double q_) : d(d_), q(q_) {}

    static DqPair polar(double magnitude, double angle) {
        return {magnitude * std::cos(angle), magnitude * std::sin(angle)};
    }
    static DqPair from_complex(std::complex<double> z) { return {z.real(), z.imag()}; }

    [[nodiscard]] std::complex<double> to_complex() const { return {d, q}; }
    [[nodiscard]] double magnitude() const { return std::hypot(d, q); }
    [[nodiscard]] double angle() const { return std::atan2(q, d); }
    [[nodiscard]] bool finite() const { return std::isfinite(d) && std::isfinite(q); }

    /// Multiplication by the imaginary unit (90 degree lead).
    [[nodiscard]] constexpr DqPair j() const { return {-q, d}; }

    constexpr DqPair& operator+=(DqPair o) {
        d += o.d;
        q += o.q;
        return *this;
    }
    constexpr DqPair& operator-=(DqPair o) {
        d -= o.d;
        q -= o.q;
        return *this;
    }
    constexpr DqPair& operator*=(double k) {
        d *= k;
        q *= k;
        return *this;
    }

    friend constexpr DqPair operator+(DqPair a, DqPair b) { return a += b; }
    friend constexpr DqPair operator-(DqPair a, DqPair b) { return a -= b; }
    friend constexpr DqPair operator-(DqPair a) { return {-a.d, -a.q}; }
    friend constexpr DqPair operator*(DqPair a, double k) { return a *= k; }
    friend constexpr DqPair operator*(double k, DqPair a) { return a *= k; }
    friend constexpr bool operator==(DqPair a, DqPair b) = default;
};

struct ClampResult {
    DqPair value;
    bool saturated = false;
};

/// Circular magnitude limiter. The input is returned untouched when it is
/// already inside the circle, otherwise it is scaled onto it (angle kept).
ClampResult clamp_magnitude(DqPair v, double limit);

/// Counter-clockwise rotation by `angle` radians.
DqPair rotate(DqPair v, double angle);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

}  // namespace gfm
