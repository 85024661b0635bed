#pragma once

#include <array>
#include <cstddef>

namespace gfm {

/// Classical fixed-step fourth-order Runge-Kutta over a fixed-size state.
template <std::size_t N>
class RungeKutta4 {
public:
    using State = std::array<double, N>;

    template <typename Deriv>
    void step(State& x, double t, double h, Deriv&& deriv) {
        deriv(t, x, k1_);
        axpy(w_, x, k1_, 0.5 * h);
        deriv(t + 0.5 * h, w_, k2_);
        axpy(w_, x, k2_, 0.5 * h);
        deriv(t + 0.5 * h, w_, k3_);
        axpy(w_, x, k3_, h);
        deriv(t + h, w_, k4_);
        for (std::size_t i = 0; i < N; ++i) {
            x[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
    }

private:
    static void axpy(State& out, const State& x, const State& k, double h) {
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = x[i] + h * k[i];
        }
    }

    State k1_{}, k2_{}, k3_{}, k4_{}, w_{};
};

}  // namespace gfm
