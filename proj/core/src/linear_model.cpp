#include "gfmlab/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/Polynomials>

namespace gfm {

int Polynomial::degree() const {
    for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) {
        if (c_[static_cast<std::size_t>(k)] != 0.0) {
            return k;
        }
    }
    return -1;
}

double Polynomial::leading() const {
    const int d = degree();
    return d < 0 ? 0.0 : c_[static_cast<std::size_t>(d)];
}

std::complex<double> Polynomial::evaluate(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

double Polynomial::evaluate(double s) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

Polynomial Polynomial::pruned(double rel_tol) const {
    double scale = 0.0;
    for (double c : c_) {
        scale = std::max(scale, std::abs(c));
    }
    std::vector<double> out = c_;
    for (double& c : out) {
        if (std::abs(c) <= rel_tol * scale) {
            c = 0.0;
        }
    }
    while (!out.empty() && out.back() == 0.0) {
        out.pop_back();
    }
    return Polynomial(std::move(out));
}

std::vector<std::complex<double>> Polynomial::roots() const {
    const Polynomial p = pruned();
    const int n = p.degree();
    if (n < 1) {
        return {};
    }
    // Factor out exact roots at the origin; the companion solver wants c_0 != 0.
    std::size_t zeros_at_origin = 0;
    while (p.coeffs()[zeros_at_origin] == 0.0) {
        ++zeros_at_origin;
    }
    std::vector<std::complex<double>> out(zeros_at_origin, {0.0, 0.0});
    const auto reduced_degree = static_cast<std::size_t>(n) - zeros_at_origin;
    if (reduced_degree == 0) {
        return out;
    }
    Eigen::VectorXd coeffs(static_cast<Eigen::Index>(reduced_degree + 1));
    for (std::size_t k = 0; k <= reduced_degree; ++k) {
        coeffs[static_cast<Eigen::Index>(k)] = p.coeffs()[k + zeros_at_origin];
    }
    if (reduced_degree == 1) {
        out.emplace_back(-coeffs[0] / coeffs[1], 0.0);
        return out;
    }
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    for (const auto& r : solver.roots()) {
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    return out;
}

namespace {
std::vector<double> padded(const std::vector<double>& c, std::size_t n) {
    std::vector<double> out = c;
    out.resize(std::max(n, c.size()), 0.0);
    return out;
}
}  // namespace

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    const std::size_t n = std::max(a.c_.size(), b.c_.size());
    auto x = padded(a.c_, n);
    const auto y = padded(b.c_, n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] += y[k];
    }
    return Polynomial(std::move(x));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) {
        return {};
    }
    std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        for (std::size_t j = 0; j < b.c_.size(); ++j) {
            out[i + j] += a.c_[i] * b.c_[j];
        }
    }
    return Polynomial(std::move(out));
}

Polynomial operator*(double k, const Polynomial& a) {
    std::vector<double> out = a.c_;
    for (double& c : out) {
        c *= k;
    }
    return Polynomial(std::move(out));
}

LinearModel::LinearModel(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.degree() < 0) {
        throw ImproperModel("LinearModel: zero denominator");
    }
    if (num_.degree() > den_.degree()) {
        throw ImproperModel("LinearModel: numerator degree " + std::to_string(num_.degree()) +
                            " exceeds denominator degree " + std::to_string(den_.degree()));
    }
}

double LinearModel::dc_gain() const {
    if (den_[0] == 0.0) {
        throw PoleOnImaginaryAxis("dc_gain: pole at the origin");
    }
    return num_[0] / den_[0];
}

bool LinearModel::stable() const {
    const auto p = poles();
    return std::all_of(p.begin(), p.end(), [](auto z) { return z.real() < 0.0; });
}

LinearModel LinearModel::normalized() const {
    const double lead = den_.leading();
    return {(1.0 / lead) * num_, (1.0 / lead) * den_};
}

std::complex<double> frequency_response(const LinearModel& m, double omega) {
    if (omega < 0.0) {
        throw std::invalid_argument("frequency_response: omega must be >= 0");
    }
    const std::complex<double> s(0.0, omega);
    const auto d = m.den().evaluate(s);
    if (d == 0.0) {
        throw PoleOnImaginaryAxis("frequency_response: pole on the imaginary axis at omega=" + std::to_string(omega));
    }
    return m.num().evaluate(s) / d;
}

namespace {

/// Controllable canonical realization of a proper model with monic den.
struct Realization {
    std::vector<double> a;  // den coefficients a_0 .. a_{n-1}
    std::vector<double> c;  // output row
    double feedthrough = 0.0;

    [[nodiscard]] std::size_t order() const { return a.size(); }

    void derivative(const std::vector<double>& x, double u, std::vector<double>& dx) const {
        const std::size_t n = order();
        double last = u;
        for (std::size_t k = 0; k < n; ++k) {
            last -= a[k] * x[k];
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            dx[k] = x[k + 1];
        }
        dx[n - 1] = last;
    }

    [[nodiscard]] double output(const std::vector<double>& x, double u) const {
        double y = feedthrough * u;
        for (std::size_t k = 0; k < order(); ++k) {
            y += c[k] * x[k];
        }
        return y;
    }
};

Realization realize(const LinearModel& model) {
    const LinearModel m = LinearModel(model.num().pruned(), model.den().pruned()).normalized();
    const auto n = static_cast<std::size_t>(m.den().degree());
    Realization r;
    r.a.resize(n);
    r.c.resize(n);
    r.feedthrough = m.num()[n];
    for (std::size_t k = 0; k < n; ++k) {
        r.a[k] = m.den()[k];
        r.c[k] = m.num()[k] - r.feedthrough * r.a[k];
    }
    return r;
}

}  // namespace

StepResponse step_response(const LinearModel& m, std::span<const double> t_grid) {
    StepResponse out;
    const auto poles = m.poles();
    out.max_pole_real = -std::numeric_limits<double>::infinity();
    for (const auto& p : poles) {
        out.max_pole_real = std::max(out.max_pole_real, p.real());
    }
    out.stable = poles.empty() || out.max_pole_real < 0.0;

    const Realization r = realize(m);
    const std::size_t n = r.order();
    out.values.reserve(t_grid.size());
    if (t_grid.empty()) {
        return out;
    }
    if (t_grid.front() < 0.0) {
        throw std::invalid_argument("step_response: time grid must start at t >= 0");
    }

    double h_max = 1e-4;
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double spacing = t_grid[k] - t_grid[k - 1];
        if (!(spacing >= 0.0)) {
            throw std::invalid_argument("step_response: time grid must be ascending");
        }
        if (spacing > 0.0) {
            h_max = std::min(h_max, spacing);
        }
    }

    // Keep |lambda h| <= 1 for the fastest pole, well inside RK4's stability region.
    for (const auto& p : poles) {
        if (std::abs(p) > 0.0) {
            h_max = std::min(h_max, 1.0 / std::abs(p));
        }
    }

    std::vector<double> x(n, 0.0), k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto rk4 = [&](double h) {
        r.derivative(x, 1.0, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        r.derivative(tmp, 1.0, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        r.derivative(tmp, 1.0, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        r.derivative(tmp, 1.0, k4);
        for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    };

    double t = 0.0;
    for (double target : t_grid) {
        const double span_t = target - t;
        if (span_t > 0.0 && n > 0) {
            const auto steps = static_cast<std::size_t>(std::ceil(span_t / h_max - 1e-9));
            const double h = span_t / static_cast<double>(steps);
            for (std::size_t s = 0; s < steps; ++s) {
                rk4(h);
            }
        }
        t = target;
        out.values.push_back(r.output(x, 1.0));
    }
    return out;
}

}  // namespace gfm
