#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace gfm {

/// Real polynomial in the Laplace variable, coefficients in ascending powers.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> ascending) : c_(ascending) {}
    explicit Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) {}

    static Polynomial constant(double k) { return Polynomial({k}); }
    /// The Laplace variable s.
    static Polynomial s() { return Polynomial({0.0, 1.0}); }

    [[nodiscard]] const std::vector<double>& coeffs() const { return c_; }
    /// Degree after ignoring exact-zero leading terms; -1 for the zero polynomial.
    [[nodiscard]] int degree() const;
    [[nodiscard]] double leading() const;
    [[nodiscard]] double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

    [[nodiscard]] std::complex<double> evaluate(std::complex<double> s) const;
    [[nodiscard]] double evaluate(double s) const;

    /// Zeroes coefficients below tol * max|c| and trims the leading zeros.
    [[nodiscard]] Polynomial pruned(double rel_tol = 1e-12) const;

    /// Complex roots, via the balanced companion matrix.
    [[nodiscard]] std::vector<std::complex<double>> roots() const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double k, const Polynomial& a);

private:
    std::vector<double> c_;
};

class ImproperModel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rational transfer function num(s) / den(s).
class LinearModel {
public:
    /// Throws ImproperModel if deg num > deg den or den is zero.
    LinearModel(Polynomial num, Polynomial den);

    [[nodiscard]] const Polynomial& num() const { return num_; }
    [[nodiscard]] const Polynomial& den() const { return den_; }

    [[nodiscard]] double dc_gain() const;
    [[nodiscard]] std::vector<std::complex<double>> poles() const { return den_.roots(); }
    [[nodiscard]] std::vector<std::complex<double>> zeros() const { return num_.roots(); }
    [[nodiscard]] bool stable() const;

    /// Same transfer function with den made monic.
    [[nodiscard]] LinearModel normalized() const;

private:
    Polynomial num_;
    Polynomial den_;
};

class PoleOnImaginaryAxis : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// num(j omega) / den(j omega). Throws PoleOnImaginaryAxis when den(j omega) == 0.
std::complex<double> frequency_response(const LinearModel& m, double omega);

struct StepResponse {
    std::vector<double> values;
    bool stable = true;
    double max_pole_real = 0.0;
};

/// Unit-step response sampled at `t_grid` (ascending, starting at >= 0).
/// The model is realized in controllable canonical form and integrated with
/// RK4 at min(grid spacing, 1e-4 s, 1 / |fastest pole|). Unstable models still get simulated;
/// the flag records it.
StepResponse step_response(const LinearModel& m, std::span<const double> t_grid);

}  // namespace gfm
