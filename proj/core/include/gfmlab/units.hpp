#pragma once

#include <numbers>

namespace gfm {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// System base quantities. All derived per-unit values in the library are
/// relative to one of these.
class PerUnitBase {
public:
    /// Throws std::invalid_argument unless every base is strictly positive.
    PerUnitBase(double f_base_hz, double s_base_va, double v_base_ll_rms);

    [[nodiscard]] double f_base() const { return f_base_; }
    [[nodiscard]] double s_base() const { return s_base_; }
    [[nodiscard]] double v_base() const { return v_base_; }
    [[nodiscard]] double omega_base() const { return omega_base_; }
    [[nodiscard]] double i_base() const;
    [[nodiscard]] double z_base() const;

    [[nodiscard]] double power_to_pu(double watts) const { return watts / s_base_; }
    [[nodiscard]] double power_from_pu(double pu) const { return pu * s_base_; }
    [[nodiscard]] double voltage_to_pu(double volts) const { return volts / v_base_; }
    [[nodiscard]] double voltage_from_pu(double pu) const { return pu * v_base_; }
    [[nodiscard]] double impedance_to_pu(double ohms) const { return ohms / z_base(); }
    [[nodiscard]] double impedance_from_pu(double pu) const { return pu * z_base(); }

    /// (f - f_base) / f_base
    [[nodiscard]] double frequency_deviation_pu(double f_hz) const { return (f_hz - f_base_) / f_base_; }

    /// 50 Hz, 220 MVA, 66 kV.
    static PerUnitBase table1();

private:
    double f_base_;
    double s_base_;
    double v_base_;
    double omega_base_;
};

}  // namespace gfm
