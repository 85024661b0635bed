#pragma once

#include <numbers>

#include "gfmlab/dq.hpp"
#include "gfmlab/plant.hpp"
#include "gfmlab/units.hpp"

namespace gfm {

// ---------------------------------------------------------------------------
// Inner cascade: virtual admittance -> circular current limiter -> current PI
// ---------------------------------------------------------------------------

struct InnerParams {
    double kp_i = 0.5;
    double ki_i = 16.0;
    double r_v = 0.01;
    double x_v = 0.05;
    double i_lim = 1.2;
    /// Decoupling reactance between the EMF and the measured voltage.
    double x_ff = 0.17;
    /// EMF magnitude above which the current integrator stops winding up.
    double e_windup = 1.5;

    void validate() const;
};

struct InnerState {
    DqPair integ;
};

struct InnerOutput {
    DqPair e_c;
    DqPair d_integ;
    DqPair i_ref;  // after the limiter
    bool limiter_active = false;
};

InnerOutput inner_cascade(double v_mag_ref, double delta_i, DqPair v_meas, DqPair i_meas, const InnerState& state,
                          const InnerParams& params);

// ---------------------------------------------------------------------------
// Conventional P-f grid-forming law: (h s + d) domega = p_ref - p
// ---------------------------------------------------------------------------

struct GfmPfParams {
    double h = 5.0;
    double d = 10.0;

    void validate() const;
};

struct GfmPfState {
    double domega = 0.0;   // p.u.
    double delta_i = 0.0;  // rad, unwrapped
};

GfmPfState gfm_pf_derivative(double p_ref, double p_meas, const GfmPfState& state, const GfmPfParams& params,
                             const PerUnitBase& base);

// ---------------------------------------------------------------------------
// Hybrid f-P & Q-V controller
// ---------------------------------------------------------------------------

struct HybridParams {
    double h = 5.0;
    double d = 10.0;
    double kp_p = 1.0;
    double ki_p = 5.0;
    double nq = 0.05;
    double tau_d = 0.05;
    /// First-order low-pass on the PLL frequency before the support block, s.
    /// Zero bypasses it.
    double tau_f = 0.02;
    double delta_cmd_limit = std::numbers::pi / 2.0;
    double u0 = 1.0;
    /// Disables the Hs + D support block (dp forced to zero).
    bool support_enabled = true;

    void validate() const;
};

struct HybridState {
    double p_integ = 0.0;  // rad
    double df_lag = 0.0;   // lag state of the filtered derivative, p.u.
    double df_meas = 0.0;  // low-passed frequency deviation, p.u.
};

struct FpSupport {
    double dp = 0.0;
    double dfilt = 0.0;     // filtered d(df)/dt, p.u./s
    double d_df_lag = 0.0;  // state derivatives
    double d_df_meas = 0.0;
};

/// Frequency-to-power support dp = -(h * d/dt + d) applied to df_pu after the
/// tau_f low-pass, with the derivative realized as s / (tau_d s + 1).
FpSupport fp_support(double df_pu, const HybridState& state, const HybridParams& params);

struct PowerLimitCommand {
    double p_ref = 0.0;
    double p_min = -1.0;
    double p_max = 1.0;
    bool saturated = false;
};

PowerLimitCommand saturate_power_ref(double p_ref, double dp, PowerLimits limits);

struct PowerPiOutput {
    double error = 0.0;
    double delta_cmd = 0.0;
    double d_p_integ = 0.0;
    bool clamped = false;
};

/// Power PI producing the phase shift. The integrator holds when `freeze` is
/// set, and also when the +/- delta_cmd_limit clamp is active and the error
/// pushes further out.
PowerPiOutput power_pi_step(const PowerLimitCommand& cmd, double p_meas, const HybridState& state,
                            const HybridParams& params, bool freeze);

/// True when the current limiter is active and the power error would push
/// the phase shift (and thus the current demand) further.
bool limiter_windup(bool limiter_active, double error, double delta_cmd);

inline double hybrid_angle(double theta_pll, double delta_cmd) { return theta_pll + delta_cmd; }

inline constexpr double kVoltageRefMin = 0.8;
inline constexpr double kVoltageRefMax = 1.2;

/// Q-V droop: u0 + nq (q_ref - q_meas), clamped to [0.8, 1.2].
double qv_voltage_ref(double q_ref, double q_meas, const HybridParams& params);

}  // namespace gfm
