#include "gfmlab/control.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "gfmlab/errors.hpp"

namespace gfm {

void InnerParams::validate() const {
    if (!(i_lim >= 0.0) || !(x_v > 0.0) || !(r_v >= 0.0) || !(kp_i >= 0.0) || !(ki_i >= 0.0) || !(e_windup > 0.0) ||
        !std::isfinite(x_ff)) {
        throw InvalidScenario("InnerParams: need i_lim >= 0, x_v > 0, r_v >= 0 and non-negative gains");
    }
}

InnerOutput inner_cascade(double v_mag_ref, double delta_i, DqPair v_meas, DqPair i_meas, const InnerState& state,
                          const InnerParams& params) {
    const DqPair v_ref = DqPair::polar(v_mag_ref, delta_i);
    const std::complex<double> z_v(params.r_v, params.x_v);
    const DqPair i_cmd = DqPair::from_complex((v_ref - v_meas).to_complex() / z_v);
    const auto [i_ref, limited] = clamp_magnitude(i_cmd, params.i_lim);

    const DqPair err = i_ref - i_meas;
    InnerOutput out;
    out.i_ref = i_ref;
    out.limiter_active = limited;
    out.e_c = v_meas + err * params.kp_i + state.integ + i_meas.j() * params.x_ff;
    out.d_integ = err * params.ki_i;
    if (out.e_c.magnitude() > params.e_windup) {
        if (out.d_integ.d * out.e_c.d > 0.0) {
            out.d_integ.d = 0.0;
        }
        if (out.d_integ.q * out.e_c.q > 0.0) {
            out.d_integ.q = 0.0;
        }
    }
    return out;
}

void GfmPfParams::validate() const {
    if (!(h > 0.0) || !(d >= 0.0)) {
        throw InvalidScenario("GfmPfParams: need h > 0 and d >= 0");
    }
}

GfmPfState gfm_pf_derivative(double p_ref, double p_meas, const GfmPfState& state, const GfmPfParams& params,
                             const PerUnitBase& base) {
    return {(p_ref - p_meas - params.d * state.domega) / params.h, base.omega_base() * state.domega};
}

void HybridParams::validate() const {
    if (!(h >= 0.0) || !(d >= 0.0) || !(kp_p >= 0.0) || !(ki_p >= 0.0) || !(tau_d > 0.0) || !(tau_f >= 0.0) ||
        !(delta_cmd_limit > 0.0) || !std::isfinite(nq) || !(u0 > 0.0)) {
        throw InvalidScenario("HybridParams: need tau_d > 0, tau_f >= 0, delta_cmd_limit > 0 and non-negative gains");
    }
}

FpSupport fp_support(double df_pu, const HybridState& state, const HybridParams& params) {
    FpSupport out;
    double df = df_pu;
    if (params.tau_f > 0.0) {
        df = state.df_meas;
        out.d_df_meas = (df_pu - state.df_meas) / params.tau_f;
    }
    out.dfilt = (df - state.df_lag) / params.tau_d;
    out.d_df_lag = out.dfilt;
    if (params.support_enabled) {
        out.dp = -(params.h * out.dfilt + params.d * df);
    }
    return out;
}

PowerLimitCommand saturate_power_ref(double p_ref, double dp, PowerLimits limits) {
    const double raw = p_ref + dp;
    PowerLimitCommand cmd;
    cmd.p_min = limits.p_min;
    cmd.p_max = limits.p_max;
    cmd.p_ref = std::clamp(raw, limits.p_min, limits.p_max);
    cmd.saturated = cmd.p_ref != raw;
    return cmd;
}

PowerPiOutput power_pi_step(const PowerLimitCommand& cmd, double p_meas, const HybridState& state,
                            const HybridParams& params, bool freeze) {
    PowerPiOutput out;
    out.error = cmd.p_ref - p_meas;
    const double raw = params.kp_p * out.error + state.p_integ;
    out.delta_cmd = std::clamp(raw, -params.delta_cmd_limit, params.delta_cmd_limit);
    out.clamped = out.delta_cmd != raw;
    const bool pushing_out = out.clamped && out.error * raw > 0.0;
    out.d_p_integ = (freeze || pushing_out) ? 0.0 : params.ki_p * out.error;
    return out;
}

bool limiter_windup(bool limiter_active, double error, double delta_cmd) {
    return limiter_active && error * delta_cmd > 0.0;
}

double qv_voltage_ref(double q_ref, double q_meas, const HybridParams& params) {
    return std::clamp(params.u0 + params.nq * (q_ref - q_meas), kVoltageRefMin, kVoltageRefMax);
}

}  // namespace gfm
