#include "gfmlab/pll.hpp"

#include <algorithm>
#include <cmath>

#include "gfmlab/errors.hpp"

namespace gfm {

void PllParams::validate() const {
    if (!(kp > 0.0) || !(ki > 0.0) || !std::isfinite(kp) || !std::isfinite(ki)) {
        throw InvalidScenario("PllParams: kp and ki must be finite and > 0");
    }
}

PllOutput pll_derivative(const PllState& state, DqPair v_pcc, const PllParams& params, const PerUnitBase& base) {
    const double mag = v_pcc.magnitude();
    if (!(mag >= kPllCollapseVoltage)) {
        throw VoltageCollapse("PLL input below 0.01 p.u.; phase detector undefined");
    }
    const DqPair local = rotate(v_pcc, -state.theta);
    const double error = local.q / std::max(mag, 0.1);
    const double slip = state.omega_int + params.kp * error;

    PllOutput out;
    out.derivative.theta = slip;
    out.derivative.omega_int = params.ki * error;
    out.theta = state.theta;
    out.f_pll = base.f_base() + slip / kTwoPi;
    out.error = error;
    return out;
}

PllOutput pll_coast(const PllState& state, const PerUnitBase& base) {
    PllOutput out;
    out.derivative.theta = state.omega_int;
    out.theta = state.theta;
    out.f_pll = base.f_base() + state.omega_int / kTwoPi;
    return out;
}

LinearModel pll_linear_model(const PllParams& params) {
    return {Polynomial{params.ki, params.kp}, Polynomial{params.ki, params.kp, 1.0}};
}

}  // namespace gfm
