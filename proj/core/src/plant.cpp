#include "gfmlab/plant.hpp"

#include <algorithm>
#include <cmath>

#include "gfmlab/errors.hpp"

namespace gfm {

CircuitParams CircuitParams::table1(double scr) {
    CircuitParams p;
    p.x_g = 1.0 / scr;
    return p;
}

void CircuitParams::validate() const {
    const bool finite = std::isfinite(r_f) && std::isfinite(l_f) && std::isfinite(r_l) && std::isfinite(x_l) &&
                        std::isfinite(r_g) && std::isfinite(x_g) && std::isfinite(u0);
    if (!finite || l_f <= 0.0 || x_l <= 0.0 || x_g <= 0.0 || r_f < 0.0 || r_l < 0.0 || r_g < 0.0 || u0 <= 0.0) {
        throw InvalidScenario("CircuitParams: reactances and u0 must be > 0, resistances >= 0");
    }
}

DqPair grid_voltage(const PlantState& state, const CircuitParams& params) {
    return DqPair::polar(params.u0, state.delta_g);
}

PlantDerivative plant_derivative(const PlantState& state, DqPair e_c, const CircuitParams& params,
                                 double f_grid, const PerUnitBase& base) {
    if (!(state.i.magnitude() < kDivergenceCurrent)) {
        throw SimulationDiverged("current magnitude reached the 10 p.u. divergence guard", 0.0);
    }
    const double l = params.l_total();
    const double r = params.r_total();
    const double wb = base.omega_base();
    const DqPair u_g = grid_voltage(state, params);
    // (l / wb) di/dt = e_c - u_g - (r + j l) i
    const DqPair drive = e_c - u_g - state.i * r - state.i.j() * l;
    return {drive * (wb / l), kTwoPi * (f_grid - base.f_base())};
}

DqPair measure_pcc(const PlantState& state, const CircuitParams& params, DqPair di_dt, const PerUnitBase& base) {
    const DqPair u_g = grid_voltage(state, params);
    return u_g + state.i * params.r_g + di_dt * (params.x_g / base.omega_base()) + state.i.j() * params.x_g;
}

DqPair measure_pcc_quasi_static(const PlantState& state, const CircuitParams& params) {
    return grid_voltage(state, params) + state.i * params.r_g + state.i.j() * params.x_g;
}

PowerPair compute_power(DqPair v, DqPair i) {
    return {v.d * i.d + v.q * i.q, v.q * i.d - v.d * i.q};
}

void EssParams::validate() const {
    if (!(e_cap > 0.0) || !(soc_low >= 0.0) || !(soc_low < soc_high) || !(soc_high <= 1.0) || !(p_rating >= 0.0) ||
        !(hysteresis_band >= 0.0)) {
        throw InvalidScenario("EssParams: need e_cap > 0, 0 <= soc_low < soc_high <= 1, rating and band >= 0");
    }
}

SocStep soc_step(const EssState& state, double p, double dt, const EssParams& params) {
    SocStep out{state, false};
    const double raw = state.soc - p * dt / params.e_cap;
    out.state.soc = std::clamp(raw, 0.0, 1.0);
    out.clamped = out.state.soc != raw;
    return out;
}

PowerLimits ess_power_limits(EssState& state, const EssParams& params) {
    if (state.soc >= params.soc_high) {
        state.high_engaged = true;
    } else if (state.soc < params.soc_high - params.hysteresis_band) {
        state.high_engaged = false;
    }
    if (state.soc <= params.soc_low) {
        state.low_engaged = true;
    } else if (state.soc > params.soc_low + params.hysteresis_band) {
        state.low_engaged = false;
    }
    PowerLimits lim{-params.p_rating, params.p_rating};
    if (state.high_engaged) {
        lim.p_min = 0.0;
    }
    if (state.low_engaged) {
        lim.p_max = 0.0;
    }
    return lim;
}

}  // namespace gfm
