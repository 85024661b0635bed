#pragma once

#include "gfmlab/dq.hpp"
#include "gfmlab/units.hpp"

namespace gfm {

/// Series network: EMF -(r_f, l_f)- terminal -(r_l, x_l)- PCC -(r_g, x_g)- grid.
/// Inductances are in p.u. of the nominal-frequency reactance, so l == x
/// numerically.
struct CircuitParams {
    double r_f = 0.012;
    double l_f = 0.12;
    double r_l = 0.01;
    double x_l = 0.05;
    double r_g = 0.1;
    double x_g = 1.0 / 1.2;
    double u0 = 1.0;

    [[nodiscard]] double l_total() const { return l_f + x_l + x_g; }
    [[nodiscard]] double r_total() const { return r_f + r_l + r_g; }
    /// Reactance between the converter EMF and the PCC.
    [[nodiscard]] double x_converter() const { return l_f + x_l; }
    [[nodiscard]] double r_converter() const { return r_f + r_l; }

    /// Reference (table1) parameter set with x_g = 1 / scr.
    static CircuitParams table1(double scr = 1.2);
    void validate() const;
};

struct PlantState {
    DqPair i;              // series current, p.u.
    double delta_g = 0.0;  // grid source angle, rad, unwrapped
};

struct PlantDerivative {
    DqPair di_dt;           // p.u./s
    double ddelta_g = 0.0;  // rad/s
};

/// Current magnitude at which a run is declared diverged.
inline constexpr double kDivergenceCurrent = 10.0;

/// Grid source phasor u0 * (cos delta_g, sin delta_g).
DqPair grid_voltage(const PlantState& state, const CircuitParams& params);

/// Series-branch dynamics in the nominal rotating frame. Throws
/// SimulationDiverged (time left at 0; the engine rethrows with its clock)
/// when |i| >= kDivergenceCurrent.
PlantDerivative plant_derivative(const PlantState& state, DqPair e_c, const CircuitParams& params,
                                 double f_grid, const PerUnitBase& base);

/// PCC voltage reconstructed from the grid side, including the inductive
/// drop of the grid reactance.
DqPair measure_pcc(const PlantState& state, const CircuitParams& params, DqPair di_dt,
                   const PerUnitBase& base);

/// PCC voltage without the di/dt term, u_g + (r_g + j x_g) i. This is what
/// the controllers measure: it depends on state only, so closing loops on it
/// creates no algebraic loop through the converter EMF.
DqPair measure_pcc_quasi_static(const PlantState& state, const CircuitParams& params);

struct PowerPair {
    double p = 0.0;
    double q = 0.0;
};

/// Generator convention: P > 0 exports, Q = v_q i_d - v_d i_q.
PowerPair compute_power(DqPair v, DqPair i);

struct EssParams {
    double e_cap = 5.0;  // p.u. * s
    double soc_high = 0.9;
    double soc_low = 0.1;
    double p_rating = 1.0;
    double hysteresis_band = 0.02;

    void validate() const;
};

struct EssState {
    double soc = 0.5;
    // Latched limit flags for the hysteresis.
    bool high_engaged = false;
    bool low_engaged = false;
};

struct SocStep {
    EssState state;
    bool clamped = false;
};

/// Explicit SoC update for constant P over dt; discharge (P > 0) lowers SoC.
SocStep soc_step(const EssState& state, double p, double dt, const EssParams& params);

struct PowerLimits {
    double p_min = -1.0;
    double p_max = 1.0;
};

/// Updates the hysteresis latches for the current SoC and returns the
/// resulting power window.
PowerLimits ess_power_limits(EssState& state, const EssParams& params);

}  // namespace gfm
