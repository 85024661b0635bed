#pragma once

#include "gfmlab/dq.hpp"
#include "gfmlab/linear_model.hpp"
#include "gfmlab/units.hpp"

#include <stdexcept>

namespace gfm {

/// Synchronous-reference-frame PLL. The phase detector output is the
/// normalized q-axis voltage, so kp is in rad/s per rad and ki in rad/s^2
/// per rad for small errors.
struct PllParams {
    double kp = 800.0;
    double ki = 1500.0;

    void validate() const;
};

struct PllState {
    double theta = 0.0;      // rad, unwrapped, relative to the nominal frame
    double omega_int = 0.0;  // rad/s
};

struct PllOutput {
    PllState derivative;
    double theta = 0.0;   // rad
    double f_pll = 0.0;   // Hz
    double error = 0.0;   // normalized phase-detector output
};

/// Below this PCC magnitude the phase detector is undefined.
inline constexpr double kPllCollapseVoltage = 0.01;

/// Throws VoltageCollapse when |v_pcc| < kPllCollapseVoltage.
PllOutput pll_derivative(const PllState& state, DqPair v_pcc, const PllParams& params, const PerUnitBase& base);

/// Free-running PLL with the phase detector disconnected: theta advances at
/// omega_int, which holds. Used while the PCC voltage is collapsed.
PllOutput pll_coast(const PllState& state, const PerUnitBase& base);

/// Small-signal angle transfer (kp s + ki) / (s^2 + kp s + ki).
LinearModel pll_linear_model(const PllParams& params);

class VoltageCollapse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gfm
