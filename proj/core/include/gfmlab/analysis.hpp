#pragma once

#include <stdexcept>
#include <string>

#include "gfmlab/linear_model.hpp"
#include "gfmlab/pll.hpp"
#include "gfmlab/trace.hpp"

namespace gfm {

struct Scenario;

class DegenerateInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Angle-distribution factor x_g / (x_g + x_l). Throws DegenerateInput when
/// both reactances are zero or either is negative.
double g_delta_x(double x_l, double x_g);

/// g (delta_i - delta_g) + delta_g
double predict_pcc_angle(double delta_i, double delta_g, double g);

enum class GridRegime { weak_grid, strong_grid, exact };

/// Gains of the small-signal power loop around the hybrid controller.
struct ClosedLoopParams {
    PllParams pll;
    double kp_p = 1.0;
    double ki_p = 5.0;
    double h = 5.0;
    double d = 10.0;
    double tau_d = 0.05;
    /// Low-pass on the measured frequency ahead of G_F; 0 removes it.
    double tau_f = 0.02;
    /// Close the Hs + D support loop through the PLL frequency.
    bool include_support = true;
    /// Used by GridRegime::exact; weak and strong force 1 and 0.
    double g = 0.9434;
    /// Angle-to-power sensitivity u0^2 / (x_l + x_g), p.u. per rad.
    double k_sync = 1.0 / (0.05 + 1.0 / 1.2);
    double omega_base = 2.0 * 3.14159265358979323846 * 50.0;
    /// Replace the PLL by unity (G_PLL = 1).
    bool ideal_pll = false;
    /// Replace the power PI by perfect tracking (P = P*).
    bool ideal_power_loop = false;
};

/// Small-signal parameters implied by a scenario: PLL and power-loop gains,
/// k_sync = u0^2 / (x_v + x_g) and g = g_delta_x(x_v, x_g), where x_v is the
/// virtual reactance between the inner voltage and the PCC.
ClosedLoopParams closed_loop_params(const Scenario& s);

/// Closed-loop transfer function from the power reference to P, reduced by
/// polynomial algebra. Throws ImproperModel if the reduction comes out
/// improper, and std::invalid_argument for non-positive k_sync or PI gains.
LinearModel build_closed_loop(GridRegime regime, const ClosedLoopParams& params);

/// Conventional P-f loop K w_b / (s G_F(s) + K w_b) with the same G_F.
LinearModel pf_closed_loop(const ClosedLoopParams& params);

struct MetricsReport {
    double steady_state_mean = 0.0;
    double peak_to_peak = 0.0;
    bool oscillation_detected = false;
    long pole_slip_count = 0;
    double max_power = 0.0;
    double soc_final = 0.0;
    bool soc_violated = false;
    bool sync_held = false;
};

inline constexpr double kOscillationThreshold = 0.2;     // p.u. peak-to-peak
inline constexpr double kSyncFrequencyTolerance = 0.1;   // Hz
inline constexpr double kSocViolationMargin = 1e-3;
inline constexpr double kDefaultMetricsWindow = 1.0;     // s

class WindowTooLong : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Trailing-window and whole-trace metrics. Throws WindowTooLong when the
/// window exceeds the trace duration.
MetricsReport analyze_trace(const Trace& trace, double window = kDefaultMetricsWindow);

/// `name=value` lines.
std::string format_report(const MetricsReport& report);

}  // namespace gfm
