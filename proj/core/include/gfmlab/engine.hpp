#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gfmlab/errors.hpp"
#include "gfmlab/scenario.hpp"
#include "gfmlab/trace.hpp"

namespace gfm {

/// Full continuous state integrated by the engine.
struct SimState {
    PlantState plant;
    DqPair v_meas;  // filtered PCC voltage, used when v_filter_tau > 0
    PllState pll;
    InnerState inner;
    GfmPfState pf;
    HybridState hybrid;
    double soc = 0.5;
};

/// Thrown by run_scenario on divergence; carries everything recorded so far.
class DivergedRun : public SimulationDiverged {
public:
    DivergedRun(const SimulationDiverged& cause, Trace partial)
        : SimulationDiverged(cause), partial_(std::move(partial)) {}
    [[nodiscard]] const Trace& partial_trace() const { return partial_; }

private:
    Trace partial_;
};

/// Continuous states in integration order.
inline constexpr std::array<const char*, 15> kStateNames = {
    "i_d", "i_q", "delta_g", "v_meas_d", "v_meas_q", "pll_theta", "pll_omega_int", "inner_integ_d",
    "inner_integ_q", "pf_domega", "pf_delta_i", "p_integ", "df_lag", "df_meas", "soc"};

struct RunResult {
    Trace trace;
    SimState final_state;
    /// |d state / dt| per state at t = 0, and its maximum over the recorded run.
    std::array<double, kStateNames.size()> derivative_at_start{};
    std::array<double, kStateNames.size()> derivative_peak{};
    /// First time the SoC was clamped to [0, 1]; bookkeeping holds up to here.
    std::optional<double> soc_clamp_time;
};

/// Integrates plant, PLL, controller and SoC with classical RK4 at s.dt.
/// The pre-roll runs at nominal frequency with references ramped in, holds
/// the SoC at initial_soc, and is not recorded. Throws InvalidScenario or
/// DivergedRun.
RunResult simulate(const Scenario& s);

/// Index of the first state whose derivative at t = 0 is not below
/// ratio * its peak, or nullopt when every state starts settled. The SoC is
/// skipped: its rate is the power flow, not a transient.
std::optional<std::size_t> unsettled_state(const RunResult& r, double ratio = 1e-3);

inline Trace run_scenario(const Scenario& s) { return simulate(s).trace; }

struct BatchItem {
    std::optional<Trace> trace;
    std::string error;
    bool diverged = false;
};

/// Runs independent scenarios on up to `threads` workers (0 = GFMLAB_THREADS
/// or hardware concurrency). Results come back in input order.
std::vector<BatchItem> run_batch(const std::vector<Scenario>& scenarios, unsigned threads = 0);

}  // namespace gfm
