#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gfmlab/control.hpp"
#include "gfmlab/plant.hpp"
#include "gfmlab/pll.hpp"
#include "gfmlab/profile.hpp"
#include "gfmlab/units.hpp"

namespace gfm {

enum class ControllerKind { pf_gfm, hybrid_fp_qv };

std::string_view to_string(ControllerKind kind);
ControllerKind controller_from_string(std::string_view name);

/// A step added to p_ref at `time` (seconds after the pre-roll).
struct ReferenceStep {
    double time = 0.0;
    double delta = 0.0;
};

/// Seconds simulated after the last profile segment when t_end is automatic.
inline constexpr double kSettleAfterEvent = 3.0;

struct Scenario {
    std::string name;
    ControllerKind controller = ControllerKind::hybrid_fp_qv;
    double p_ref = 0.0;
    double q_ref = 0.0;
    FrequencyProfile profile = FrequencyProfile::flat(50.0);
    double initial_soc = 0.5;
    /// Explicit power window, intersected with the ESS window when the SoC
    /// policy is on.
    std::optional<PowerLimits> power_limits;
    bool soc_policy = true;
    /// When set, t_end tracks profile.end_time() + kSettleAfterEvent.
    bool t_end_auto = true;
    double t_end = kSettleAfterEvent;
    double dt = 1e-4;
    double pre_roll = 8.0;  // long enough for the slowest loop to settle to 1e-3
    double output_interval = 1e-3;
    /// Optional first-order filter on the PCC voltage seen by the
    /// controllers, s. Zero feeds the measurement through unfiltered.
    double v_filter_tau = 0.0;
    std::optional<ReferenceStep> p_step;

    CircuitParams circuit;
    PllParams pll;
    InnerParams inner;
    GfmPfParams pf;
    HybridParams hybrid;
    EssParams ess;
    PerUnitBase base = PerUnitBase::table1();

    /// Re-derives t_end when automatic. Call after editing the profile.
    void sync_t_end();
    /// Throws InvalidScenario on any invariant breach.
    void validate() const;
    [[nodiscard]] std::size_t output_decimation() const;
};

/// Reference (table1) system with a hybrid controller, flat 50 Hz, p_ref = 0.
Scenario table1_scenario();

struct BuiltinScenario {
    std::string name;
    std::string description;
    Scenario scenario;
    /// RoCoF family (Hz/s) for the sweep scenarios; empty otherwise.
    std::vector<double> rocof_family;
};

/// fig7, fig8, fig9, fig10a, fig10b.
const std::vector<BuiltinScenario>& builtin_scenarios();
/// Throws std::out_of_range for unknown names.
const BuiltinScenario& builtin_scenario(std::string_view name);

/// JSON configuration; see README for the schema. Unknown keys are rejected
/// with InvalidScenario, as is anything that fails validate().
Scenario scenario_from_json(std::string_view text);
std::string scenario_to_json(const Scenario& s);

/// Returns a copy with one numeric field replaced. `path` uses the config
/// vocabulary, e.g. "p_ref", "profile.rocof", "hybrid.d", "circuit.scr".
/// Boolean fields take 0 or nonzero; "p_step.*" creates the step if absent.
Scenario with_parameter(const Scenario& s, std::string_view path, double value);

}  // namespace gfm
