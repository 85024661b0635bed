#pragma once

#include <stdexcept>
#include <string>

namespace gfm {

/// A scenario or parameter block violates its documented invariants.
class InvalidScenario : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The nonlinear simulation left its physical envelope (|i| >= 10 p.u. or a
/// non-finite state).
class SimulationDiverged : public std::runtime_error {
public:
    SimulationDiverged(const std::string& reason, double time)
        : std::runtime_error(reason + " at t=" + std::to_string(time) + " s"), reason_(reason), time_(time) {}

    [[nodiscard]] double time() const { return time_; }
    [[nodiscard]] const std::string& reason() const { return reason_; }

private:
    std::string reason_;
    double time_;
};

}  // namespace gfm
