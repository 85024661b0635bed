#pragma once

#include <vector>

namespace gfm {

struct ProfileSegment {
    double rocof = 0.0;     // Hz/s
    double duration = 0.0;  // s
};

struct ProfileSample {
    double f = 0.0;      // Hz
    double rocof = 0.0;  // Hz/s
};

/// Piecewise-linear grid frequency trajectory: a chain of constant-slope
/// segments starting at `f0`, closed by an infinite hold at the last value.
class FrequencyProfile {
public:
    FrequencyProfile() = default;
    /// Throws std::invalid_argument on negative durations, non-finite values,
    /// or a trajectory leaving [f0 - 10, f0 + 10] Hz.
    FrequencyProfile(double f0, std::vector<ProfileSegment> segments);

    /// Flat hold for `hold` seconds, then a ramp at `rocof` until `f_final`.
    static FrequencyProfile ramp_to(double f0, double hold, double rocof, double f_final);
    static FrequencyProfile flat(double f0) { return FrequencyProfile(f0, {}); }

    [[nodiscard]] double f0() const { return f0_; }
    [[nodiscard]] const std::vector<ProfileSegment>& segments() const { return segments_; }
    [[nodiscard]] double end_time() const;
    [[nodiscard]] double final_frequency() const;
    [[nodiscard]] double max_abs_rocof() const;

private:
    double f0_ = 50.0;
    std::vector<ProfileSegment> segments_;
};

/// Frequency and active slope at time t (t < 0 reads as the initial value).
ProfileSample eval_profile(const FrequencyProfile& profile, double t);

}  // namespace gfm
