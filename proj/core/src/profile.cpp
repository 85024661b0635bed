#include "gfmlab/profile.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gfm {

namespace {
constexpr double kSanityBandHz = 10.0;
}

FrequencyProfile::FrequencyProfile(double f0, std::vector<ProfileSegment> segments)
    : f0_(f0), segments_(std::move(segments)) {
    if (!std::isfinite(f0_) || f0_ <= 0.0) {
        throw std::invalid_argument("FrequencyProfile: f0 must be finite and positive");
    }
    double f = f0_;
    for (const auto& seg : segments_) {
        if (!std::isfinite(seg.rocof) || !std::isfinite(seg.duration) || seg.duration < 0.0) {
            throw std::invalid_argument("FrequencyProfile: segment needs finite rocof and duration >= 0");
        }
        f += seg.rocof * seg.duration;
        // Piecewise linear, so checking the knots bounds the whole trajectory.
        if (std::abs(f - f0_) > kSanityBandHz) {
            throw std::invalid_argument("FrequencyProfile: trajectory leaves f0 +/- 10 Hz (reaches " +
                                        std::to_string(f) + " Hz)");
        }
    }
}

FrequencyProfile FrequencyProfile::ramp_to(double f0, double hold, double rocof, double f_final) {
    if (rocof == 0.0 || (f_final - f0) / rocof < 0.0) {
        throw std::invalid_argument("FrequencyProfile::ramp_to: rocof sign does not reach f_final");
    }
    return FrequencyProfile(f0, {{0.0, hold}, {rocof, (f_final - f0) / rocof}});
}

double FrequencyProfile::end_time() const {
    double t = 0.0;
    for (const auto& seg : segments_) {
        t += seg.duration;
    }
    return t;
}

double FrequencyProfile::final_frequency() const {
    double f = f0_;
    for (const auto& seg : segments_) {
        f += seg.rocof * seg.duration;
    }
    return f;
}

double FrequencyProfile::max_abs_rocof() const {
    double m = 0.0;
    for (const auto& seg : segments_) {
        if (seg.duration > 0.0) {
            m = std::max(m, std::abs(seg.rocof));
        }
    }
    return m;
}

ProfileSample eval_profile(const FrequencyProfile& profile, double t) {
    double f = profile.f0();
    if (t < 0.0) {
        return {f, 0.0};
    }
    double start = 0.0;
    for (const auto& seg : profile.segments()) {
        const double end = start + seg.duration;
        if (t < end) {
            return {f + seg.rocof * (t - start), seg.rocof};
        }
        f += seg.rocof * seg.duration;
        start = end;
    }
    return {f, 0.0};
}

}  // namespace gfm
