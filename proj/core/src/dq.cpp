#include "gfmlab/dq.hpp"

#include <numbers>
#include <stdexcept>

namespace gfm {

ClampResult clamp_magnitude(DqPair v, double limit) {
    if (!(limit >= 0.0)) {
        throw std::invalid_argument("clamp_magnitude: negative limit");
    }
    const double mag = v.magnitude();
    if (mag <= limit) {
        return {v, false};
    }
    const double scale = limit / mag;
    return {{v.d * scale, v.q * scale}, true};
}

DqPair rotate(DqPair v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.d - s * v.q, s * v.d + c * v.q};
}

double wrap_angle(double angle) {
    constexpr double pi = std::numbers::pi;
    double w = std::remainder(angle, 2.0 * pi);
    if (w <= -pi) {
        w += 2.0 * pi;
    }
    return w;
}

}  // namespace gfm
