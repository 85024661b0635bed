#include "gfmlab/units.hpp"

#include <cmath>
#include <stdexcept>

namespace gfm {

PerUnitBase::PerUnitBase(double f_base_hz, double s_base_va, double v_base_ll_rms)
    : f_base_(f_base_hz), s_base_(s_base_va), v_base_(v_base_ll_rms), omega_base_(kTwoPi * f_base_hz) {
    if (!(f_base_ > 0.0) || !(s_base_ > 0.0) || !(v_base_ > 0.0) || !std::isfinite(f_base_) ||
        !std::isfinite(s_base_) || !std::isfinite(v_base_)) {
        throw std::invalid_argument("PerUnitBase: base quantities must be finite and strictly positive");
    }
}

double PerUnitBase::i_base() const { return s_base_ / (std::sqrt(3.0) * v_base_); }

double PerUnitBase::z_base() const { return v_base_ * v_base_ / s_base_; }

PerUnitBase PerUnitBase::table1() { return {50.0, 220e6, 66e3}; }

}  // namespace gfm
