#include "gfmlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "gfmlab/dq.hpp"
#include "gfmlab/scenario.hpp"
#include "gfmlab/units.hpp"

namespace gfm {

double g_delta_x(double x_l, double x_g) {
    if (!(x_l >= 0.0) || !(x_g >= 0.0) || !(x_l + x_g > 0.0)) {
        throw DegenerateInput("g_delta_x: need x_l >= 0, x_g >= 0 and x_l + x_g > 0");
    }
    return x_g / (x_g + x_l);
}

double predict_pcc_angle(double delta_i, double delta_g, double g) {
    return g * (delta_i - delta_g) + delta_g;
}

ClosedLoopParams closed_loop_params(const Scenario& s) {
    ClosedLoopParams p;
    p.pll = s.pll;
    p.kp_p = s.hybrid.kp_p;
    p.ki_p = s.hybrid.ki_p;
    p.h = s.hybrid.h;
    p.d = s.hybrid.d;
    p.tau_d = s.hybrid.tau_d;
    p.tau_f = s.hybrid.tau_f;
    p.include_support = s.hybrid.support_enabled;
    p.g = g_delta_x(s.inner.x_v, s.circuit.x_g);
    p.k_sync = s.circuit.u0 * s.circuit.u0 / (s.inner.x_v + s.circuit.x_g);
    p.omega_base = s.base.omega_base();
    return p;
}

namespace {

struct Blocks {
    Polynomial pll_num, pll_den;  // G_PLL
    Polynomial sup_num, sup_den;  // G_F = (h s / (tau_d s + 1) + d) / (tau_f s + 1)
};

Blocks blocks(const ClosedLoopParams& p) {
    Blocks b;
    if (p.ideal_pll) {
        b.pll_num = Polynomial{1.0};
        b.pll_den = Polynomial{1.0};
    } else {
        b.pll_num = Polynomial{p.pll.ki, p.pll.kp};
        b.pll_den = Polynomial{p.pll.ki, p.pll.kp, 1.0};
    }
    if (p.include_support) {
        b.sup_num = Polynomial{p.d, p.h + p.d * p.tau_d};
        b.sup_den = Polynomial{1.0, p.tau_d} * Polynomial{1.0, p.tau_f};
    } else {
        b.sup_num = Polynomial{0.0};
        b.sup_den = Polynomial{1.0};
    }
    return b;
}

}  // namespace

LinearModel build_closed_loop(GridRegime regime, const ClosedLoopParams& p) {
    if (!(p.k_sync > 0.0) || !(p.omega_base > 0.0)) {
        throw std::invalid_argument("build_closed_loop: k_sync and omega_base must be > 0");
    }
    if (!p.ideal_power_loop && (!(p.kp_p > 0.0) || !(p.ki_p > 0.0))) {
        throw std::invalid_argument("build_closed_loop: power PI gains must be > 0");
    }
    const double g = regime == GridRegime::weak_grid ? 1.0 : regime == GridRegime::strong_grid ? 0.0 : p.g;
    const Blocks b = blocks(p);
    const Polynomial s = Polynomial::s();
    const double k = p.k_sync;
    const double wb = p.omega_base;

    // Loop, with delta_g = 0:
    //   theta   = G_PLL * g * delta_i
    //   delta_i = theta + dd
    //   P       = k * delta_i
    //   P*      = P_ref - G_F * s * theta / wb
    //   dd      = G_P * (P* - P)          (or P = P* for an ideal power loop)
    // With G_PLL = Np/Dp, G_F = Nf/Df, G_P = Ng/s, and
    //   delta_i = dd * Dp / (Dp - g Np),  theta = dd * g Np / (Dp - g Np).
    const Polynomial coupling = b.pll_den - g * b.pll_num;  // Dp - g Np
    Polynomial num;
    Polynomial den;
    if (p.ideal_power_loop) {
        num = (k * wb) * b.sup_den * b.pll_den;
        den = (k * wb) * b.sup_den * b.pll_den + g * (s * b.sup_num * b.pll_num);
    } else {
        const Polynomial pi = Polynomial{p.ki_p, p.kp_p};
        num = (k * wb) * b.pll_den * pi * b.sup_den;
        den = wb * (s * coupling * b.sup_den) + (k * wb) * (pi * b.pll_den * b.sup_den) +
              g * (s * pi * b.sup_num * b.pll_num);
    }
    return {num.pruned(), den.pruned()};
}

LinearModel pf_closed_loop(const ClosedLoopParams& p) {
    const Blocks b = blocks(p);
    const Polynomial s = Polynomial::s();
    const double kw = p.k_sync * p.omega_base;
    return {(kw * b.sup_den).pruned(), (s * b.sup_num + kw * b.sup_den).pruned()};
}

MetricsReport analyze_trace(const Trace& trace, double window) {
    const auto& xs = trace.samples;
    if (xs.empty() || !(window >= 0.0) || window > trace.duration() + 1e-9) {
        throw WindowTooLong("analyze_trace: window of " + std::to_string(window) + " s exceeds the trace duration of " +
                            std::to_string(trace.duration()) + " s");
    }
    MetricsReport r;
    const double t_start = xs.back().t - window - 1e-9;
    std::size_t first = 0;
    while (first + 1 < xs.size() && xs[first].t < t_start) {
        ++first;
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    double max_fdiff = 0.0;
    for (std::size_t k = first; k < xs.size(); ++k) {
        lo = std::min(lo, xs[k].p);
        hi = std::max(hi, xs[k].p);
        sum += xs[k].p;
        max_fdiff = std::max(max_fdiff, std::abs(xs[k].f_pll - xs[k].f_grid));
    }
    r.steady_state_mean = sum / static_cast<double>(xs.size() - first);
    r.peak_to_peak = hi - lo;
    r.oscillation_detected = r.peak_to_peak > kOscillationThreshold;

    // Relative angle delta_i - delta_g, unwrapped along the whole trace.
    double rel = wrap_angle(xs[0].delta_i - xs[0].delta_g);
    double rel_at_window = rel;
    for (std::size_t k = 1; k < xs.size(); ++k) {
        const double prev = xs[k - 1].delta_i - xs[k - 1].delta_g;
        const double cur = xs[k].delta_i - xs[k].delta_g;
        rel += wrap_angle(cur - prev);
        if (k == first) {
            rel_at_window = rel;
        }
    }
    r.pole_slip_count = static_cast<long>(std::floor(std::abs(rel - rel_at_window) / kTwoPi));
    r.sync_held = r.pole_slip_count == 0 && max_fdiff < kSyncFrequencyTolerance;

    for (const auto& s : xs) {
        r.max_power = std::max(r.max_power, std::abs(s.p));
        if (s.soc > trace.soc_high + kSocViolationMargin || s.soc < trace.soc_low - kSocViolationMargin) {
            r.soc_violated = true;
        }
    }
    r.soc_final = xs.back().soc;
    return r;
}

std::string format_report(const MetricsReport& r) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](const char* name, double v) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        out << name << '=' << buf << '\n';
    };
    auto flag = [&](const char* name, bool v) { out << name << '=' << (v ? "true" : "false") << '\n'; };
    num("steady_state_mean", r.steady_state_mean);
    num("peak_to_peak", r.peak_to_peak);
    flag("oscillation_detected", r.oscillation_detected);
    out << "pole_slip_count=" << r.pole_slip_count << '\n';
    num("max_power", r.max_power);
    num("soc_final", r.soc_final);
    flag("soc_violated", r.soc_violated);
    flag("sync_held", r.sync_held);
    return out.str();
}

}  // namespace gfm
