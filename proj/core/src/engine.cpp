#include "gfmlab/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "gfmlab/control.hpp"
#include "gfmlab/pll.hpp"
#include "rk4.hpp"

namespace gfm {

namespace {

constexpr std::size_t kStateSize = kStateNames.size();
using StateVec = std::array<double, kStateSize>;

StateVec pack(const SimState& s) {
    return {s.plant.i.d,   s.plant.i.q,   s.plant.delta_g, s.v_meas.d,        s.v_meas.q,
            s.pll.theta,   s.pll.omega_int, s.inner.integ.d, s.inner.integ.q, s.pf.domega,
            s.pf.delta_i,  s.hybrid.p_integ, s.hybrid.df_lag, s.hybrid.df_meas, s.soc};
}

SimState unpack(const StateVec& x) {
    SimState s;
    s.plant.i = {x[0], x[1]};
    s.plant.delta_g = x[2];
    s.v_meas = {x[3], x[4]};
    s.pll = {x[5], x[6]};
    s.inner.integ = {x[7], x[8]};
    s.pf = {x[9], x[10]};
    s.hybrid = {x[11], x[12], x[13]};
    s.soc = x[14];
    return s;
}

/// Algebraic quantities available at one evaluation of the vector field.
struct Outputs {
    double f_grid = 0.0;
    double f_pll = 0.0;
    double p = 0.0;
    double q = 0.0;
    double p_ref_eff = 0.0;
    double delta_i = 0.0;
    DqPair v_pcc;
    bool sat_power = false;
    bool sat_current = false;
};

PowerLimits intersect(PowerLimits a, PowerLimits b) {
    PowerLimits out{std::max(a.p_min, b.p_min), std::min(a.p_max, b.p_max)};
    if (out.p_min > out.p_max) {
        // Disjoint windows: the storage side wins.
        const double v = std::clamp(0.5 * (a.p_min + a.p_max), b.p_min, b.p_max);
        out = {v, v};
    }
    return out;
}

class System {
public:
    explicit System(const Scenario& s) : s_(s) {}

    /// Held constant over one RK4 step.
    PowerLimits limits;

    void derivative(double t, const StateVec& x, StateVec& dx, Outputs* out = nullptr) const {
        const SimState st = unpack(x);
        const PerUnitBase& base = s_.base;

        const double f_grid = t < 0.0 ? base.f_base() : eval_profile(s_.profile, t).f;
        const double ramp = reference_ramp(t);
        double p_ref = ramp * s_.p_ref;
        if (s_.p_step && t >= s_.p_step->time) {
            p_ref += s_.p_step->delta;
        }
        const double q_ref = ramp * s_.q_ref;

        const DqPair v_seen = measure_pcc_quasi_static(st.plant, s_.circuit);
        const DqPair v_meas = filtered() ? st.v_meas : v_seen;
        // Through a voltage collapse (a pole slip can pass the PCC through
        // zero) the PLL coasts instead of ending the run.
        const PllOutput pll = v_meas.magnitude() >= kPllCollapseVoltage
                                  ? pll_derivative(st.pll, v_meas, s_.pll, base)
                                  : pll_coast(st.pll, base);
        const PowerPair meas = compute_power(v_meas, st.plant.i);

        double delta_i = 0.0;
        double v_mag_ref = s_.circuit.u0;
        double p_ref_eff = p_ref;
        bool sat_power = false;
        InnerOutput inner;
        HybridState d_hybrid{};
        GfmPfState d_pf{};

        if (s_.controller == ControllerKind::hybrid_fp_qv) {
            const FpSupport support = fp_support(base.frequency_deviation_pu(pll.f_pll), st.hybrid, s_.hybrid);
            const PowerLimitCommand cmd = saturate_power_ref(p_ref, support.dp, limits);
            PowerPiOutput pi = power_pi_step(cmd, meas.p, st.hybrid, s_.hybrid, false);
            delta_i = hybrid_angle(pll.theta, pi.delta_cmd);
            v_mag_ref = qv_voltage_ref(q_ref, meas.q, s_.hybrid);
            inner = inner_cascade(v_mag_ref, delta_i, v_meas, st.plant.i, st.inner, s_.inner);
            if (limiter_windup(inner.limiter_active, pi.error, pi.delta_cmd)) {
                pi = power_pi_step(cmd, meas.p, st.hybrid, s_.hybrid, true);
            }
            d_hybrid = {pi.d_p_integ, support.d_df_lag, support.d_df_meas};
            p_ref_eff = cmd.p_ref;
            sat_power = cmd.saturated;
        } else {
            delta_i = st.pf.delta_i;
            inner = inner_cascade(v_mag_ref, delta_i, v_meas, st.plant.i, st.inner, s_.inner);
            d_pf = gfm_pf_derivative(p_ref, meas.p, st.pf, s_.pf, base);
        }

        const PlantDerivative dplant = plant_derivative(st.plant, inner.e_c, s_.circuit, f_grid, base);
        const DqPair v_pcc = measure_pcc(st.plant, s_.circuit, dplant.di_dt, base);
        const PowerPair pcc = compute_power(v_pcc, st.plant.i);
        const DqPair dv_meas = filtered() ? (v_seen - st.v_meas) * (1.0 / s_.v_filter_tau) : DqPair{};

        dx = {dplant.di_dt.d,
              dplant.di_dt.q,
              dplant.ddelta_g,
              dv_meas.d,
              dv_meas.q,
              pll.derivative.theta,
              pll.derivative.omega_int,
              inner.d_integ.d,
              inner.d_integ.q,
              d_pf.domega,
              d_pf.delta_i,
              d_hybrid.p_integ,
              d_hybrid.df_lag,
              d_hybrid.df_meas,
              t < 0.0 ? 0.0 : -pcc.p / s_.ess.e_cap};

        if (out != nullptr) {
            *out = {f_grid, pll.f_pll, pcc.p, pcc.q, p_ref_eff, delta_i, v_pcc, sat_power, inner.limiter_active};
        }
    }

private:
    [[nodiscard]] bool filtered() const { return s_.v_filter_tau > 0.0; }

    // References ramp linearly from zero over the first half of the pre-roll
    // and hold for the second half.
    [[nodiscard]] double reference_ramp(double t) const {
        if (s_.pre_roll <= 0.0 || t >= 0.0) {
            return 1.0;
        }
        return std::clamp((t + s_.pre_roll) / (0.5 * s_.pre_roll), 0.0, 1.0);
    }

    const Scenario& s_;
};

SimState initial_state(const Scenario& s) {
    SimState st;
    st.v_meas = DqPair::polar(s.circuit.u0, 0.0);
    st.soc = s.initial_soc;
    return st;
}

TraceSample make_sample(double t, const StateVec& x, const Outputs& o) {
    TraceSample s;
    s.t = t;
    s.f_grid = o.f_grid;
    s.f_pll = o.f_pll;
    s.p = o.p;
    s.q = o.q;
    s.p_ref_eff = o.p_ref_eff;
    s.delta_i = wrap_angle(o.delta_i);
    s.delta_pcc = wrap_angle(o.v_pcc.angle());
    s.delta_g = wrap_angle(x[2]);
    s.i_d = x[0];
    s.i_q = x[1];
    s.i_mag = std::hypot(x[0], x[1]);
    s.v_pcc_mag = o.v_pcc.magnitude();
    s.soc = x[14];
    s.sat_power = o.sat_power;
    s.sat_current = o.sat_current;
    return s;
}

bool finite(const StateVec& x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

RunResult simulate(const Scenario& scenario) {
    scenario.validate();
    const Scenario& s = scenario;

    System sys(s);
    StateVec x = pack(initial_state(s));
    EssState ess{s.initial_soc};
    RungeKutta4<kStateSize> rk;

    const auto pre_steps = static_cast<long>(std::llround(s.pre_roll / s.dt));
    const auto run_steps = static_cast<long>(std::floor(s.t_end / s.dt + 1e-9));
    const auto decimation = static_cast<long>(s.output_decimation());

    RunResult result;
    result.trace.output_interval = static_cast<double>(decimation) * s.dt;
    result.trace.soc_high = s.ess.soc_high;
    result.trace.soc_low = s.ess.soc_low;
    result.trace.samples.reserve(static_cast<std::size_t>(run_steps / decimation + 1));

    auto update_limits = [&] {
        const PowerLimits rating{-s.ess.p_rating, s.ess.p_rating};
        ess.soc = x[14];
        PowerLimits lim = s.soc_policy ? ess_power_limits(ess, s.ess) : rating;
        if (s.power_limits) {
            lim = intersect(*s.power_limits, lim);
        }
        sys.limits = lim;
    };

    auto fail = [&](const SimulationDiverged& cause, double t) -> DivergedRun {
        return {SimulationDiverged(cause.reason(), t), std::move(result.trace)};
    };

    StateVec dx{};
    Outputs out;
    for (long n = -pre_steps; n <= run_steps; ++n) {
        const double t = static_cast<double>(n) * s.dt;
        try {
            if (!finite(x) || std::hypot(x[0], x[1]) >= kDivergenceCurrent) {
                throw SimulationDiverged("non-finite state or current above the 10 p.u. guard", t);
            }
            if (n == 0) {
                // The last pre-roll step's final stage sits at t = 0 and
                // already moves the SoC.
                x[14] = s.initial_soc;
            }
            update_limits();
            if (n >= 0) {
                sys.derivative(t, x, dx, &out);
                for (std::size_t k = 0; k < kStateSize; ++k) {
                    result.derivative_peak[k] = std::max(result.derivative_peak[k], std::abs(dx[k]));
                    if (n == 0) {
                        result.derivative_at_start[k] = std::abs(dx[k]);
                    }
                }
                if (n % decimation == 0) {
                    result.trace.samples.push_back(make_sample(t, x, out));
                }
            }
            if (n == run_steps) {
                break;
            }
            rk.step(x, t, s.dt, [&](double tt, const StateVec& xx, StateVec& dd) { sys.derivative(tt, xx, dd); });
            const double soc = std::clamp(x[14], 0.0, 1.0);
            if (soc != x[14] && !result.soc_clamp_time) {
                result.soc_clamp_time = t + s.dt;
            }
            x[14] = soc;
        } catch (const SimulationDiverged& e) {
            throw fail(e, t);
        }
    }
    result.final_state = unpack(x);
    return result;
}

std::optional<std::size_t> unsettled_state(const RunResult& r, double ratio) {
    for (std::size_t k = 0; k + 1 < kStateSize; ++k) {
        if (r.derivative_at_start[k] > 0.0 && !(r.derivative_at_start[k] < ratio * r.derivative_peak[k])) {
            return k;
        }
    }
    return std::nullopt;
}

std::vector<BatchItem> run_batch(const std::vector<Scenario>& scenarios, unsigned threads) {
    if (threads == 0) {
        if (const char* env = std::getenv("GFMLAB_THREADS")) {
            threads = static_cast<unsigned>(std::max(1L, std::strtol(env, nullptr, 10)));
        } else {
            threads = std::max(1U, std::thread::hardware_concurrency());
        }
    }
    std::vector<BatchItem> results(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < scenarios.size(); k = next++) {
            BatchItem& item = results[k];
            try {
                item.trace = run_scenario(scenarios[k]);
            } catch (const DivergedRun& e) {
                item.trace = e.partial_trace();
                item.diverged = true;
                item.error = e.what();
            } catch (const std::exception& e) {
                item.error = e.what();
            }
        }
    };
    const unsigned n_workers = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, scenarios.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }
    return results;
}

}  // namespace gfm
