#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "gfmlab/analysis.hpp"
#include "gfmlab/errors.hpp"
#include "gfmlab/plant.hpp"
#include "test_support.hpp"

using namespace gfm;
using Catch::Approx;
using gfm::test::cx;

namespace {

CircuitParams lossless() {
    CircuitParams c = CircuitParams::table1();
    c.r_f = c.r_l = c.r_g = 0.0;
    return c;
}

// Equilibrium current of the series branch for a fixed EMF, solved directly
// from (e - u) = (R + jX) i.
DqPair equilibrium_current(DqPair e, DqPair u, const CircuitParams& c) {
    const std::complex<double> z(c.r_total(), c.l_total());
    return DqPair::from_complex((cx(e) - cx(u)) / z);
}

}  // namespace

TEST_CASE("balanced sources with zero current are a fixed point", "[plant]") {
    const auto base = PerUnitBase::table1();
    const auto c = CircuitParams::table1();
    PlantState st;
    const auto d = plant_derivative(st, grid_voltage(st, c), c, 50.0, base);
    CHECK(d.di_dt.d == 0.0);
    CHECK(d.di_dt.q == 0.0);
    CHECK(d.ddelta_g == 0.0);
}

TEST_CASE("lossless equilibrium power at the grid source", "[plant]") {
    const auto base = PerUnitBase::table1();
    const auto c = lossless();
    REQUIRE(c.l_total() == Approx(1.0033).margin(1e-4));

    const DqPair e = DqPair::polar(1.0, 0.1);
    PlantState st;
    st.i = equilibrium_current(e, grid_voltage(st, c), c);

    const auto d = plant_derivative(st, e, c, 50.0, base);
    CHECK(std::abs(d.di_dt.d) < 1e-9);
    CHECK(std::abs(d.di_dt.q) < 1e-9);

    const double p_grid = compute_power(grid_voltage(st, c), st.i).p;
    CHECK(p_grid == Approx(std::sin(0.1) / c.l_total()).epsilon(1e-12));
    CHECK(p_grid == Approx(0.0995).margin(1e-4));
}

TEST_CASE("grid source angle slips with off-nominal frequency", "[plant]") {
    const auto base = PerUnitBase::table1();
    const auto c = CircuitParams::table1();
    PlantState st;
    CHECK(plant_derivative(st, {1.0, 0.0}, c, 49.0, base).ddelta_g == Approx(-kTwoPi));
}

TEST_CASE("plant derivative matches the complex branch equation", "[plant]") {
    const auto base = PerUnitBase::table1();
    const auto c = CircuitParams::table1();
    PlantState st{{0.3, -0.2}, 0.4};
    const DqPair e{1.05, 0.2};
    const auto d = plant_derivative(st, e, c, 50.0, base);
    const std::complex<double> j(0.0, 1.0);
    const auto u = std::polar(c.u0, 0.4);
    const auto expect = (cx(e) - u - (c.r_total() + j * c.l_total()) * cx(st.i)) * (base.omega_base() / c.l_total());
    CHECK(d.di_dt.d == Approx(expect.real()));
    CHECK(d.di_dt.q == Approx(expect.imag()));
}

TEST_CASE("divergence guard fires at 10 p.u.", "[plant]") {
    const auto base = PerUnitBase::table1();
    const auto c = CircuitParams::table1();
    PlantState st{{10.0, 0.0}, 0.0};
    CHECK_THROWS_AS(plant_derivative(st, {1.0, 0.0}, c, 50.0, base), SimulationDiverged);
    st.i = {9.99, 0.0};
    CHECK_NOTHROW(plant_derivative(st, {1.0, 0.0}, c, 50.0, base));
}

TEST_CASE("measure_pcc with zero current returns the grid voltage", "[plant]") {
    const auto base = PerUnitBase::table1();
    const auto c = CircuitParams::table1();
    PlantState st{{0.0, 0.0}, 0.3};
    const auto v = measure_pcc(st, c, {0.5, -0.5}, base);
    const auto u = grid_voltage(st, c);
    // The di/dt drop is the only contribution left.
    CHECK(v.d == Approx(u.d + 0.5 * c.x_g / base.omega_base()));
    const auto v0 = measure_pcc(st, c, {0.0, 0.0}, base);
    CHECK(v0 == u);
}

TEST_CASE("measure_pcc on an infinitely strong grid", "[plant]") {
    const auto base = PerUnitBase::table1();
    auto c = CircuitParams::table1();
    c.r_g = 0.0;
    c.x_g = 0.0;
    PlantState st{{0.7, -0.4}, 0.2};
    const auto v = measure_pcc(st, c, {3.0, 1.0}, base);
    CHECK(v == grid_voltage(st, c));
    CHECK(measure_pcc_quasi_static(st, c) == grid_voltage(st, c));
}

TEST_CASE("PCC angle of the 0.1 rad equilibrium follows the angle divider", "[plant][analysis]") {
    const auto base = PerUnitBase::table1();
    const auto c = lossless();
    const DqPair e = DqPair::polar(1.0, 0.1);
    PlantState st;
    st.i = equilibrium_current(e, grid_voltage(st, c), c);
    const auto v = measure_pcc(st, c, {0.0, 0.0}, base);
    const double g = g_delta_x(c.x_converter(), c.x_g);
    const double predicted = predict_pcc_angle(0.1, 0.0, g);
    CHECK(std::abs(v.angle() - predicted) <= 0.02 * std::abs(predicted));
}

TEST_CASE("compute_power oracles", "[plant]") {
    auto a = compute_power({1.0, 0.0}, {0.5, 0.0});
    CHECK(a.p == 0.5);
    CHECK(a.q == 0.0);

    auto b = compute_power({1.0, 0.0}, {0.0, 0.5});
    CHECK(b.p == 0.0);
    CHECK(b.q == -0.5);

    auto c = compute_power({0.98, 0.02}, {0.7, -0.1});
    CHECK(c.p == Approx(0.684).margin(1e-12));
    CHECK(c.q == Approx(0.112).margin(1e-12));
}

TEST_CASE("lossless branch delivers the EMF power to the grid", "[plant]") {
    const auto c = lossless();
    for (double angle : {-0.4, 0.05, 0.3, 0.9}) {
        const DqPair e = DqPair::polar(1.02, angle);
        PlantState st;
        st.i = equilibrium_current(e, grid_voltage(st, c), c);
        CHECK(std::abs(compute_power(e, st.i).p - compute_power(grid_voltage(st, c), st.i).p) < 1e-9);
    }
}

TEST_CASE("soc_step oracles", "[plant][ess]") {
    const EssParams ess;
    EssState s{0.5};
    for (int k = 0; k < 20000; ++k) s = soc_step(s, 0.5, 1e-4, ess).state;
    CHECK(s.soc == Approx(0.3).margin(1e-9));

    EssState h{0.9};
    for (int k = 0; k < 10000; ++k) h = soc_step(h, -0.1, 1e-4, ess).state;
    CHECK(h.soc == Approx(0.92).margin(1e-9));

    const EssState z{0.37};
    CHECK(soc_step(z, 0.0, 1.0, ess).state.soc == 0.37);
}

TEST_CASE("soc_step clamps at the physical bounds", "[plant][ess]") {
    const EssParams ess;
    const auto r = soc_step(EssState{0.999}, -1.0, 1.0, ess);
    CHECK(r.clamped);
    CHECK(r.state.soc == 1.0);
    const auto l = soc_step(EssState{0.001}, 1.0, 1.0, ess);
    CHECK(l.clamped);
    CHECK(l.state.soc == 0.0);
}

TEST_CASE("ess_power_limits windows and hysteresis", "[plant][ess]") {
    const EssParams ess;
    EssState mid{0.5};
    auto a = ess_power_limits(mid, ess);
    CHECK(a.p_min == -1.0);
    CHECK(a.p_max == 1.0);

    EssState high{0.9};
    auto b = ess_power_limits(high, ess);
    CHECK(b.p_min == 0.0);
    CHECK(b.p_max == 1.0);

    high.soc = 0.885;
    auto c = ess_power_limits(high, ess);
    CHECK(c.p_min == 0.0);
    CHECK(c.p_max == 1.0);

    high.soc = 0.879;
    auto d = ess_power_limits(high, ess);
    CHECK(d.p_min == -1.0);
    CHECK(d.p_max == 1.0);

    EssState low{0.1};
    auto e = ess_power_limits(low, ess);
    CHECK(e.p_min == -1.0);
    CHECK(e.p_max == 0.0);
}

TEST_CASE("circuit and storage parameter validation", "[plant]") {
    auto c = CircuitParams::table1();
    CHECK_NOTHROW(c.validate());
    CHECK(c.x_g == Approx(1.0 / 1.2));
    c.x_l = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidScenario);

    EssParams e;
    CHECK_NOTHROW(e.validate());
    e.soc_low = 0.95;
    CHECK_THROWS_AS(e.validate(), InvalidScenario);
}
