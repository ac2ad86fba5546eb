#include "doctest.h"
#include "oracles.hpp"

#include "strgeo/errors.hpp"
#include "strgeo/weierstrass.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace strgeo;
using cplx = std::complex<double>;

TEST_CASE("cubic_roots: degenerate geodesic cubic H=1 U=0")
{
    // q = 4 w^3 - (4/3) w - 8/27 = 4 (w + 1/3)^2 (w - 2/3); expand to confirm
    const auto expanded = oracles::poly_mul(oracles::poly_mul({1.0 / 3.0, 1.0}, {1.0 / 3.0, 1.0}), {-2.0 / 3.0, 1.0});
    CHECK(4.0 * expanded[0] == doctest::Approx(-8.0 / 27.0).epsilon(1e-15));
    CHECK(4.0 * expanded[1] == doctest::Approx(-4.0 / 3.0).epsilon(1e-15));
    CHECK(4.0 * expanded[2] == doctest::Approx(0.0).epsilon(1e-15));

    const CubicRootSet rs = cubic_roots({4.0 / 3.0, 8.0 / 27.0});
    CHECK(rs.n_real == 3);
    CHECK(rs.multiple_root);
    CHECK(rs.discriminant == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rs.e[0].real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-7));
    CHECK(rs.e[1].real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-7));
    CHECK(rs.e[2].real() == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("cubic_roots: constructed root")
{
    // q(w0) = 0 forces g3 = 4 w0^3 - g2 w0
    for (double w0 : {0.7, -0.9, 0.05, 2.5}) {
        const WeierstrassInvariants inv{4.0 / 3.0, 4.0 * w0 * w0 * w0 - 4.0 / 3.0 * w0};
        const CubicRootSet rs = cubic_roots(inv);
        double best = 1e300;
        for (const cplx& e : rs.e)
            best = std::min(best, std::abs(e - w0));
        CHECK(best <= 1e-10 * (1.0 + std::abs(w0)));
    }
}

TEST_CASE("cubic_roots: H=1 U=0.1 discriminant and ordering")
{
    // 64 * 0.01 * (8 - 0.27) = 4.9472 from the discriminant formula
    const WeierstrassInvariants inv{4.0 / 3.0, 8.0 / 27.0 - 0.02};
    const CubicRootSet rs = cubic_roots(inv);
    CHECK(rs.discriminant == doctest::Approx(4.9472).epsilon(1e-12));
    CHECK(rs.n_real == 3);
    CHECK(!rs.multiple_root);
    CHECK(rs.e[0].real() < rs.e[1].real());
    CHECK(rs.e[1].real() < rs.e[2].real());
    // residuals and trace
    cplx sum = 0.0;
    for (const cplx& e : rs.e) {
        const double scale = 1.0 + std::pow(std::abs(e), 3.0);
        CHECK(std::abs(weierstrass_q(inv, e)) <= 1e-10 * scale);
        sum += e;
    }
    CHECK(std::abs(sum) <= 1e-13);
}

TEST_CASE("cubic_roots: discriminant sign matches root structure")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> g(-3.0, 3.0);
    for (int i = 0; i < 300; ++i) {
        const WeierstrassInvariants inv{g(rng), g(rng)};
        if (std::abs(inv.discriminant()) < 1e-3)
            continue;
        const CubicRootSet rs = cubic_roots(inv);
        if (inv.discriminant() > 0.0)
            CHECK(rs.n_real == 3);
        else
            CHECK(rs.n_real == 1);
    }
}

TEST_CASE("weierstrass_p: parity and leading Laurent term")
{
    const WeierstrassInvariants inv{4.0 / 3.0, 8.0 / 27.0 - 0.02};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int i = 0; i < 50; ++i) {
        const cplx z(u(rng), u(rng));
        if (std::abs(z) < 0.05)
            continue;
        const WeierstrassValue a = weierstrass_p_raw(z, inv);
        const WeierstrassValue b = weierstrass_p_raw(-z, inv);
        CHECK(std::abs(a.p - b.p) <= 1e-10 * (1.0 + std::abs(a.p)));
        CHECK(std::abs(a.dp + b.dp) <= 1e-10 * (1.0 + std::abs(a.dp)));
    }
    for (double t : {1e-3, 1e-4, 1e-5}) {
        const cplx z(t, 0.5 * t);
        CHECK(std::abs(z * z * weierstrass_p_raw(z, inv).p - 1.0) <= 1e-5);
    }
}

TEST_CASE("weierstrass_p: differential equation residual at random cell points")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> g(-2.0, 2.0), u(0.0, 1.0);
    int tested = 0;
    while (tested < 1000) {
        const WeierstrassInvariants inv{g(rng), g(rng)};
        if (std::abs(inv.discriminant()) < 1e-2)
            continue;
        const PeriodLattice lat = half_periods(inv);
        WeierstrassP wp(inv);
        for (int k = 0; k < 25 && tested < 1000; ++k) {
            const cplx z = u(rng) * lat.gen1() + u(rng) * lat.gen3();
            if (std::abs(wp.reduce(z)) < 0.05 * std::min(std::abs(lat.gen1()), std::abs(lat.gen3())))
                continue;
            const WeierstrassValue v = wp(z);
            const cplx lhs = v.dp * v.dp;
            const cplx rhs = (4.0 * v.p * v.p - inv.g2) * v.p - inv.g3;
            CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::pow(std::abs(v.p), 3.0)));
            ++tested;
        }
    }
}

TEST_CASE("half_periods: rectangular lattice and half-period value for disc > 0")
{
    const WeierstrassInvariants inv{4.0 / 3.0, 8.0 / 27.0 - 0.02}; // H=1, U=0.1
    const PeriodLattice lat = half_periods(inv);
    CHECK(std::abs(lat.omega1.imag()) <= 1e-10);
    CHECK(std::abs(lat.omega3.real()) <= 1e-10);
    CHECK((lat.omega3 / lat.omega1).imag() > 0.0);

    const CubicRootSet rs = cubic_roots(inv);
    // direct numerical period integral as oracle
    const double om1_quad = oracles::half_period_integral(inv, rs.e[2].real());
    CHECK(lat.omega1.real() == doctest::Approx(om1_quad).epsilon(1e-9));

    // p at the real half-period equals the largest real root; second route via
    // the defining ODE from the turning point
    WeierstrassP wp(inv);
    CHECK(wp(lat.omega1).p.real() == doctest::Approx(rs.e[2].real()).epsilon(1e-9));
    const auto trace = oracles::p_by_ode(inv, rs.e[2].real(), om1_quad, 0.35, 2e-5);
    double worst = 0.0;
    for (std::size_t i = 0; i < trace.z.size(); i += 997)
        worst = std::max(worst, std::abs(wp(cplx(trace.z[i], 0.0)).p.real() - trace.w[i]));
    CHECK(worst <= 1e-7);
}

TEST_CASE("half_periods: rhombic case disc < 0")
{
    const WeierstrassInvariants inv{4.0 / 3.0, 8.0 / 27.0 - 2.0}; // H=1, U=1
    const PeriodLattice lat = half_periods(inv);
    CHECK(lat.omega1.imag() == 0.0);
    CHECK((lat.omega3 / lat.omega1).imag() > 0.0);
    const CubicRootSet rs = cubic_roots(inv);
    CHECK(rs.n_real == 1);
    const double om1_quad = oracles::half_period_integral(inv, rs.e[0].real());
    CHECK(lat.omega1.real() == doctest::Approx(om1_quad).epsilon(1e-9));
    WeierstrassP wp(inv);
    CHECK(wp(lat.omega1).p.real() == doctest::Approx(rs.e[0].real()).epsilon(1e-9));
}

TEST_CASE("half_periods: periodicity of p under both generators")
{
    for (double g3 : {8.0 / 27.0 - 0.02, 8.0 / 27.0 - 2.0, -0.7}) {
        const WeierstrassInvariants inv{4.0 / 3.0, g3};
        WeierstrassP wp(inv);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.1, 0.9);
        for (int i = 0; i < 20; ++i) {
            const cplx z = u(rng) * wp.lattice().gen1() + u(rng) * wp.lattice().gen3();
            const WeierstrassValue a = weierstrass_p_raw(z, inv);
            const WeierstrassValue b = weierstrass_p_raw(z + wp.lattice().gen1(), inv);
            const WeierstrassValue c = weierstrass_p_raw(z + wp.lattice().gen3(), inv);
            const double scale = 1.0 + std::abs(a.p);
            CHECK(std::abs(a.p - b.p) <= 1e-9 * scale);
            CHECK(std::abs(a.p - c.p) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("half_periods: invariants recovered from the lattice alone (swap test)")
{
    // lattice -> (g2, g3) by Eisenstein q-series, a route that never touches
    // the series/duplication evaluator
    for (double g3 : {8.0 / 27.0 - 0.5, 8.0 / 27.0 - 0.02, 8.0 / 27.0 - 2.0}) {
        const WeierstrassInvariants inv{4.0 / 3.0, g3};
        const PeriodLattice lat = half_periods(inv);
        const auto [g2_rec, g3_rec] = oracles::invariants_from_lattice(lat);
        CHECK(g2_rec == doctest::Approx(inv.g2).epsilon(1e-8));
        CHECK(g3_rec == doctest::Approx(inv.g3).epsilon(1e-8));
    }
}

TEST_CASE("half_periods: degenerate discriminant rejected")
{
    CHECK_THROWS_AS(half_periods({4.0 / 3.0, 8.0 / 27.0}), degenerate_error);
}

TEST_CASE("weierstrass_p: pole guard")
{
    const WeierstrassInvariants inv{4.0 / 3.0, 8.0 / 27.0 - 0.02};
    WeierstrassP wp(inv);
    CHECK_THROWS_AS(wp(cplx(0.0, 0.0)), pole_error);
    CHECK_THROWS_AS(wp(wp.lattice().gen1() * 3.0), pole_error);
}
