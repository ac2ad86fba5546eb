#include "doctest.h"
#include "oracles.hpp"

#include "strgeo/atlas.hpp"
#include "strgeo/errors.hpp"

#include <cmath>
#include <random>

using namespace strgeo;
using cplx = std::complex<double>;

namespace {

StateR random_ef_state(std::mt19937_64& rng, double r_lo, double r_hi, bool log_r = true)
{
    std::uniform_real_distribution<double> u(0.0, 1.0), mom(-2.0, 2.0), upos(-3.0, 3.0);
    double r = log_r ? std::exp(std::log(r_lo) + u(rng) * (std::log(r_hi) - std::log(r_lo)))
                     : r_lo + u(rng) * (r_hi - r_lo);
    StateR st{Chart::ef_adv, {upos(rng), 1.0 / r - 1.0 / 3.0}, {mom(rng), mom(rng)}};
    st.sheet = u(rng) < 0.5 ? 1 : -1;
    return st;
}

} // namespace

TEST_CASE("metric Q factorization and the s-form identity")
{
    // Q = (1/2)(w - 2/3)(w + 1/3)^2; expand and compare with w^3/2 - w/6 - 1/27
    const auto prod = oracles::poly_mul(oracles::poly_mul({1.0 / 3.0, 1.0}, {1.0 / 3.0, 1.0}), {-2.0 / 3.0, 1.0});
    CHECK(prod[0] / 2.0 == doctest::Approx(-1.0 / 27.0).epsilon(1e-15));
    CHECK(prod[1] / 2.0 == doctest::Approx(-1.0 / 6.0).epsilon(1e-15));
    CHECK(prod[2] / 2.0 == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(prod[3] / 2.0 == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(metric_q(2.0 / 3.0) == 0.0);
    CHECK(metric_q(-1.0 / 3.0) == 0.0);
    CHECK(metric_q_prime(1.0 / 3.0) == 0.0);
    CHECK(metric_q_prime(-1.0 / 3.0) == 0.0);

    // -2 Q(s - 1/3) = s^2 (1 - s)
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> sd(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double s = sd(rng);
        CHECK(-2.0 * metric_q(s - 1.0 / 3.0) ==
              doctest::Approx(s * s * (1.0 - s)).epsilon(1e-12));
    }
}

TEST_CASE("to_chart: schw -> ef_adv at (t=0, r=2)")
{
    StateR st{Chart::schw, {0.0, 2.0}, {0.3, -0.6}};
    const StateR ef = to_chart(st, Chart::ef_adv);
    CHECK(ef.pos[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ef.pos[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(hamiltonian(ef) == doctest::Approx(hamiltonian(st)).epsilon(1e-13));
}

TEST_CASE("hamiltonian special values in ef_adv")
{
    // radial null direction
    StateR st{Chart::ef_adv, {0.4, 0.9}, {1.7, 0.0}};
    CHECK(hamiltonian(st) == 0.0);
    // on the horizon Q vanishes, H = Omega U
    StateR h{Chart::ef_adv, {0.0, 2.0 / 3.0}, {0.7, 1.3}};
    CHECK(hamiltonian(h) == doctest::Approx(0.7 * 1.3).epsilon(1e-14));
}

TEST_CASE("ks matches ef_adv through the transition map at r = 2")
{
    StateR ef{Chart::ef_adv, {1.0, 1.0 / 6.0}, {0.8, -0.5}};
    const StateR ks = to_chart(ef, Chart::ks);
    CHECK(state_r(ks) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(hamiltonian(ks) == doctest::Approx(hamiltonian(ef)).epsilon(1e-12));
    const StateR back = to_chart(ks, Chart::ef_adv);
    CHECK(back.pos[0] == doctest::Approx(ef.pos[0]).epsilon(1e-12));
    CHECK(back.pos[1] == doctest::Approx(ef.pos[1]).epsilon(1e-12));
    CHECK(back.mom[0] == doctest::Approx(ef.mom[0]).epsilon(1e-12));
    CHECK(back.mom[1] == doctest::Approx(ef.mom[1]).epsilon(1e-12));
}

TEST_CASE("round trips ef_adv -> ks -> ef_adv at 50 random exterior points")
{
    std::mt19937_64 rng(23);
    for (int i = 0; i < 50; ++i) {
        const StateR st = random_ef_state(rng, 1.05, 40.0);
        const StateR back = to_chart(to_chart(st, Chart::ks), Chart::ef_adv);
        const double scale = 1.0 + std::abs(st.pos[0]) + std::abs(st.mom[0]) + std::abs(st.mom[1]);
        CHECK(std::abs(back.pos[0] - st.pos[0]) <= 1e-10 * scale);
        CHECK(std::abs(back.pos[1] - st.pos[1]) <= 1e-10 * scale);
        CHECK(std::abs(back.mom[0] - st.mom[0]) <= 1e-10 * scale);
        CHECK(std::abs(back.mom[1] - st.mom[1]) <= 1e-10 * scale);
    }
}

TEST_CASE("hamiltonian invariance across every reachable chart pair")
{
    std::mt19937_64 rng(29);
    int pairs = 0;
    for (int i = 0; i < 100; ++i) {
        StateR st;
        const int cls = i % 4;
        if (cls == 0)
            st = random_ef_state(rng, 1.3, 30.0);
        else if (cls == 1)
            st = random_ef_state(rng, 0.8, 1.2, false);
        else if (cls == 2)
            st = random_ef_state(rng, 0.05, 0.75, false);
        else {
            st = random_ef_state(rng, 0.05, 30.0);
            st.pos[1] = -2.0 / 3.0 - (st.pos[1] + 1.0 / 3.0); // reflect to the anti side
        }
        const double h0 = hamiltonian(st);
        for (int c = 0; c < kChartCount; ++c) {
            StateR t;
            try {
                t = to_chart(st, static_cast<Chart>(c));
            } catch (const overlap_error&) {
                continue;
            }
            CHECK(std::abs(hamiltonian(t) - h0) <= 1e-10 * (1.0 + std::abs(h0)));
            ++pairs;
        }
    }
    CHECK(pairs > 600);
}

TEST_CASE("closed-form Hamiltonians equal the inverse-metric form")
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 60; ++i) {
        const StateR st = (i % 3 == 0) ? random_ef_state(rng, 0.1, 0.9, false) : random_ef_state(rng, 1.2, 20.0);
        for (int c = 0; c < kChartCount; ++c) {
            StateR t;
            try {
                t = to_chart(st, static_cast<Chart>(c));
            } catch (const overlap_error&) {
                continue;
            }
            double hm;
            try {
                hm = hamiltonian_metric_form(t);
            } catch (const validity_error&) {
                continue; // metric-degenerate locus
            }
            CHECK(std::abs(hamiltonian(t) - hm) <= 1e-12 * (1.0 + std::abs(hm)));
        }
    }
}

TEST_CASE("flow fields are the Hamiltonian vector fields (finite differences)")
{
    std::mt19937_64 rng(37);
    for (int i = 0; i < 40; ++i) {
        const StateR st = (i % 2) ? random_ef_state(rng, 0.15, 0.9, false) : random_ef_state(rng, 1.2, 10.0);
        for (int c = 0; c < kChartCount; ++c) {
            const Chart target = static_cast<Chart>(c);
            // the finite-difference oracle itself is noisy where the metric
            // coefficients of the t charts blow up
            if ((target == Chart::schw || target == Chart::xt) && std::abs(state_r(st) - 1.0) < 0.15)
                continue;
            StateR t;
            try {
                t = to_chart(st, target);
            } catch (const overlap_error&) {
                continue;
            }
            const auto f = flow_rhs(t);
            const auto fn = oracles::numeric_flow(t);
            for (int k = 0; k < 4; ++k)
                CHECK(std::abs(f[k] - fn[k]) <= 2e-5 * (1.0 + std::abs(f[k])));
        }
    }
}

TEST_CASE("momentum overlap relations among the KS-family charts")
{
    std::mt19937_64 rng(41);
    for (int i = 0; i < 50; ++i) {
        const StateR st = random_ef_state(rng, (i % 2) ? 1.3 : 0.1, (i % 2) ? 20.0 : 0.9, false);
        StateR xp, xq, ks, yp;
        try {
            xp = to_chart(st, Chart::xp);
            xq = to_chart(st, Chart::xq);
            ks = to_chart(st, Chart::ks);
            yp = to_chart(st, Chart::yp);
        } catch (const overlap_error&) {
            continue;
        }
        const double p = xp.pos[0], x = xp.pos[1], R = xp.mom[0], X = xp.mom[1];
        const double q = xq.pos[0], S = xq.mom[0], Y = xq.mom[1];
        const double x3 = x * x * x, x2m = x * x - 1.0;
        const double ms = 1.0 + std::abs(R) + std::abs(S) + std::abs(X) + std::abs(Y);
        CHECK(std::abs(R + q * S / p) <= 1e-10 * ms);
        CHECK(std::abs(S + p * R / q) <= 1e-10 * ms);
        if (std::abs(x2m) > 1e-4) {
            CHECK(std::abs(X - (Y + 2.0 * x3 * q * S / x2m)) <= 1e-9 * ms);
            CHECK(std::abs(Y - (X + 2.0 * x3 * p * R / x2m)) <= 1e-9 * ms);
            CHECK(std::abs(ks.mom[0] - (R + X * x2m / (2.0 * x3 * p))) <= 1e-9 * ms);
            CHECK(std::abs(ks.mom[0] - (Y * x2m / (2.0 * x3 * p))) <= 1e-9 * ms);
            CHECK(std::abs(ks.mom[1] - (S + Y * x2m / (2.0 * x3 * q))) <= 1e-9 * ms);
            CHECK(std::abs(ks.mom[1] - (X * x2m / (2.0 * x3 * q))) <= 1e-9 * ms);
        }
        // yp round trip with Hamiltonian agreement
        const StateR back = to_chart(yp, Chart::xp);
        CHECK(std::abs(back.mom[1] - X) <= 1e-10 * ms);
        CHECK(std::abs(hamiltonian(yp) - hamiltonian(xp)) <= 1e-10 * (1.0 + std::abs(hamiltonian(xp))));
    }
}

TEST_CASE("surface residual at the distinguished smooth points and constructed membership")
{
    CHECK(surface_residual(0.0, 0.0, 1.0) == 0.0);
    CHECK(surface_residual(0.0, 0.0, -1.0) == 0.0);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 30; ++i) {
        const cplx x(u(rng), u(rng)), p(u(rng) + 2.0, u(rng));
        const cplx q = (x * x - 1.0) * std::exp(x * x - 1.0) / p;
        CHECK(std::abs(surface_residual(p, q, x)) <= 1e-13 * (1.0 + std::abs(p * q)));
    }
}

TEST_CASE("the KS flow direction is tangent to the complex surface")
{
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-1.2, 1.2), m(-2.0, 2.0);
    for (int i = 0; i < 30; ++i) {
        StateC ks;
        ks.chart = Chart::ks;
        const cplx x(u(rng), u(rng));
        const cplx p(u(rng) + 1.8, u(rng));
        if (std::abs(x) < 0.1 || std::abs(x * x - 1.0) < 1e-3)
            continue;
        ks.pos = {p, (x * x - 1.0) * std::exp(x * x - 1.0) / p};
        ks.mom = {cplx(m(rng), m(rng)), cplx(m(rng), m(rng))};
        ks.aux_x = x;
        const auto f = flow_rhs(ks);
        // dx/ds through the xp chart at the same point
        const StateC xp = to_chart(ks, Chart::xp);
        const auto fxp = flow_rhs(xp);
        const cplx res = surface_tangency_residual(ks.pos[0], ks.pos[1], x, f[0], f[1], fxp[1]);
        const double scale = 1.0 + std::abs(f[0]) + std::abs(f[1]) + std::abs(fxp[1]);
        CHECK(std::abs(res) <= 1e-10 * scale);
    }
}

TEST_CASE("complex mode: Hamiltonian agreement across the KS-family charts")
{
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(-1.0, 1.0), m(-2.0, 2.0);
    for (int i = 0; i < 30; ++i) {
        StateC xp;
        xp.chart = Chart::xp;
        xp.pos = {cplx(u(rng) + 1.7, u(rng)), cplx(u(rng) + 1.6, u(rng))};
        xp.mom = {cplx(m(rng), m(rng)), cplx(m(rng), m(rng))};
        const cplx h0 = hamiltonian(xp);
        for (Chart c : {Chart::ks, Chart::xq, Chart::yp, Chart::yq, Chart::xu, Chart::xt}) {
            StateC t;
            try {
                t = to_chart(xp, c);
            } catch (const overlap_error&) {
                continue;
            }
            CHECK(std::abs(hamiltonian(t) - h0) <= 1e-10 * (1.0 + std::abs(h0)));
        }
        // produced complex KS states satisfy the surface equation
        const StateC ks = to_chart(xp, Chart::ks);
        REQUIRE(ks.aux_x.has_value());
        CHECK(std::abs(surface_residual(ks.pos[0], ks.pos[1], *ks.aux_x)) <=
              1e-10 * (1.0 + std::abs(ks.pos[0] * ks.pos[1])));
    }
}

TEST_CASE("classify_region examples")
{
    StateR ks{Chart::ks, {1.0, 1.0}, {0.1, 0.1}};
    CHECK(classify_region(ks).quadrant == RegionLabel::Quadrant::I);

    StateR anti{Chart::ef_adv, {0.0, -0.5}, {0.1, 0.1}};
    CHECK(classify_region(anti).side == RegionLabel::Side::anti_schwarzschild);

    StateR xm{Chart::xu, {0.7, -1.2}, {0.1, 0.1}};
    CHECK(classify_region(xm).sheet == -1);

    StateR bh{Chart::ks, {1.0, -0.2}, {0.1, 0.1}};
    CHECK(classify_region(bh).quadrant == RegionLabel::Quadrant::II);
    StateR wh{Chart::ks, {-1.0, 0.2}, {0.1, 0.1}};
    CHECK(classify_region(wh).quadrant == RegionLabel::Quadrant::IV);

    StateR bdry{Chart::ks, {0.0, 0.5}, {0.1, 0.1}};
    CHECK(classify_region(bdry).quadrant == RegionLabel::Quadrant::boundary);
    StateR scri{Chart::ef_adv, {0.0, -1.0 / 3.0}, {0.1, 0.1}};
    CHECK(classify_region(scri).side == RegionLabel::Side::boundary);
}

TEST_CASE("validity predicates and errors")
{
    StateR bad_schw{Chart::schw, {0.0, 1.0}, {0.1, 0.1}};
    CHECK(!chart_valid(bad_schw));
    CHECK_THROWS_AS(hamiltonian(bad_schw), validity_error);

    StateR bad_ks{Chart::ks, {1.0, -0.4}, {0.1, 0.1}}; // pq < -1/e
    CHECK(!chart_valid(bad_ks));

    StateR xp0{Chart::xp, {0.0, 0.5}, {0.1, 0.1}};
    CHECK(!chart_valid(xp0));

    StateR xt_h{Chart::xt, {0.0, 1.0}, {0.1, 0.1}};
    CHECK(!chart_valid(xt_h));

    // x = 0 is a valid point of the xu chart (flow extends), but its metric is singular
    StateR x0{Chart::xu, {0.3, 0.0}, {0.4, 0.7}};
    CHECK(chart_valid(x0));
    CHECK(hamiltonian(x0) == doctest::Approx(0.7 * 0.7 / 8.0).epsilon(1e-14));
    CHECK_THROWS_AS(chart_metric(x0), validity_error);

    // outside the overlap: anti-side point has no real x chart
    StateR anti{Chart::ef_adv, {0.0, -0.8}, {0.1, 0.1}};
    CHECK_THROWS_AS(to_chart(anti, Chart::xu), overlap_error);
}
