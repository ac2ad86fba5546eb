#include "doctest.h"
#include "oracles.hpp"

#include "strgeo/elliptic.hpp"
#include "strgeo/errors.hpp"
#include "strgeo/flow.hpp"

#include <cmath>
#include <random>

using namespace strgeo;

TEST_CASE("init_null completes the momentum")
{
    // at the horizon the completion degenerates to the linear root H/U
    StateR h{Chart::ef_adv, {0.0, 2.0 / 3.0}, {0.1, 0.0}};
    auto [cons, geo, st] = init_null(1.0, h, +1);
    CHECK(st.mom[1] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(cons.H == 1.0);
    CHECK(cons.U == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(geo.rate == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    // omega = 1/6 lies in the forbidden band C at (H=1, U=0.1): no real root
    StateR c{Chart::ef_adv, {0.0, 1.0 / 6.0}, {0.1, 0.0}};
    CHECK_THROWS_AS(init_null(1.0, c, +1), infeasible_error);

    // feasible quadratic on segment D: both roots give H = H2 and direction
    // selects the sign of the radial velocity
    StateR d{Chart::ef_adv, {0.0, 0.8}, {0.1, 0.0}};
    auto [cp, gp, sp] = init_null(1.0, d, +1);
    auto [cm, gm, sm] = init_null(1.0, d, -1);
    CHECK(hamiltonian(sp) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hamiltonian(sm) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(flow_rhs(sp)[1] > 0.0);
    CHECK(flow_rhs(sm)[1] < 0.0);
    CHECK(sp.mom[1] != sm.mom[1]);

    // radial: H2 = 0 with the direction picking the Omega = 0 branch
    StateR r{Chart::ef_adv, {0.0, 0.0}, {1.0, 0.0}};
    auto [cr, gr, sr] = init_null(0.0, r, +1);
    CHECK(sr.mom[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(gr.rate == 0.0);
}

TEST_CASE("radial null geodesic has the closed form omega(s) = omega0 + U s, u constant")
{
    StateR r{Chart::ef_adv, {0.3, 0.0}, {1.0, 0.0}};
    auto [cons, geo, st] = init_null(0.0, r, +1);
    IntegrateOptions opts;
    opts.tol = 1e-12;
    const Trajectory traj = integrate(st, cons, {-0.5, 2.0}, opts);
    for (const Sample& smp : traj.samples) {
        CHECK(std::abs(state_omega(smp.state) - smp.s) <= 1e-10 * (1.0 + std::abs(smp.s)));
        if (smp.state.chart == Chart::ef_adv)
            CHECK(std::abs(smp.state.pos[0] - 0.3) <= 1e-10);
    }
    // horizon crossing sits exactly at s = 2/3, scri crossing at s = -1/3
    bool horizon = false, scri = false;
    for (const Event& ev : traj.events) {
        if (ev.kind == EventKind::horizon) {
            CHECK(ev.s == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
            horizon = true;
        }
        if (ev.kind == EventKind::scri_minus) {
            CHECK(ev.s == doctest::Approx(-1.0 / 3.0).epsilon(1e-9));
            scri = true;
        }
    }
    CHECK(horizon);
    CHECK(scri);
}

TEST_CASE("sphere geodesic identities")
{
    const SphereGeodesic frozen = make_sphere_geodesic(0.0, {0.0, 0.0, 1.0}, 0.7);
    const auto x0 = sphere_point(frozen, 0.0);
    const auto x1 = sphere_point(frozen, 5.0);
    CHECK(x0 == x1);

    const SphereGeodesic geo = make_sphere_geodesic(1.7, {0.3, -0.8, 0.5}, 0.2);
    const double period = 2.0 * M_PI / geo.rate;
    const auto a = sphere_point(geo, 0.4);
    const auto b = sphere_point(geo, 0.4 + period);
    for (int i = 0; i < 3; ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> sd(-20.0, 20.0);
    for (int i = 0; i < 100; ++i) {
        const auto x = sphere_point(geo, sd(rng));
        const double dot = x[0] * geo.n[0] + x[1] * geo.n[1] + x[2] * geo.n[2];
        const double norm = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        CHECK(std::abs(dot) <= 1e-14);
        CHECK(std::abs(norm - 1.0) <= 1e-12);
    }
}

TEST_CASE("switch_policy bands")
{
    // close to the horizon on either side: KS
    StateR a{Chart::ef_adv, {0.0, 2.0 / 3.0 + 0.01}, {0.5, 0.5}};
    CHECK(switch_policy(a) == Chart::ks);
    StateR b{Chart::ef_adv, {0.0, 2.0 / 3.0 - 0.01}, {0.5, 0.5}};
    CHECK(switch_policy(b) == Chart::ks);

    // deep interior: x charts (r = 0.05)
    StateR c{Chart::ef_adv, {0.0, 1.0 / 0.05 - 1.0 / 3.0}, {0.5, 0.5}};
    CHECK(switch_policy(c) == Chart::xu);
    StateR cv{Chart::ef_ret, {0.0, 1.0 / 0.05 - 1.0 / 3.0}, {0.5, 0.5}};
    CHECK(switch_policy(cv) == Chart::xv);

    // near scri the EF chart is kept (regular there)
    StateR d{Chart::ef_adv, {0.0, -1.0 / 3.0 + 1e-4}, {0.5, 0.5}};
    CHECK(switch_policy(d) == Chart::ef_adv);
    StateR e{Chart::ef_adv, {0.0, -1.0 / 3.0 - 1e-4}, {0.5, 0.5}};
    CHECK(switch_policy(e) == Chart::ef_adv);
}

TEST_CASE("case-2 trajectory: conservation through singularity crossings")
{
    StateR d0{Chart::ef_adv, {0.0, 0.8}, {1.0, 0.0}};
    auto [cons, geo, st] = init_null(1.0, d0, +1);
    IntegrateOptions opts;
    opts.tol = 1e-12;
    const Trajectory traj = integrate(st, cons, {-15.0, 15.0}, opts);
    CHECK(traj.max_h_drift <= 1e-8);
    CHECK(traj.max_u_drift <= 1e-8);
    int sing = 0;
    for (const Event& ev : traj.events)
        if (ev.kind == EventKind::singularity)
            ++sing;
    CHECK(sing >= 2);
    // total Hamiltonian H_Sigma - H2 vanishes along the null geodesic
    for (std::size_t i = 0; i < traj.samples.size(); i += 37)
        CHECK(std::abs(hamiltonian(traj.samples[i].state) - cons.H2) <= 1e-8);
    // samples strictly increasing
    for (std::size_t i = 1; i < traj.samples.size(); ++i)
        CHECK(traj.samples[i].s > traj.samples[i - 1].s);
}

TEST_CASE("x-turning points satisfy 4 (dx/ds)^2 = U^2 x^6 - 2H x^2 + 2H")
{
    StateR d0{Chart::ef_adv, {0.0, 0.8}, {1.0, 0.0}};
    auto [cons, geo, st] = init_null(1.0, d0, +1);
    IntegrateOptions opts;
    opts.tol = 1e-12;
    const Trajectory traj = integrate(st, cons, {0.0, 12.0}, opts);
    const double H = cons.H, U = cons.U;
    int checked = 0;
    for (const Sample& smp : traj.samples) {
        if (smp.state.chart != Chart::xu && smp.state.chart != Chart::xv)
            continue;
        const double x = smp.state.pos[1];
        const double dx = flow_rhs(smp.state)[1];
        const double x2 = x * x;
        const double sext = U * U * x2 * x2 * x2 - 2.0 * H * x2 + 2.0 * H;
        CHECK(std::abs(4.0 * dx * dx - sext) <= 1e-9 * (1.0 + std::abs(sext)));
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("event coordinates are consistent with their kinds")
{
    StateR d0{Chart::ef_adv, {0.0, 0.8}, {1.0, 0.0}};
    auto [cons, geo, st] = init_null(1.0, d0, +1);
    IntegrateOptions opts;
    opts.tol = 1e-12;
    const Trajectory traj = integrate(st, cons, {0.0, 15.0}, opts);
    // reconstruct the state at each event by short re-integration from 0
    for (const Event& ev : traj.events) {
        if (ev.kind == EventKind::chart_switch || ev.kind == EventKind::turning_point)
            continue;
        IntegrateOptions o2;
        o2.tol = 1e-12;
        o2.store_samples = false;
        const Trajectory t2 = integrate(st, cons, {0.0, ev.s}, o2);
        const StateR& at = t2.samples.back().state;
        if (ev.kind == EventKind::horizon)
            CHECK(std::abs(state_omega(at) - kHorizonOmega) <= 1e-7);
        if (ev.kind == EventKind::scri_plus || ev.kind == EventKind::scri_minus)
            CHECK(std::abs(state_omega(at) - kScriOmega) <= 1e-7);
        if (ev.kind == EventKind::singularity)
            CHECK(std::abs(at.pos[1]) <= 1e-7); // x coordinate
    }
}

TEST_CASE("case-2 cusp: r-momentum blows up while x-chart components stay bounded")
{
    StateR d0{Chart::ef_adv, {0.0, 0.8}, {1.0, 0.0}};
    auto [cons, geo, st] = init_null(1.0, d0, +1);
    IntegrateOptions opts;
    opts.tol = 1e-12;
    const Trajectory traj = integrate(st, cons, {0.0, 8.0}, opts);
    double s_sing = 0.0;
    for (const Event& ev : traj.events)
        if (ev.kind == EventKind::singularity) {
            s_sing = ev.s;
            break;
        }
    REQUIRE(s_sing > 0.0);
    // bound on the x-chart components over the approach segment
    double xmax = 0.0;
    for (const Sample& smp : traj.samples)
        if ((smp.state.chart == Chart::xu || smp.state.chart == Chart::xv) && smp.s < s_sing)
            for (double v : {smp.state.pos[1], smp.state.mom[0], smp.state.mom[1]})
                xmax = std::max(xmax, std::abs(v));
    // state just before the crossing
    IntegrateOptions o2;
    o2.tol = 1e-12;
    o2.store_samples = false;
    const Trajectory t2 = integrate(st, cons, {0.0, s_sing - 1e-7}, o2);
    const StateR& at = t2.samples.back().state;
    REQUIRE((at.chart == Chart::xu || at.chart == Chart::xv));
    const double x = at.pos[1], X = at.mom[1];
    const double r_momentum = X / (2.0 * x);
    CHECK(std::abs(r_momentum) > 1e6);
    for (double v : {at.pos[1], at.mom[0], at.mom[1]})
        CHECK(std::abs(v) <= 10.0 * xmax);
}

TEST_CASE("completeness probes")
{
    // radial ray: complete, never reaches x = 0 (x changes sign only for the
    // crossing family below)
    StateR r{Chart::ef_adv, {0.0, 0.0}, {1.0, 0.0}};
    auto [cr, gr, sr] = init_null(0.0, r, +1);
    const ProbeReport rr = completeness_probe(sr, cr, 300.0, 1e-10);
    CHECK(!rr.obstructed);
    CHECK(rr.reached_forward == doctest::Approx(300.0));
    CHECK(rr.reached_backward == doctest::Approx(-300.0));

    // U = 0: bounded interior motion crossing x = 0 periodically
    StateR u0{Chart::xu, {0.0, 0.5}, {0.0, 0.0}};
    auto [cu, gu, su] = init_null(1.0, u0, +1);
    const ProbeReport ru = completeness_probe(su, cu, 300.0, 1e-10);
    CHECK(!ru.obstructed);
    CHECK(ru.singularity_crossings >= 50);
    CHECK(ru.max_h_drift <= 1e-8);

    // exact x(s) = sin(sqrt(H/2) s + phi) for the U = 0 family
    IntegrateOptions opts;
    opts.tol = 1e-12;
    const Trajectory traj = integrate(su, cu, {0.0, 6.0}, opts);
    const double om = std::sqrt(cu.H / 2.0);
    const double phi = std::asin(0.5); // x(0) = 0.5 with dx/ds > 0
    for (const Sample& smp : traj.samples)
        if (smp.state.chart == Chart::xu)
            CHECK(smp.state.pos[1] == doctest::Approx(std::sin(om * smp.s + phi)).epsilon(1e-7));
}

TEST_CASE("double-root degeneracy 27U^2 = 8H: exponential approach to omega = 1/3")
{
    const double H = 1.0, U = std::sqrt(8.0 / 27.0);
    StateR st{Chart::ef_adv, {0.0, 0.0}, {U, 0.0}};
    auto [cons, geo, s0] = init_null(H, st, +1);
    IntegrateOptions opts;
    opts.tol = 1e-12;
    // approach rate near the double root is |omega - 1/3| ~ e^{-2z}; by
    // s = 10 that is ~7e-7, still above the ~3e-8 scale at which the
    // floating-point defect of the degeneracy itself takes over
    const Trajectory traj = integrate(s0, cons, {0.0, 10.0}, opts);
    double peak = -1.0;
    for (const Sample& smp : traj.samples) {
        const double w = state_omega(smp.state);
        CHECK(w < 1.0 / 3.0 + 1e-7);
        peak = std::max(peak, w);
    }
    CHECK(peak > 1.0 / 3.0 - 1e-5);
}

TEST_CASE("precession: radial passes have equal entry and exit angles")
{
    StateR r{Chart::ef_adv, {0.0, 0.0}, {1.0, 0.0}};
    auto [cons, geo, st] = init_null(0.0, r, +1);
    const Trajectory traj = integrate(st, cons, {-2.0, 2.0}, {});
    const auto passes = precession(traj, geo);
    REQUIRE(!passes.empty());
    for (const Pass& p : passes)
        CHECK(p.theta_enter == doctest::Approx(p.theta_exit).epsilon(1e-14));
}

TEST_CASE("precession: delta-theta per pass is the lattice period 4 omega1")
{
    const double H = 1.0, U = 0.1;
    const EllipticCurveData curve = curve_from_invariants(H, U);
    StateR b0{Chart::ef_adv, {0.0, 0.5 * (curve.roots.e[0].real() + curve.roots.e[1].real())}, {U, 0.0}};
    auto [cons, geo, st] = init_null(H, b0, +1);
    IntegrateOptions opts;
    opts.tol = 1e-12;
    const Trajectory traj = integrate(st, cons, {0.0, 40.0}, opts);
    const auto passes = precession(traj, geo);
    REQUIRE(passes.size() >= 5);
    const double ref = 4.0 * curve.lattice->omega1.real();
    for (std::size_t i = 2; i + 1 < passes.size(); ++i) {
        const double d = passes[i].theta_enter - passes[i - 1].theta_enter;
        CHECK(d == doctest::Approx(ref).epsilon(1e-7));
    }
}

TEST_CASE("integrate rejects inconsistent inputs")
{
    StateR st{Chart::ef_adv, {0.0, 0.8}, {1.0, 0.3}};
    const ConservedSet bad{5.0, 1.0, 5.0};
    CHECK_THROWS_AS(integrate(st, bad, {-1.0, 1.0}, {}), infeasible_error);
    const ConservedSet ok{hamiltonian(st), 1.0, hamiltonian(st)};
    CHECK_THROWS_AS(integrate(st, ok, {1.0, 2.0}, {}), domain_error);
}

TEST_CASE("physical-only integration stops at the first scri crossing")
{
    StateR r{Chart::ef_adv, {0.0, 0.0}, {-1.0, 0.0}}; // radial heading to scri
    auto [cons, geo, st] = init_null(0.0, r, -1);
    IntegrateOptions opts;
    opts.physical_only = true;
    const Trajectory traj = integrate(st, cons, {0.0, 10.0}, opts);
    CHECK(traj.samples.back().s == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}
