#include "strgeo/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace strgeo {

namespace {

using Vec4 = std::array<double, 4>;

// +1 for the u family, -1 for the v family, 0 for neutral charts.
int family_of(Chart c)
{
    switch (c) {
    case Chart::ef_adv:
    case Chart::xu:
    case Chart::xp:
    case Chart::yp: return 1;
    case Chart::ef_ret:
    case Chart::xv:
    case Chart::xq:
    case Chart::yq: return -1;
    default: return 0;
    }
}

Vec4 rhs(const StateR& proto, const Vec4& y)
{
    StateR st = proto;
    st.pos = {y[0], y[1]};
    st.mom = {y[2], y[3]};
    try {
        return flow_rhs(st);
    } catch (const std::exception&) {
        // Trial stages may overshoot the chart domain (e.g. past pq = -1/e in
        // KS); poison the stage so the step is rejected and retried smaller.
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan, nan};
    }
}

StateR with_y(const StateR& proto, const Vec4& y)
{
    StateR st = proto;
    st.pos = {y[0], y[1]};
    st.mom = {y[2], y[3]};
    if ((st.chart == Chart::xu || st.chart == Chart::xv) && st.pos[1] != 0.0)
        st.sheet = st.pos[1] > 0.0 ? 1 : -1;
    return st;
}

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = B1 - 5179.0 / 57600, E3 = B3 - 7571.0 / 16695, E4 = B4 - 393.0 / 640,
                 E5 = B5 + 92097.0 / 339200, E6 = B6 - 187.0 / 2100, E7 = -1.0 / 40;

struct StepResult {
    Vec4 y;
    Vec4 k7;
    double err = 0.0;
};

StepResult dopri_step(const StateR& proto, const Vec4& y0, double h, const Vec4& k1, double tol)
{
    Vec4 k2, k3, k4, k5, k6, k7, yt, y5;
    auto stage = [&](const Vec4& w) { return rhs(proto, w); };

    for (int i = 0; i < 4; ++i)
        yt[i] = y0[i] + h * A21 * k1[i];
    k2 = stage(yt);
    for (int i = 0; i < 4; ++i)
        yt[i] = y0[i] + h * (A31 * k1[i] + A32 * k2[i]);
    k3 = stage(yt);
    for (int i = 0; i < 4; ++i)
        yt[i] = y0[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    k4 = stage(yt);
    for (int i = 0; i < 4; ++i)
        yt[i] = y0[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    k5 = stage(yt);
    for (int i = 0; i < 4; ++i)
        yt[i] = y0[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    k6 = stage(yt);
    for (int i = 0; i < 4; ++i)
        y5[i] = y0[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    k7 = stage(y5);

    double err = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        const double sc = 0.01 * tol + tol * std::max(std::abs(y0[i]), std::abs(y5[i]));
        err += (e / sc) * (e / sc);
    }
    return {y5, k7, std::sqrt(err / 4.0)};
}

// Single accepted step used for dense/event evaluation (error ignored).
Vec4 plain_step(const StateR& proto, const Vec4& y0, double h)
{
    const Vec4 k1 = rhs(proto, y0);
    return dopri_step(proto, y0, h, k1, 1.0).y;
}

// --- event machinery ---------------------------------------------------------

struct EvSpec {
    int n = 0;
    EventKind kind[3]{};
};

EvSpec ev_spec(Chart c)
{
    switch (c) {
    case Chart::ef_adv: return {3, {EventKind::scri_minus, EventKind::horizon, EventKind::turning_point}};
    case Chart::ef_ret: return {3, {EventKind::scri_plus, EventKind::horizon, EventKind::turning_point}};
    case Chart::ks:
    case Chart::schw: return {2, {EventKind::horizon, EventKind::turning_point}};
    case Chart::xu:
    case Chart::xv:
    case Chart::xt:
    case Chart::xp:
    case Chart::xq: return {3, {EventKind::singularity, EventKind::horizon, EventKind::turning_point}};
    case Chart::yp: return {2, {EventKind::scri_minus, EventKind::turning_point}};
    case Chart::yq: return {2, {EventKind::scri_plus, EventKind::turning_point}};
    }
    return {};
}

void ev_values(const StateR& st, double out[3])
{
    switch (st.chart) {
    case Chart::ef_adv:
    case Chart::ef_ret: {
        const double w = st.pos[1];
        out[0] = w - kScriOmega;
        out[1] = w - kHorizonOmega;
        out[2] = flow_rhs(st)[1];
        return;
    }
    case Chart::ks:
        out[0] = st.pos[0] * st.pos[1];
        out[1] = st.pos[0] * st.mom[0] + st.pos[1] * st.mom[1];
        return;
    case Chart::schw:
        out[0] = st.pos[1] - 1.0;
        out[1] = flow_rhs(st)[1];
        return;
    case Chart::xu:
    case Chart::xv:
    case Chart::xt:
    case Chart::xp:
    case Chart::xq: {
        const double x = st.pos[1];
        out[0] = x;
        out[1] = x * x - 1.0;
        out[2] = flow_rhs(st)[1];
        return;
    }
    case Chart::yp:
    case Chart::yq:
        out[0] = st.pos[1];
        out[1] = flow_rhs(st)[1];
        return;
    }
}

double ev_value_at(const StateR& proto, const Vec4& y0, double h, double tau, int slot)
{
    const Vec4 y = (tau == 0.0) ? y0 : plain_step(proto, y0, tau * h);
    double vals[3];
    ev_values(with_y(proto, y), vals);
    return vals[slot];
}

// --- neutral-family and policy helpers ----------------------------------------

int neutral_family(const StateR& st)
{
    if (st.chart == Chart::ks) {
        const double p = st.pos[0], q = st.pos[1];
        const double r = state_r(st);
        const double r3e = std::abs(r * r * r) * std::exp(r - 1.0);
        const double om_adv = p > 0.0 ? std::abs(st.mom[1]) * r3e / p : std::numeric_limits<double>::infinity();
        const double om_ret = q > 0.0 ? std::abs(st.mom[0]) * r3e / q : std::numeric_limits<double>::infinity();
        if (!std::isfinite(om_adv) && !std::isfinite(om_ret))
            return 1;
        return om_adv <= om_ret ? 1 : -1;
    }
    return 1;
}

} // namespace

std::string_view event_kind_name(EventKind k)
{
    switch (k) {
    case EventKind::horizon: return "horizon";
    case EventKind::scri_plus: return "scri_plus";
    case EventKind::scri_minus: return "scri_minus";
    case EventKind::singularity: return "singularity";
    case EventKind::chart_switch: return "chart_switch";
    case EventKind::turning_point: return "turning_point";
    }
    return "?";
}

SphereGeodesic make_sphere_geodesic(double H2, const std::array<double, 3>& n, double theta0)
{
    if (H2 < 0.0)
        throw domain_error("sphere geodesic: H2 must be non-negative");
    SphereGeodesic g;
    const double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (nn == 0.0)
        throw domain_error("sphere geodesic: zero plane normal");
    g.n = {n[0] / nn, n[1] / nn, n[2] / nn};
    // any unit vector orthogonal to n
    std::array<double, 3> seed = std::abs(g.n[0]) < 0.9 ? std::array<double, 3>{1.0, 0.0, 0.0}
                                                        : std::array<double, 3>{0.0, 1.0, 0.0};
    const double dot = seed[0] * g.n[0] + seed[1] * g.n[1] + seed[2] * g.n[2];
    std::array<double, 3> a{seed[0] - dot * g.n[0], seed[1] - dot * g.n[1], seed[2] - dot * g.n[2]};
    const double an = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    g.a = {a[0] / an, a[1] / an, a[2] / an};
    g.b = {g.n[1] * g.a[2] - g.n[2] * g.a[1], g.n[2] * g.a[0] - g.n[0] * g.a[2], g.n[0] * g.a[1] - g.n[1] * g.a[0]};
    g.theta0 = theta0;
    g.rate = std::sqrt(2.0 * H2);
    return g;
}

std::array<double, 3> sphere_point(const SphereGeodesic& geo, double s)
{
    const double th = geo.theta(s);
    const double c = std::cos(th), sn = std::sin(th);
    return {c * geo.a[0] + sn * geo.b[0], c * geo.a[1] + sn * geo.b[1], c * geo.a[2] + sn * geo.b[2]};
}

std::tuple<ConservedSet, SphereGeodesic, StateR> init_null(double H2, const StateR& start, int direction)
{
    if (H2 < 0.0)
        throw domain_error("init_null: H2 must be non-negative");
    if (!chart_valid(start))
        throw validity_error("init_null: start state invalid in its chart");

    // H(m) = A m^2 + B m + C with m the second momentum component.
    double A = 0.0, B = 0.0, C = 0.0;
    const double m0 = start.mom[0];
    switch (start.chart) {
    case Chart::ef_adv:
    case Chart::ef_ret:
        A = metric_q(start.pos[1]);
        B = m0;
        break;
    case Chart::xu:
    case Chart::xv: {
        const double x = start.pos[1];
        A = (1.0 - x * x) / 8.0;
        B = -0.5 * m0 * x * x * x;
        break;
    }
    case Chart::xt: {
        const double x2 = start.pos[1] * start.pos[1];
        A = -(x2 - 1.0) / 8.0;
        C = x2 * x2 * x2 * m0 * m0 / (2.0 * (x2 - 1.0));
        break;
    }
    case Chart::schw: {
        const double r = start.pos[1];
        A = -0.5 * r * (r - 1.0);
        C = 0.5 * r * r * r * m0 * m0 / (r - 1.0);
        break;
    }
    case Chart::ks: {
        const double r = state_r(start);
        B = -0.5 * r * r * r * std::exp(r - 1.0) * m0;
        break;
    }
    case Chart::xp:
    case Chart::xq: {
        const double x = start.pos[1];
        A = (1.0 - x * x) / 8.0;
        B = -0.25 * start.pos[0] * x * x * x * m0;
        break;
    }
    case Chart::yp:
    case Chart::yq: {
        const double y = start.pos[1];
        A = 0.5 * (y * y * y - y * y);
        B = 0.5 * start.pos[0] * m0;
        break;
    }
    }

    const double c0 = C - H2;
    const double mscale = 1.0 + std::abs(B) + std::sqrt(std::abs(c0));
    std::array<double, 2> roots{};
    int nroots = 0;
    if (std::abs(A) <= 1e-14 * mscale) {
        if (std::abs(B) <= 1e-14 * mscale * mscale)
            throw infeasible_error("init_null: Hamiltonian independent of the free momentum here");
        roots[nroots++] = -c0 / B;
    } else {
        const double disc = B * B - 4.0 * A * c0;
        if (disc < -1e-13 * mscale * mscale)
            throw infeasible_error("init_null: no real momentum completion at this position");
        const double sq = std::sqrt(std::max(disc, 0.0));
        roots[nroots++] = (-B + sq) / (2.0 * A);
        roots[nroots++] = (-B - sq) / (2.0 * A);
    }

    StateR chosen = start;
    bool have = false;
    for (int i = 0; i < nroots; ++i) {
        StateR cand = start;
        cand.mom[1] = roots[i];
        const double v = flow_rhs(cand)[1];
        if ((direction >= 0 && v > 0.0) || (direction < 0 && v < 0.0)) {
            chosen = cand;
            have = true;
            break;
        }
    }
    if (!have) {
        chosen = start;
        chosen.mom[1] = (direction >= 0) ? std::max(roots[0], roots[nroots - 1]) : std::min(roots[0], roots[nroots - 1]);
    }

    ConservedSet cons{H2, state_conserved_u(chosen), H2};
    return {cons, make_sphere_geodesic(H2, {0.0, 0.0, 1.0}, 0.0), chosen};
}

Chart switch_policy(const StateR& st, const FlowConfig& cfg)
{
    const double r = state_r(st);

    const double hband = st.chart == Chart::ks ? cfg.horizon_exit : cfg.horizon_band;
    if (std::isfinite(r) && std::abs(r - 1.0) < hband)
        return Chart::ks;

    int fam = family_of(st.chart);
    if (fam == 0)
        fam = neutral_family(st);

    const bool in_x = st.chart == Chart::xu || st.chart == Chart::xv;
    const double xband = in_x ? cfg.x_exit_r : cfg.x_enter_r;
    if (std::isfinite(r) && r >= 0.0 && r < xband)
        return fam < 0 ? Chart::xv : Chart::xu;

    // EF territory; flip family when the current momentum blows up while the
    // other family stays moderate.
    if ((st.chart == Chart::ef_adv || st.chart == Chart::ef_ret) && std::isfinite(r) && r != 1.0) {
        const double Om = st.mom[1], M = st.mom[0];
        const double h_abs = std::abs(hamiltonian(st));
        const double mscale = 1.0 + std::abs(M) + std::sqrt(h_abs);
        const double other = Om - 2.0 * r * r * r * M / (r - 1.0);
        if (std::abs(Om) > cfg.flip_factor * mscale && std::abs(other) < 0.5 * std::abs(Om))
            fam = -fam;
    }
    return fam < 0 ? Chart::ef_ret : Chart::ef_adv;
}

StateR flow_step(const StateR& st, double h)
{
    const Vec4 y0{st.pos[0], st.pos[1], st.mom[0], st.mom[1]};
    return with_y(st, plain_step(st, y0, h));
}

namespace {

struct LegOutput {
    std::vector<Sample> samples;
    std::vector<Event> events;
    double max_h_drift = 0.0;
    double max_u_drift = 0.0;
    double s_reached = 0.0;
};

LegOutput run_leg(StateR cur, const ConservedSet& cons, double s_end, const IntegrateOptions& opts)
{
    LegOutput out;
    double s = 0.0;
    const int dir = s_end >= 0.0 ? 1 : -1;
    out.s_reached = 0.0;
    if (s_end == 0.0)
        return out;

    // normalize the working chart silently before the first step
    {
        const Chart want = switch_policy(cur, opts.flow);
        if (want != cur.chart) {
            try {
                cur = to_chart(cur, want);
            } catch (const overlap_error&) {
            }
        }
    }

    double gauge_c = 0.0;  // Killing-boost offset applied inside a KS bridge
    int gauge_family = 0;  // +1 entered from the u side, -1 from the v side

    Vec4 y{cur.pos[0], cur.pos[1], cur.mom[0], cur.mom[1]};
    Vec4 k1 = rhs(cur, y);
    double fmax = 0.0;
    for (double v : k1)
        fmax = std::max(fmax, std::abs(v));
    double h = dir * std::clamp(0.05 / (1.0 + fmax), 1e-8, 0.05);

    std::size_t steps = 0;
    std::size_t since_sample = 0;
    bool stop = false;

    while (!stop) {
        if ((s + h - s_end) * dir > 0.0)
            h = s_end - s;
        if (++steps > opts.max_steps)
            throw integration_error("integrate: step budget exhausted", s);

        StepResult st = dopri_step(cur, y, h, k1, opts.tol);
        if (!std::isfinite(st.err)) {
            h *= 0.2;
            if (std::abs(h) < 1e-14 * (1.0 + std::abs(s)))
                throw integration_error("integrate: step size underflow (non-finite stage)", s);
            continue;
        }
        if (st.err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(st.err, -0.2));
            if (std::abs(h) < 1e-14 * (1.0 + std::abs(s)))
                throw integration_error("integrate: step size underflow", s);
            continue;
        }

        // --- events inside [s, s+h]
        const EvSpec spec = ev_spec(cur.chart);
        double v0[3], v1[3];
        ev_values(with_y(cur, y), v0);
        ev_values(with_y(cur, st.y), v1);
        struct Hit {
            double tau;
            int slot;
        };
        Hit hits[3];
        int nhits = 0;
        for (int i = 0; i < spec.n; ++i) {
            if (v0[i] == 0.0 || v1[i] == 0.0 || (v0[i] > 0.0) == (v1[i] > 0.0))
                continue;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 70; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double vm = ev_value_at(cur, y, h, mid, i);
                if (vm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((vm > 0.0) == (v0[i] > 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            hits[nhits++] = {0.5 * (lo + hi), i};
        }
        std::sort(hits, hits + nhits, [](const Hit& a, const Hit& b) { return a.tau < b.tau; });
        for (int i = 0; i < nhits; ++i) {
            const double tau_next = (i + 1 < nhits) ? hits[i + 1].tau : 1.0;
            const double tau_eval = 0.5 * (hits[i].tau + tau_next);
            const StateR post = with_y(cur, plain_step(cur, y, tau_eval * h));
            out.events.push_back({s + hits[i].tau * h, spec.kind[hits[i].slot], classify_region(post)});
            if (opts.physical_only &&
                (spec.kind[hits[i].slot] == EventKind::scri_minus || spec.kind[hits[i].slot] == EventKind::scri_plus)) {
                const Vec4 yev = plain_step(cur, y, hits[i].tau * h);
                cur = with_y(cur, yev);
                s += hits[i].tau * h;
                out.s_reached = s;
                out.samples.push_back({s, cur, std::abs(hamiltonian(cur) - cons.H)});
                return out;
            }
        }

        // --- accept
        s += h;
        y = st.y;
        k1 = st.k7; // FSAL
        cur = with_y(cur, y);

        // The KS map (p,q,P,Q) -> -(p,q,P,Q) is the identity on the surface;
        // normalize the gauge so at least one of p, q stays positive and an
        // EF exit chart always exists.
        if (cur.chart == Chart::ks && cur.pos[0] < 0.0 && cur.pos[1] < 0.0) {
            for (auto* arr : {&cur.pos, &cur.mom})
                for (double& v : *arr)
                    v = -v;
            y = {cur.pos[0], cur.pos[1], cur.mom[0], cur.mom[1]};
            k1 = rhs(cur, y);
        }

        const double h_err = std::abs(hamiltonian(cur) - cons.H);
        const double u_err = std::abs(state_conserved_u(cur) - cons.U);
        out.max_h_drift = std::max(out.max_h_drift, h_err);
        out.max_u_drift = std::max(out.max_u_drift, u_err);
        out.s_reached = s;

        if (opts.store_samples && ++since_sample >= opts.sample_stride) {
            out.samples.push_back({s, cur, h_err});
            since_sample = 0;
        }

        if ((s - s_end) * dir >= 0.0)
            stop = true;

        // --- chart switch
        if (!stop) {
            const Chart want = switch_policy(cur, opts.flow);
            if (want != cur.chart) {
                try {
                    StateR src = cur;
                    // Enter KS bridges in a Killing-boosted patch: the cyclic
                    // coordinate drifts secularly along the flow, and
                    // p = e^{(u-1)/2} overflows once |u| grows past ~1400.
                    // The boost is an exact isometry; it is undone on exit.
                    if (want == Chart::ks &&
                        (src.chart == Chart::ef_adv || src.chart == Chart::ef_ret || src.chart == Chart::schw ||
                         src.chart == Chart::xt)) {
                        gauge_c = src.pos[0];
                        gauge_family = src.chart == Chart::ef_ret ? -1 : 1;
                        src.pos[0] = 0.0;
                    }
                    StateR next = to_chart(src, want);
                    if (cur.chart == Chart::ks && gauge_family != 0 &&
                        (want == Chart::ef_adv || want == Chart::ef_ret)) {
                        const int exit_fam = want == Chart::ef_adv ? 1 : -1;
                        next.pos[0] += (gauge_family == exit_fam) ? gauge_c : -gauge_c;
                        gauge_c = 0.0;
                        gauge_family = 0;
                    }
                    out.events.push_back({s, EventKind::chart_switch, classify_region(next)});
                    cur = next;
                    y = {cur.pos[0], cur.pos[1], cur.mom[0], cur.mom[1]};
                    k1 = rhs(cur, y);
                } catch (const overlap_error&) {
                } catch (const validity_error&) {
                }
            }
        }

        h *= std::clamp(0.9 * std::pow(std::max(st.err, 1e-10), -0.2), 0.2, 5.0);
    }

    if (out.samples.empty() || out.samples.back().s != s)
        out.samples.push_back({s, cur, std::abs(hamiltonian(cur) - cons.H)});
    return out;
}

} // namespace

Trajectory integrate(const StateR& start, const ConservedSet& conserved, std::pair<double, double> s_span,
                     const IntegrateOptions& opts)
{
    if (!(s_span.first <= 0.0 && s_span.second >= 0.0))
        throw domain_error("integrate: s_span must contain 0 (the start parameter)");
    if (!(s_span.first < s_span.second))
        throw domain_error("integrate: empty span");
    if (!chart_valid(start))
        throw validity_error("integrate: start state invalid in its chart");
    const double h0 = hamiltonian(start);
    if (std::abs(h0 - conserved.H) > 1e-6 * (1.0 + std::abs(conserved.H)))
        throw infeasible_error("integrate: start state inconsistent with conserved.H");

    Trajectory traj;
    traj.conserved = conserved;

    LegOutput back;
    if (s_span.first < 0.0)
        back = run_leg(start, conserved, s_span.first, opts);
    LegOutput fwd;
    if (s_span.second > 0.0)
        fwd = run_leg(start, conserved, s_span.second, opts);

    std::reverse(back.samples.begin(), back.samples.end());
    std::reverse(back.events.begin(), back.events.end());

    traj.samples = std::move(back.samples);
    traj.samples.push_back({0.0, start, std::abs(h0 - conserved.H)});
    traj.samples.insert(traj.samples.end(), fwd.samples.begin(), fwd.samples.end());
    traj.events = std::move(back.events);
    traj.events.insert(traj.events.end(), fwd.events.begin(), fwd.events.end());
    traj.max_h_drift = std::max(back.max_h_drift, fwd.max_h_drift);
    traj.max_u_drift = std::max(back.max_u_drift, fwd.max_u_drift);
    return traj;
}

std::vector<Pass> precession(const Trajectory& traj, const SphereGeodesic& geo)
{
    std::vector<Pass> passes;
    if (traj.samples.empty())
        return passes;

    auto accessible = [](const Sample& smp) {
        const double w = state_omega(smp.state);
        if (!(w > kScriOmega && w < kHorizonOmega))
            return false;
        return classify_region(smp.state).sheet == 1;
    };

    auto boundary_s = [&](double s_lo, double s_hi) {
        for (const Event& ev : traj.events) {
            if (ev.s <= s_lo || ev.s > s_hi)
                continue;
            if (ev.kind == EventKind::scri_minus || ev.kind == EventKind::scri_plus || ev.kind == EventKind::horizon ||
                ev.kind == EventKind::singularity)
                return ev.s;
        }
        return 0.5 * (s_lo + s_hi);
    };

    bool inside = accessible(traj.samples.front());
    double enter_s = traj.samples.front().s;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const bool now = accessible(traj.samples[i]);
        if (now == inside)
            continue;
        const double sb = boundary_s(traj.samples[i - 1].s, traj.samples[i].s);
        if (now)
            enter_s = sb;
        else
            passes.push_back({enter_s, sb, geo.theta(enter_s), geo.theta(sb)});
        inside = now;
    }
    if (inside)
        passes.push_back({enter_s, traj.samples.back().s, geo.theta(enter_s), geo.theta(traj.samples.back().s)});
    return passes;
}

ProbeReport completeness_probe(const StateR& start, const ConservedSet& conserved, double S_max, double tol)
{
    ProbeReport rep;
    IntegrateOptions opts;
    opts.tol = tol;
    opts.store_samples = false;

    try {
        const Trajectory traj = integrate(start, conserved, {-S_max, S_max}, opts);
        rep.reached_forward = traj.samples.back().s;
        rep.reached_backward = traj.samples.front().s;
        rep.max_h_drift = traj.max_h_drift;
        rep.max_u_drift = traj.max_u_drift;
        for (const Event& ev : traj.events)
            if (ev.kind == EventKind::singularity)
                ++rep.singularity_crossings;
    } catch (const integration_error& e) {
        rep.obstructed = true;
        rep.obstruction = e.what();
        rep.reached_forward = e.s_reached;
        rep.reached_backward = e.s_reached;
    }
    return rep;
}

} // namespace strgeo
