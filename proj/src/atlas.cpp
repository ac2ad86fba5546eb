#include "strgeo/atlas.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace strgeo {

using std::exp;
using std::log;
using std::sqrt;

namespace {

constexpr double kInvE = 0.36787944117144232160;

template <typename S>
bool finite_scalar(const S& v)
{
    if constexpr (is_complex_scalar<S>)
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    else
        return std::isfinite(v);
}

template <typename S>
bool finite_state(const CotangentState<S>& st)
{
    return finite_scalar(st.pos[0]) && finite_scalar(st.pos[1]) && finite_scalar(st.mom[0]) && finite_scalar(st.mom[1]);
}

// r in a KS-family state. Real mode goes through the recorded Lambert branch;
// complex mode requires the carried x.
template <typename S>
S ks_r(const CotangentState<S>& st)
{
    if constexpr (is_complex_scalar<S>) {
        if (!st.aux_x)
            throw validity_error("ks: complex state must carry aux_x");
        return *st.aux_x * *st.aux_x;
    } else {
        const double pq = st.pos[0] * st.pos[1];
        return 1.0 + lambert_w(st.wbranch, pq);
    }
}

template <typename S>
S ks_x(const CotangentState<S>& st)
{
    if constexpr (is_complex_scalar<S>) {
        if (!st.aux_x)
            throw validity_error("ks: complex state must carry aux_x");
        return *st.aux_x;
    } else {
        const double r = ks_r(st);
        if (r < 0.0)
            throw overlap_error("ks: no real x on the r < 0 side");
        return st.sheet >= 0 ? std::sqrt(r) : -std::sqrt(r);
    }
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

inline void require(bool ok, const char* what)
{
    if (!ok)
        throw overlap_error(what);
}

} // namespace

std::string_view chart_name(Chart c)
{
    switch (c) {
    case Chart::schw: return "schw";
    case Chart::ef_adv: return "ef_adv";
    case Chart::ef_ret: return "ef_ret";
    case Chart::ks: return "ks";
    case Chart::xu: return "xu";
    case Chart::xv: return "xv";
    case Chart::xt: return "xt";
    case Chart::yp: return "yp";
    case Chart::yq: return "yq";
    case Chart::xp: return "xp";
    case Chart::xq: return "xq";
    }
    return "?";
}

Chart chart_from_name(std::string_view name)
{
    for (int i = 0; i < kChartCount; ++i)
        if (chart_name(static_cast<Chart>(i)) == name)
            return static_cast<Chart>(i);
    throw domain_error("unknown chart name: " + std::string(name));
}

template <typename S>
bool chart_valid(const CotangentState<S>& st)
{
    if (!finite_state(st))
        return false;
    switch (st.chart) {
    case Chart::schw: {
        const S r = st.pos[1];
        return r != S(0.0) && r != S(1.0);
    }
    case Chart::ef_adv:
    case Chart::ef_ret:
        return true;
    case Chart::ks:
        if constexpr (is_complex_scalar<S>) {
            if (!st.aux_x || *st.aux_x == S(0.0))
                return false;
            const S res = surface_residual(st.pos[0], st.pos[1], *st.aux_x);
            return std::abs(res) <= 1e-8 * (1.0 + std::abs(st.pos[0] * st.pos[1]));
        } else {
            const double pq = st.pos[0] * st.pos[1];
            if (!(pq > -kInvE))
                return false; // x = 0 sits at pq = -1/e
            if (st.wbranch == WBranch::lower && pq >= 0.0)
                return false;
            return true;
        }
    case Chart::xu:
    case Chart::xv:
        return true; // polynomial Hamiltonian, whole plane
    case Chart::xt: {
        const S x = st.pos[1];
        return x * x != S(1.0);
    }
    case Chart::xp:
    case Chart::yp:
    case Chart::xq:
    case Chart::yq:
        return st.pos[0] != S(0.0);
    }
    return false;
}

template <typename S>
S hamiltonian(const CotangentState<S>& st)
{
    if (!chart_valid(st))
        throw validity_error("hamiltonian: state violates its chart predicate in chart " + std::string(chart_name(st.chart)));
    switch (st.chart) {
    case Chart::schw: {
        const S r = st.pos[1], T = st.mom[0], R = st.mom[1];
        return 0.5 * (r * r * r * T * T / (r - 1.0) - r * (r - 1.0) * R * R);
    }
    case Chart::ef_adv:
    case Chart::ef_ret: {
        const S w = st.pos[1], U = st.mom[0], Om = st.mom[1];
        return Om * (U + metric_q(w) * Om);
    }
    case Chart::ks: {
        // x^6 p q P Q / (2 (1 - x^2)) written through the surface relation
        // pq = (x^2-1) e^{x^2-1}, regular across the horizon.
        const S r = ks_r(st);
        return -0.5 * r * r * r * exp(r - 1.0) * st.mom[0] * st.mom[1];
    }
    case Chart::xu:
    case Chart::xv: {
        const S x = st.pos[1], U = st.mom[0], X = st.mom[1];
        return X / 8.0 * ((1.0 - x * x) * X - 4.0 * U * x * x * x);
    }
    case Chart::xt: {
        const S x = st.pos[1], T = st.mom[0], X = st.mom[1];
        const S x2 = x * x;
        return (4.0 * x2 * x2 * x2 * T * T - (x2 - 1.0) * (x2 - 1.0) * X * X) / (8.0 * (x2 - 1.0));
    }
    case Chart::xp: {
        const S p = st.pos[0], x = st.pos[1], R = st.mom[0], X = st.mom[1];
        return X / 8.0 * ((1.0 - x * x) * X - 2.0 * p * x * x * x * R);
    }
    case Chart::xq: {
        const S q = st.pos[0], x = st.pos[1], Sm = st.mom[0], Y = st.mom[1];
        return Y / 8.0 * ((1.0 - x * x) * Y - 2.0 * q * x * x * x * Sm);
    }
    case Chart::yp:
    case Chart::yq: {
        const S pq = st.pos[0], y = st.pos[1], R = st.mom[0], Y = st.mom[1];
        return 0.5 * pq * R * Y + 0.5 * (y * y * y - y * y) * Y * Y;
    }
    }
    throw validity_error("hamiltonian: unreachable");
}

template <typename S>
std::array<S, 3> chart_metric(const CotangentState<S>& st)
{
    const S zero(0.0);
    switch (st.chart) {
    case Chart::schw: {
        const S r = st.pos[1];
        if (r == S(0.0) || r == S(1.0))
            throw validity_error("schw metric singular at r in {0,1}");
        return {(r - 1.0) / (r * r * r), zero, -1.0 / (r * (r - 1.0))};
    }
    case Chart::ef_adv:
    case Chart::ef_ret: {
        const S w = st.pos[1];
        return {-2.0 * metric_q(w), S(1.0), zero};
    }
    case Chart::ks: {
        const S r = ks_r(st);
        if (r == S(0.0))
            throw validity_error("ks metric singular at x = 0");
        return {zero, -2.0 * exp(1.0 - r) / (r * r * r), zero};
    }
    case Chart::xu:
    case Chart::xv: {
        const S x = st.pos[1];
        if (x == S(0.0))
            throw validity_error("x-chart metric singular at x = 0");
        const S x3 = x * x * x;
        return {(x * x - 1.0) / (x3 * x3), -2.0 / x3, zero};
    }
    case Chart::xt: {
        const S x = st.pos[1];
        const S x2 = x * x;
        if (x == S(0.0) || x2 == S(1.0))
            throw validity_error("xt metric singular at x in {0, +-1}");
        return {(x2 - 1.0) / (x2 * x2 * x2), zero, -4.0 / (x2 - 1.0)};
    }
    case Chart::xp:
    case Chart::xq: {
        const S a = st.pos[0], x = st.pos[1];
        if (x == S(0.0) || a == S(0.0))
            throw validity_error("xp/xq metric singular at x = 0 or p/q = 0");
        const S x3 = x * x * x;
        return {4.0 * (x * x - 1.0) / (x3 * x3 * a * a), -4.0 / (x3 * a), zero};
    }
    case Chart::yp:
    case Chart::yq: {
        const S p = st.pos[0], y = st.pos[1];
        if (p == S(0.0))
            throw validity_error("y-chart metric singular at p/q = 0");
        return {4.0 * (y * y - y * y * y) / (p * p), 2.0 / p, zero};
    }
    }
    throw validity_error("chart_metric: unreachable");
}

template <typename S>
S hamiltonian_metric_form(const CotangentState<S>& st)
{
    const auto g = chart_metric(st);
    const S det = g[0] * g[2] - g[1] * g[1];
    const S iu = g[2] / det, ix = -g[1] / det, il = g[0] / det;
    const S a = st.mom[0], b = st.mom[1];
    return 0.5 * (iu * a * a + 2.0 * ix * a * b + il * b * b);
}

template <typename S>
std::array<S, 4> flow_rhs(const CotangentState<S>& st)
{
    switch (st.chart) {
    case Chart::schw: {
        const S r = st.pos[1], T = st.mom[0], R = st.mom[1];
        const S rm = r - 1.0;
        return {r * r * r * T / rm,
                -r * rm * R,
                S(0.0),
                -0.5 * (r * r * (2.0 * r - 3.0) / (rm * rm) * T * T - (2.0 * r - 1.0) * R * R)};
    }
    case Chart::ef_adv:
    case Chart::ef_ret: {
        const S w = st.pos[1], U = st.mom[0], Om = st.mom[1];
        return {Om, U + 2.0 * metric_q(w) * Om, S(0.0), -metric_q_prime(w) * Om * Om};
    }
    case Chart::ks: {
        const S r = ks_r(st);
        const S P = st.mom[0], Q = st.mom[1];
        const S f = -0.5 * r * r * r * exp(r - 1.0); // dH/d(PQ)
        const S g = 0.5 * r * (r + 3.0) * P * Q;     // -dH/d(pq) * (pq)' factor
        return {f * Q, f * P, g * st.pos[1], g * st.pos[0]};
    }
    case Chart::xu:
    case Chart::xv: {
        const S x = st.pos[1], U = st.mom[0], X = st.mom[1];
        const S x3 = x * x * x;
        return {-0.5 * x3 * X,
                0.25 * ((1.0 - x * x) * X - 2.0 * U * x3),
                S(0.0),
                0.25 * x * X * (X + 6.0 * U * x)};
    }
    case Chart::xt: {
        const S x = st.pos[1], T = st.mom[0], X = st.mom[1];
        const S x2 = x * x, d = x2 - 1.0;
        return {x2 * x2 * x2 * T / d,
                -0.25 * d * X,
                S(0.0),
                -x2 * x2 * x * T * T * (2.0 * x2 - 3.0) / (d * d) + 0.25 * x * X * X};
    }
    case Chart::xp: {
        const S p = st.pos[0], x = st.pos[1], R = st.mom[0], X = st.mom[1];
        const S x3 = x * x * x;
        return {-0.25 * p * x3 * X,
                0.25 * ((1.0 - x * x) * X - p * x3 * R),
                0.25 * x3 * R * X,
                0.25 * x * X * X + 0.75 * p * x * x * R * X};
    }
    case Chart::xq: {
        const S q = st.pos[0], x = st.pos[1], Sm = st.mom[0], Y = st.mom[1];
        const S x3 = x * x * x;
        return {-0.25 * q * x3 * Y,
                0.25 * ((1.0 - x * x) * Y - q * x3 * Sm),
                0.25 * x3 * Sm * Y,
                0.25 * x * Y * Y + 0.75 * q * x * x * Sm * Y};
    }
    case Chart::yp:
    case Chart::yq: {
        const S p = st.pos[0], y = st.pos[1], R = st.mom[0], Y = st.mom[1];
        return {0.5 * p * Y,
                0.5 * p * R + (y * y * y - y * y) * Y,
                -0.5 * R * Y,
                -0.5 * (3.0 * y * y - 2.0 * y) * Y * Y};
    }
    }
    throw validity_error("flow_rhs: unreachable");
}

double state_r(const StateR& st)
{
    switch (st.chart) {
    case Chart::schw: return st.pos[1];
    case Chart::ef_adv:
    case Chart::ef_ret: return 1.0 / (st.pos[1] + 1.0 / 3.0);
    case Chart::ks: return ks_r(st);
    case Chart::xu:
    case Chart::xv:
    case Chart::xt:
    case Chart::xp:
    case Chart::xq: return st.pos[1] * st.pos[1];
    case Chart::yp:
    case Chart::yq: return 1.0 / st.pos[1];
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double state_omega(const StateR& st)
{
    switch (st.chart) {
    case Chart::ef_adv:
    case Chart::ef_ret: return st.pos[1];
    case Chart::yp:
    case Chart::yq: return st.pos[1] - 1.0 / 3.0;
    default: return 1.0 / state_r(st) - 1.0 / 3.0;
    }
}

double state_conserved_u(const StateR& st)
{
    switch (st.chart) {
    case Chart::schw:
    case Chart::xt:
    case Chart::ef_adv:
    case Chart::xu: return st.mom[0];
    case Chart::ef_ret:
    case Chart::xv: return -st.mom[0];
    case Chart::ks: return 0.5 * (st.pos[0] * st.mom[0] - st.pos[1] * st.mom[1]);
    case Chart::xp:
    case Chart::yp: return 0.5 * st.pos[0] * st.mom[0];
    case Chart::xq:
    case Chart::yq: return -0.5 * st.pos[0] * st.mom[0];
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// --- transition maps --------------------------------------------------------

namespace {

template <typename S>
using St = CotangentState<S>;

template <typename S>
WBranch branch_for_r(const S& r)
{
    if constexpr (is_complex_scalar<S>)
        return r.real() >= 0.0 ? WBranch::principal : WBranch::lower;
    else
        return r >= 0.0 ? WBranch::principal : WBranch::lower;
}

// sqrt(r) on the recorded sheet.
template <typename S>
S sheet_sqrt(const S& r, int sheet)
{
    if constexpr (is_complex_scalar<S>) {
        const S x = sqrt(r);
        return sheet >= 0 ? x : -x;
    } else {
        if (!(r > 0.0))
            throw overlap_error("no real x at r <= 0");
        return sheet >= 0 ? std::sqrt(r) : -std::sqrt(r);
    }
}

template <typename S>
bool nonzero(const S& v)
{
    return v != S(0.0);
}

// One directly-implemented edge of the chart graph; std::nullopt when
// (src, dst) is not an edge.
template <typename S>
std::optional<St<S>> direct_map(const St<S>& st, Chart dst)
{
    const Chart src = st.chart;
    St<S> out = st;
    out.chart = dst;
    out.aux_x.reset();

    auto edge = [&](Chart a, Chart b) { return src == a && dst == b; };

    // schw <-> ef
    if (edge(Chart::schw, Chart::ef_adv) || edge(Chart::schw, Chart::ef_ret)) {
        const S t = st.pos[0], r = st.pos[1], T = st.mom[0], R = st.mom[1];
        require(nonzero(r) && nonzero(r - S(1.0)), "schw->ef: r in {0,1}");
        const S rs = r + ln_abs(r - S(1.0));
        const bool adv = dst == Chart::ef_adv;
        out.pos[0] = adv ? t + rs : rs - t;
        out.pos[1] = 1.0 / r - 1.0 / 3.0;
        out.mom[0] = adv ? T : -T;
        out.mom[1] = r * r * (out.mom[0] * r / (r - 1.0) - R);
        out.wbranch = branch_for_r(r);
        return out;
    }
    if (edge(Chart::ef_adv, Chart::schw) || edge(Chart::ef_ret, Chart::schw)) {
        const S w = st.pos[1], M = st.mom[0], Om = st.mom[1];
        require(nonzero(w + S(1.0 / 3.0)), "ef->schw: point at scri");
        const S r = 1.0 / (w + 1.0 / 3.0);
        require(nonzero(r) && nonzero(r - S(1.0)), "ef->schw: r in {0,1}");
        const bool adv = src == Chart::ef_adv;
        const S rs = r + ln_abs(r - S(1.0));
        out.pos[0] = adv ? st.pos[0] - rs : rs - st.pos[0];
        out.pos[1] = r;
        out.mom[0] = adv ? M : -M;
        out.mom[1] = M * r / (r - 1.0) - Om / (r * r);
        return out;
    }

    // ef_adv <-> ef_ret
    if (edge(Chart::ef_adv, Chart::ef_ret) || edge(Chart::ef_ret, Chart::ef_adv)) {
        const S w = st.pos[1], M = st.mom[0], Om = st.mom[1];
        require(nonzero(w + S(1.0 / 3.0)), "ef<->ef: point at scri");
        const S r = 1.0 / (w + 1.0 / 3.0);
        require(nonzero(r - S(1.0)), "ef<->ef: point on horizon");
        out.pos[0] = 2.0 * (r + ln_abs(r - S(1.0))) - st.pos[0];
        out.mom[0] = -M;
        out.mom[1] = Om - 2.0 * r * r * r * M / (r - 1.0);
        return out;
    }

    // ef <-> x
    if (edge(Chart::ef_adv, Chart::xu) || edge(Chart::ef_ret, Chart::xv)) {
        const S w = st.pos[1], Om = st.mom[1];
        require(nonzero(w + S(1.0 / 3.0)), "ef->x: point at scri");
        const S r = 1.0 / (w + 1.0 / 3.0);
        const S x = sheet_sqrt(r, st.sheet);
        out.pos[1] = x;
        out.mom[1] = -2.0 * Om / (x * x * x);
        return out;
    }
    if (edge(Chart::xu, Chart::ef_adv) || edge(Chart::xv, Chart::ef_ret)) {
        const S x = st.pos[1], X = st.mom[1];
        require(nonzero(x), "x->ef: singularity x = 0");
        out.pos[1] = 1.0 / (x * x) - 1.0 / 3.0;
        out.mom[1] = -0.5 * x * x * x * X;
        if constexpr (!is_complex_scalar<S>)
            out.sheet = x > 0.0 ? 1 : -1;
        return out;
    }

    // xu <-> xv
    if (edge(Chart::xu, Chart::xv) || edge(Chart::xv, Chart::xu)) {
        const S x = st.pos[1], M = st.mom[0], X = st.mom[1];
        const S x2 = x * x;
        require(nonzero(x2 - S(1.0)), "xu<->xv: point on horizon");
        out.pos[0] = 2.0 * (x2 + ln_abs(x2 - S(1.0))) - st.pos[0];
        out.mom[0] = -M;
        out.mom[1] = X + 4.0 * M * x2 * x / (x2 - 1.0);
        return out;
    }

    // xu/xv <-> xt
    if (edge(Chart::xu, Chart::xt) || edge(Chart::xv, Chart::xt)) {
        const S x = st.pos[1], M = st.mom[0], X = st.mom[1];
        const S x2 = x * x;
        require(nonzero(x2 - S(1.0)), "x->xt: point on horizon");
        const S rs = x2 + ln_abs(x2 - S(1.0));
        const bool adv = src == Chart::xu;
        out.pos[0] = adv ? st.pos[0] - rs : rs - st.pos[0];
        out.mom[0] = adv ? M : -M;
        out.mom[1] = X + 2.0 * M * x2 * x / (x2 - 1.0);
        return out;
    }
    if (edge(Chart::xt, Chart::xu) || edge(Chart::xt, Chart::xv)) {
        const S x = st.pos[1], T = st.mom[0], X = st.mom[1];
        const S x2 = x * x;
        require(nonzero(x2 - S(1.0)), "xt->x: point on horizon");
        const S rs = x2 + ln_abs(x2 - S(1.0));
        const bool adv = dst == Chart::xu;
        out.pos[0] = adv ? st.pos[0] + rs : rs - st.pos[0];
        out.mom[0] = adv ? T : -T;
        out.mom[1] = adv ? X - 2.0 * T * x2 * x / (x2 - 1.0) : X + 2.0 * T * x2 * x / (x2 - 1.0);
        return out;
    }

    // xu <-> xp, xv <-> xq (reparametrize u or v as p = e^{(u-1)/2})
    if (edge(Chart::xu, Chart::xp) || edge(Chart::xv, Chart::xq)) {
        const S e = exp(0.5 * (st.pos[0] - 1.0));
        out.pos[0] = e;
        out.mom[0] = 2.0 * st.mom[0] / e;
        return out;
    }
    if (edge(Chart::xp, Chart::xu) || edge(Chart::xq, Chart::xv)) {
        const S p = st.pos[0];
        if constexpr (!is_complex_scalar<S>)
            require(p > 0.0, "xp/xq->x: requires positive p (resp q)");
        out.pos[0] = 2.0 * log(p) + 1.0;
        out.mom[0] = 0.5 * p * st.mom[0];
        return out;
    }

    // ef <-> y
    if (edge(Chart::ef_adv, Chart::yp) || edge(Chart::ef_ret, Chart::yq)) {
        const S e = exp(0.5 * (st.pos[0] - 1.0));
        out.pos[0] = e;
        out.pos[1] = st.pos[1] + 1.0 / 3.0;
        out.mom[0] = 2.0 * st.mom[0] / e;
        return out;
    }
    if (edge(Chart::yp, Chart::ef_adv) || edge(Chart::yq, Chart::ef_ret)) {
        const S p = st.pos[0];
        if constexpr (!is_complex_scalar<S>)
            require(p > 0.0, "y->ef: requires positive p (resp q)");
        out.pos[0] = 2.0 * log(p) + 1.0;
        out.pos[1] = st.pos[1] - 1.0 / 3.0;
        out.mom[0] = 0.5 * p * st.mom[0];
        return out;
    }

    // xp <-> yp, xq <-> yq (y = 1/x^2)
    if (edge(Chart::xp, Chart::yp) || edge(Chart::xq, Chart::yq)) {
        const S x = st.pos[1], X = st.mom[1];
        require(nonzero(x), "xp/xq->y: singularity x = 0");
        out.pos[1] = 1.0 / (x * x);
        out.mom[1] = -0.5 * x * x * x * X;
        return out;
    }
    if (edge(Chart::yp, Chart::xp) || edge(Chart::yq, Chart::xq)) {
        const S y = st.pos[1], Y = st.mom[1];
        require(nonzero(y), "y->xp/xq: point at scri (y = 0)");
        const S x = sheet_sqrt(S(1.0) / y, st.sheet);
        out.pos[1] = x;
        out.mom[1] = -2.0 * Y / (x * x * x);
        return out;
    }

    // xp/xq <-> ks
    if (edge(Chart::xp, Chart::ks) || edge(Chart::xq, Chart::ks)) {
        const S a = st.pos[0], x = st.pos[1], Ma = st.mom[0], X = st.mom[1];
        require(nonzero(x), "x->ks: singularity x = 0");
        const S x2 = x * x, x3 = x2 * x;
        const S other = (x2 - 1.0) * exp(x2 - 1.0) / a;
        const S m_same = Ma + X * (x2 - 1.0) / (2.0 * x3 * a);
        const S m_other = a * X * exp(1.0 - x2) / (2.0 * x3);
        if (src == Chart::xp) {
            out.pos = {a, other};
            out.mom = {m_same, m_other};
        } else {
            out.pos = {other, a};
            out.mom = {m_other, m_same};
        }
        out.wbranch = branch_for_r(x2);
        if constexpr (is_complex_scalar<S>)
            out.aux_x = x;
        else
            out.sheet = x > 0.0 ? 1 : -1;
        return out;
    }
    if (edge(Chart::ks, Chart::xp) || edge(Chart::ks, Chart::xq)) {
        const S p = st.pos[0], q = st.pos[1], P = st.mom[0], Q = st.mom[1];
        const S x = ks_x(st);
        require(nonzero(x), "ks->x: singularity x = 0");
        const S x2 = x * x, x3 = x2 * x;
        if (dst == Chart::xp) {
            require(nonzero(p), "ks->xp: p = 0");
            out.pos = {p, x};
            out.mom = {P - q * Q / p, 2.0 * x3 * Q * exp(x2 - 1.0) / p};
        } else {
            require(nonzero(q), "ks->xq: q = 0");
            out.pos = {q, x};
            out.mom = {Q - p * P / q, 2.0 * x3 * P * exp(x2 - 1.0) / q};
        }
        return out;
    }

    // ef <-> ks
    if (edge(Chart::ef_adv, Chart::ks) || edge(Chart::ef_ret, Chart::ks)) {
        const S w = st.pos[1], M = st.mom[0], Om = st.mom[1];
        require(nonzero(w + S(1.0 / 3.0)), "ef->ks: point at scri");
        const S r = 1.0 / (w + 1.0 / 3.0);
        const S e = exp(0.5 * (st.pos[0] - 1.0));
        const S other = (r - 1.0) * exp(r - 1.0) / e;
        const S r3 = r * r * r;
        const S m_same = 2.0 * M / e - Om * (r - 1.0) / (r3 * e);
        const S m_other = -Om * e * exp(1.0 - r) / r3;
        if (src == Chart::ef_adv) {
            out.pos = {e, other};
            out.mom = {m_same, m_other};
        } else {
            out.pos = {other, e};
            out.mom = {m_other, m_same};
        }
        out.wbranch = branch_for_r(r);
        if constexpr (is_complex_scalar<S>)
            out.aux_x = sheet_sqrt(r, st.sheet);
        return out;
    }
    if (edge(Chart::ks, Chart::ef_adv) || edge(Chart::ks, Chart::ef_ret)) {
        const S p = st.pos[0], q = st.pos[1], P = st.mom[0], Q = st.mom[1];
        const S r = ks_r(st);
        const S r3 = r * r * r;
        const bool adv = dst == Chart::ef_adv;
        const S a = adv ? p : q;
        if constexpr (!is_complex_scalar<S>)
            require(a > 0.0, "ks->ef: requires positive p (resp q)");
        out.pos[0] = 2.0 * log(a) + 1.0;
        out.pos[1] = 1.0 / r - 1.0 / 3.0;
        if (adv) {
            out.mom[0] = 0.5 * (p * P - q * Q);
            out.mom[1] = -Q * r3 * exp(r - 1.0) / p;
        } else {
            out.mom[0] = 0.5 * (q * Q - p * P);
            out.mom[1] = -P * r3 * exp(r - 1.0) / q;
        }
        return out;
    }

    return std::nullopt;
}

const std::vector<Chart>& neighbors(Chart c)
{
    static const std::vector<Chart> adj[kChartCount] = {
        /* schw   */ {Chart::ef_adv, Chart::ef_ret},
        /* ef_adv */ {Chart::xu, Chart::ks, Chart::yp, Chart::ef_ret, Chart::schw},
        /* ef_ret */ {Chart::xv, Chart::ks, Chart::yq, Chart::ef_adv, Chart::schw},
        /* ks     */ {Chart::ef_adv, Chart::ef_ret, Chart::xp, Chart::xq},
        /* xu     */ {Chart::ef_adv, Chart::xp, Chart::xt, Chart::xv},
        /* xv     */ {Chart::ef_ret, Chart::xq, Chart::xt, Chart::xu},
        /* xt     */ {Chart::xu, Chart::xv},
        /* yp     */ {Chart::ef_adv, Chart::xp},
        /* yq     */ {Chart::ef_ret, Chart::xq},
        /* xp     */ {Chart::xu, Chart::ks, Chart::yp},
        /* xq     */ {Chart::xv, Chart::ks, Chart::yq},
    };
    return adj[static_cast<int>(c)];
}

// Depth-limited DFS over the chart graph; visited is a per-path bitmask.
template <typename S>
std::optional<St<S>> route(const St<S>& st, Chart target, unsigned visited, int depth)
{
    if (depth == 0)
        return std::nullopt;
    visited |= 1u << static_cast<int>(st.chart);
    for (Chart next : neighbors(st.chart)) {
        if (visited & (1u << static_cast<int>(next)))
            continue;
        std::optional<St<S>> hop;
        try {
            hop = direct_map(st, next);
        } catch (const overlap_error&) {
            continue;
        } catch (const validity_error&) {
            continue;
        }
        if (!hop || !chart_valid(*hop))
            continue;
        if (next == target)
            return hop;
        if (auto full = route(*hop, target, visited, depth - 1))
            return full;
    }
    return std::nullopt;
}

} // namespace

template <typename S>
CotangentState<S> to_chart(const CotangentState<S>& st, Chart target)
{
    if (!chart_valid(st))
        throw validity_error("to_chart: source state invalid in chart " + std::string(chart_name(st.chart)));
    if (st.chart == target)
        return st;
    for (int depth = 1; depth <= 4; ++depth)
        if (auto routed = route(st, target, 0u, depth))
            return *routed;
    throw overlap_error("to_chart: point outside the overlap of " + std::string(chart_name(st.chart)) + " and " +
                        std::string(chart_name(target)));
}

RegionLabel classify_region(const StateR& st)
{
    RegionLabel out;
    const double r = state_r(st);
    const double w = state_omega(st);

    if (std::isfinite(w)) {
        if (w < -1.0 / 3.0)
            out.side = RegionLabel::Side::anti_schwarzschild;
        else if (w > -1.0 / 3.0)
            out.side = RegionLabel::Side::schwarzschild;
    } else {
        out.side = RegionLabel::Side::schwarzschild; // singularity end
    }

    switch (st.chart) {
    case Chart::xu:
    case Chart::xv:
    case Chart::xt:
    case Chart::xp:
    case Chart::xq:
        out.sheet = sign_of(st.pos[1]);
        break;
    default:
        out.sheet = st.sheet;
        break;
    }

    int sp = 0, sq = 0;
    if (st.chart == Chart::ks) {
        sp = sign_of(st.pos[0]);
        sq = sign_of(st.pos[1]);
    } else {
        const bool vfam =
            st.chart == Chart::ef_ret || st.chart == Chart::xv || st.chart == Chart::yq || st.chart == Chart::xq;
        const int same = 1; // e^{(u-1)/2} (resp. e^{(v-1)/2}) is positive
        const int other = std::isfinite(r) ? sign_of(r - 1.0) : 1;
        sp = vfam ? other : same;
        sq = vfam ? same : other;
    }
    using Qd = RegionLabel::Quadrant;
    if (sp > 0 && sq > 0)
        out.quadrant = Qd::I;
    else if (sp > 0 && sq < 0)
        out.quadrant = Qd::II;
    else if (sp < 0 && sq < 0)
        out.quadrant = Qd::III;
    else if (sp < 0 && sq > 0)
        out.quadrant = Qd::IV;
    else
        out.quadrant = Qd::boundary;
    return out;
}

// --- explicit instantiations -------------------------------------------------

template bool chart_valid<double>(const CotangentState<double>&);
template bool chart_valid<std::complex<double>>(const CotangentState<std::complex<double>>&);
template double hamiltonian<double>(const CotangentState<double>&);
template std::complex<double> hamiltonian<std::complex<double>>(const CotangentState<std::complex<double>>&);
template std::array<double, 3> chart_metric<double>(const CotangentState<double>&);
template std::array<std::complex<double>, 3> chart_metric<std::complex<double>>(const CotangentState<std::complex<double>>&);
template double hamiltonian_metric_form<double>(const CotangentState<double>&);
template std::complex<double> hamiltonian_metric_form<std::complex<double>>(const CotangentState<std::complex<double>>&);
template std::array<double, 4> flow_rhs<double>(const CotangentState<double>&);
template std::array<std::complex<double>, 4> flow_rhs<std::complex<double>>(const CotangentState<std::complex<double>>&);
template CotangentState<double> to_chart<double>(const CotangentState<double>&, Chart);
template CotangentState<std::complex<double>> to_chart<std::complex<double>>(const CotangentState<std::complex<double>>&, Chart);

} // namespace strgeo
