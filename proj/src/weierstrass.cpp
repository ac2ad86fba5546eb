#include "strgeo/weierstrass.hpp"
#include "strgeo/errors.hpp"

#include <algorithm>
#include <cmath>

namespace strgeo {

namespace {

using cplx = std::complex<double>;

constexpr int kSeriesTerms = 24; // Laurent coefficients c_2 .. c_{kSeriesTerms}

struct LaurentCoeffs {
    double c[kSeriesTerms + 1];
};

// c_2 = g2/20, c_3 = g3/28, c_k = 3/((2k+1)(k-3)) sum_{m=2}^{k-2} c_m c_{k-m}.
LaurentCoeffs laurent_coeffs(const WeierstrassInvariants& inv)
{
    LaurentCoeffs lc{};
    lc.c[2] = inv.g2 / 20.0;
    lc.c[3] = inv.g3 / 28.0;
    for (int k = 4; k <= kSeriesTerms; ++k) {
        double s = 0.0;
        for (int m = 2; m <= k - 2; ++m)
            s += lc.c[m] * lc.c[k - m];
        lc.c[k] = 3.0 * s / ((2.0 * k + 1.0) * (k - 3.0));
    }
    return lc;
}

// p(w) = w^-2 + sum c_k w^(2k-2); returns false if the tail has not converged.
bool laurent_eval(const LaurentCoeffs& lc, cplx w, WeierstrassValue& out)
{
    const cplx w2 = w * w;
    cplx p = 1.0 / w2;
    cplx dp = -2.0 / (w2 * w);
    cplx pw = w2; // w^(2k-2) for k = 2
    double last = 0.0;
    for (int k = 2; k <= kSeriesTerms; ++k) {
        const cplx term = lc.c[k] * pw;
        p += term;
        dp += (2.0 * k - 2.0) * lc.c[k] * pw / w;
        last = std::abs(term);
        pw *= w2;
    }
    out.p = p;
    out.dp = dp;
    return last <= 1e-17 * (std::abs(p) + 1.0);
}

// One duplication step: (p, p') at z -> (p, p') at 2z.
void duplicate(const WeierstrassInvariants& inv, WeierstrassValue& v)
{
    const cplx ppp = 6.0 * v.p * v.p - 0.5 * inv.g2; // p''
    const cplx a = ppp / (2.0 * v.dp);
    const cplx pn = a * a - 2.0 * v.p;
    const cplx dpn = a * (6.0 * v.p - 2.0 * a * a) - v.dp;
    v.p = pn;
    v.dp = dpn;
}

double invariant_scale(const WeierstrassInvariants& inv)
{
    return std::max({std::sqrt(std::abs(inv.g2)), std::cbrt(std::abs(inv.g3)), 0.25});
}

} // namespace

WeierstrassValue weierstrass_p_raw(cplx z, const WeierstrassInvariants& inv)
{
    const LaurentCoeffs lc = laurent_coeffs(inv);
    const double r0 = 0.45 / std::sqrt(invariant_scale(inv));
    const double az = std::abs(z);
    if (az == 0.0)
        throw pole_error("weierstrass_p: z = 0 is a pole");

    int n = 0;
    if (az > r0)
        n = static_cast<int>(std::ceil(std::log2(az / r0)));

    WeierstrassValue v{};
    for (; n <= 72; ++n) {
        const cplx w = z / std::pow(2.0, n);
        if (laurent_eval(lc, w, v))
            break;
    }
    for (int i = 0; i < n; ++i)
        duplicate(inv, v);
    return v;
}

double complete_elliptic_k(double m)
{
    if (!(m < 1.0))
        throw domain_error("complete_elliptic_k: requires m < 1");
    double a = 1.0, g = std::sqrt(1.0 - m);
    for (int i = 0; i < 60 && std::abs(a - g) > 1e-17 * a; ++i) {
        const double an = 0.5 * (a + g);
        g = std::sqrt(a * g);
        a = an;
    }
    return M_PI / (2.0 * a);
}

PeriodLattice half_periods(const WeierstrassInvariants& inv)
{
    const CubicRootSet rs = cubic_roots(inv);
    const double disc = inv.discriminant();
    const double scale = invariant_scale(inv);
    if (std::abs(disc) <= 1e-13 * std::pow(scale, 6) || rs.multiple_root)
        throw degenerate_error("half_periods: vanishing discriminant");

    PeriodLattice lat;
    if (disc > 0.0) {
        // Rectangular lattice from the three real roots e1 < e2 < e3.
        const double e1 = rs.e[0].real(), e2 = rs.e[1].real(), e3 = rs.e[2].real();
        const double span = e3 - e1;
        const double m = (e2 - e1) / span;
        lat.omega1 = cplx(complete_elliptic_k(m) / std::sqrt(span), 0.0);
        lat.omega3 = cplx(0.0, complete_elliptic_k(1.0 - m) / std::sqrt(span));
    } else {
        // Rhombic lattice: one real root plus a conjugate pair.
        const double er = rs.e[0].real();
        const cplx ec = rs.e[1];
        const double hh = std::abs(cplx(er, 0.0) - ec);
        const double m = 0.5 - 3.0 * er / (4.0 * hh);
        const double om_r = complete_elliptic_k(m) / std::sqrt(hh);       // half the real period
        const double om_i = complete_elliptic_k(1.0 - m) / std::sqrt(hh); // |imag part| of the conjugate generator
        lat.omega1 = cplx(om_r, 0.0);
        lat.omega3 = cplx(om_r / 2.0, om_i / 2.0);
    }
    return lat;
}

WeierstrassP::WeierstrassP(const WeierstrassInvariants& inv, double pole_radius)
    : inv_(inv), roots_(cubic_roots(inv)), lattice_(half_periods(inv)), pole_radius_(pole_radius)
{
    if (pole_radius_ <= 0.0) {
        const double gmin = std::min(std::abs(lattice_.gen1()), std::abs(lattice_.gen3()));
        pole_radius_ = 1e-9 * gmin;
    }
}

cplx WeierstrassP::reduce(cplx z) const
{
    const cplx w1 = lattice_.gen1(), w3 = lattice_.gen3();
    const double det = w1.real() * w3.imag() - w3.real() * w1.imag();
    const double a = (z.real() * w3.imag() - w3.real() * z.imag()) / det;
    const double b = (w1.real() * z.imag() - z.real() * w1.imag()) / det;
    cplx zr = z - std::round(a) * w1 - std::round(b) * w3;
    // One more pass picks the true nearest lattice point on skew cells.
    cplx best = zr;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            const cplx cand = zr - double(i) * w1 - double(j) * w3;
            if (std::abs(cand) < std::abs(best))
                best = cand;
        }
    return best;
}

WeierstrassValue WeierstrassP::operator()(cplx z) const
{
    const cplx zr = reduce(z);
    if (std::abs(zr) < pole_radius_)
        throw pole_error("weierstrass_p: z within pole radius of a lattice point");
    return weierstrass_p_raw(zr, inv_);
}

} // namespace strgeo
