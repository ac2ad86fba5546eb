#include "strgeo/cubic.hpp"

#include <algorithm>
#include <cmath>

namespace strgeo {

namespace {

using cplx = std::complex<double>;

// One Newton step on q at a (possibly complex) root candidate.
cplx polish(const WeierstrassInvariants& inv, cplx w)
{
    for (int i = 0; i < 3; ++i) {
        const cplx f = ((4.0 * w * w) - inv.g2) * w - inv.g3;
        const cplx df = 12.0 * w * w - inv.g2;
        if (std::abs(df) == 0.0)
            break;
        const cplx dw = f / df;
        // Near a multiple root Newton can bounce; damp hard steps.
        if (std::abs(dw) > 0.5 * (1.0 + std::abs(w)))
            break;
        w -= dw;
    }
    return w;
}

} // namespace

CubicRootSet cubic_roots(const WeierstrassInvariants& inv)
{
    CubicRootSet out;
    const double g2 = inv.g2, g3 = inv.g3;
    out.discriminant = 16.0 * inv.discriminant();

    // Depressed form: w^3 + p w + q with p = -g2/4, q = -g3/4.
    const double p = -g2 / 4.0;
    const double q = -g3 / 4.0;

    std::array<cplx, 3> r;
    const double scale = std::max({1.0, std::sqrt(std::abs(p)), std::cbrt(std::abs(q))});
    const double disc = -4.0 * p * p * p - 27.0 * q * q; // same sign as g2^3 - 27 g3^2

    if (disc > 0.0) {
        // Three distinct real roots, trigonometric form.
        const double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * m);
        arg = std::clamp(arg, -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            r[k] = m * std::cos(theta - 2.0 * M_PI * k / 3.0);
    } else {
        // Cardano (covers one-real-root and degenerate cases).
        const cplx half_q(-q / 2.0, 0.0);
        const cplx inner = std::sqrt(cplx(q * q / 4.0 + p * p * p / 27.0, 0.0));
        cplx u = half_q + inner;
        if (std::abs(u) < std::abs(half_q - inner))
            u = half_q - inner;
        cplx c = std::pow(u, 1.0 / 3.0);
        if (std::abs(c) == 0.0)
            c = 0.0;
        const cplx w1(-0.5, 0.5 * std::sqrt(3.0));
        for (int k = 0; k < 3; ++k) {
            const cplx rot = (k == 0) ? cplx(1.0) : (k == 1 ? w1 : std::conj(w1));
            const cplx ck = c * rot;
            r[k] = (std::abs(ck) == 0.0) ? cplx(0.0) : ck - p / (3.0 * ck);
        }
    }

    for (auto& w : r)
        w = polish(inv, w);

    // Classify real vs complex with a scale-aware band, clean tiny imaginary parts.
    const double band = 1e-9 * scale;
    for (auto& w : r)
        if (std::abs(w.imag()) <= band)
            w = cplx(w.real(), 0.0);

    std::sort(r.begin(), r.end(), [](const cplx& a, const cplx& b) {
        const bool ra = a.imag() == 0.0, rb = b.imag() == 0.0;
        if (ra != rb)
            return ra;
        if (ra)
            return a.real() < b.real();
        if (a.imag() != b.imag())
            return a.imag() < b.imag();
        return a.real() < b.real();
    });

    out.e = r;
    out.n_real = static_cast<int>(std::count_if(r.begin(), r.end(), [](const cplx& w) { return w.imag() == 0.0; }));
    // Multiplicity flag from the discriminant at root scale (disc ~ scale^6).
    out.multiple_root = std::abs(disc) <= 1e-11 * std::pow(scale, 6);
    return out;
}

} // namespace strgeo
