#ifndef STRGEO_CUBIC_HPP
#define STRGEO_CUBIC_HPP

#include <array>
#include <complex>

namespace strgeo {

/// Invariants (g2, g3) of the Weierstrass cubic q(w) = 4w^3 - g2 w - g3.
/// In curves built from geodesic data g2 = 4/3 exactly.
struct WeierstrassInvariants {
    double g2 = 0.0;
    double g3 = 0.0;

    // g2^3 - 27 g3^2
    double discriminant() const { return g2 * g2 * g2 - 27.0 * g3 * g3; }
};

/// Roots of q(w) = 4w^3 - g2 w - g3, real roots first in ascending order.
struct CubicRootSet {
    std::array<std::complex<double>, 3> e{};
    double discriminant = 0.0; // 16 (g2^3 - 27 g3^2)
    int n_real = 0;
    bool multiple_root = false;

    std::complex<double> e1() const { return e[0]; }
    std::complex<double> e2() const { return e[1]; }
    std::complex<double> e3() const { return e[2]; }
};

/// Solve q(w) = 4w^3 - g2 w - g3 = 0 with closed-form cubic plus Newton polish.
/// Degenerate (multiple-root) inputs are flagged, never rejected.
CubicRootSet cubic_roots(const WeierstrassInvariants& inv);

/// q, q', q'' for the same cubic.
inline double weierstrass_q(const WeierstrassInvariants& inv, double w)
{
    return ((4.0 * w * w) - inv.g2) * w - inv.g3;
}
inline std::complex<double> weierstrass_q(const WeierstrassInvariants& inv, std::complex<double> w)
{
    return ((4.0 * w * w) - inv.g2) * w - inv.g3;
}
inline double weierstrass_q_prime(const WeierstrassInvariants& inv, double w)
{
    return 12.0 * w * w - inv.g2;
}

} // namespace strgeo

#endif
