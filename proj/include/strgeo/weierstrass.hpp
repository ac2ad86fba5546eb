#ifndef STRGEO_WEIERSTRASS_HPP
#define STRGEO_WEIERSTRASS_HPP

#include "strgeo/cubic.hpp"

#include <complex>

namespace strgeo {

/// Half-periods omega1, omega3 of the lattice 2*omega1*Z + 2*omega3*Z,
/// normalized so Im(omega3/omega1) > 0. For discriminant > 0 the lattice is
/// rectangular: 2*omega1 real, 2*omega3 purely imaginary.
struct PeriodLattice {
    std::complex<double> omega1;
    std::complex<double> omega3;

    std::complex<double> gen1() const { return 2.0 * omega1; }
    std::complex<double> gen3() const { return 2.0 * omega3; }
};

/// Value of p and its derivative at one point.
struct WeierstrassValue {
    std::complex<double> p;
    std::complex<double> dp;
};

/// Evaluate (p(z), p'(z)) by a truncated Laurent series near the origin
/// followed by repeated duplication. No lattice reduction, so accuracy
/// degrades for |z| many periods from 0; use WeierstrassP for reduced
/// evaluation. Blows up (double pole) as z approaches a lattice point.
WeierstrassValue weierstrass_p_raw(std::complex<double> z, const WeierstrassInvariants& inv);

/// Half-periods from complete elliptic integrals over the root intervals.
/// Throws degenerate_error when the discriminant vanishes.
PeriodLattice half_periods(const WeierstrassInvariants& inv);

/// Complete elliptic integral K as a function of the parameter m = k^2,
/// via the arithmetic-geometric mean. Requires m < 1.
double complete_elliptic_k(double m);

/// Lattice-aware evaluator: reduces z into the fundamental cell before the
/// series/duplication evaluation and rejects points within pole_radius of a
/// lattice point.
class WeierstrassP {
public:
    WeierstrassP(const WeierstrassInvariants& inv, double pole_radius = 0.0);

    WeierstrassValue operator()(std::complex<double> z) const;

    /// z reduced modulo the period lattice to the cell centred on 0.
    std::complex<double> reduce(std::complex<double> z) const;

    const PeriodLattice& lattice() const { return lattice_; }
    const WeierstrassInvariants& invariants() const { return inv_; }
    const CubicRootSet& roots() const { return roots_; }
    double pole_radius() const { return pole_radius_; }

private:
    WeierstrassInvariants inv_;
    CubicRootSet roots_;
    PeriodLattice lattice_;
    double pole_radius_;
};

} // namespace strgeo

#endif
