#ifndef STRGEO_ELLIPTIC_HPP
#define STRGEO_ELLIPTIC_HPP

#include "strgeo/weierstrass.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace strgeo {

enum class CurveCase { case1_pos, case2_neg, degenerate };

std::string_view curve_case_name(CurveCase c);

/// The elliptic curve y^2 = q(omega) attached to a geodesic with invariants
/// (H, U): g2 = 4/3, g3 = 8/27 - 2U^2/H. Landmarks: scri at omega = -1/3,
/// horizon at omega = 2/3, singularity at omega = infinity.
struct EllipticCurveData {
    double H = 0.0;
    double U = 0.0;
    WeierstrassInvariants inv{};
    CubicRootSet roots{};
    std::optional<PeriodLattice> lattice{}; // absent when degenerate
    CurveCase kase = CurveCase::degenerate;
    double discriminant = 0.0; // 64 U^2 (8H - 27U^2) / H^2
};

EllipticCurveData curve_from_invariants(double H, double U);

struct Segment {
    char label = '?';
    double lo = 0.0; // -inf allowed
    double hi = 0.0; // +inf allowed
    bool real_parameter = false;
    std::vector<std::string> landmarks{};
};

struct SegmentTable {
    std::vector<Segment> segments{};

    const Segment& containing(double omega) const;
};

/// The division of the real omega-axis by the real roots: A,B,C,D in Case 1
/// (B, D real-parameter), A,D in Case 2 (D real-parameter, all landmarks).
SegmentTable segments(const EllipticCurveData& curve);

/// Residues of the branch-epsilon one-form Omega dz at its single pole
/// (omega = 2/3) and double pole (omega = -1/3), computed in closed form and
/// by trapezoidal contour quadrature.
struct ResidueReport {
    int epsilon = 1;
    std::complex<double> z1{}; // single pole, p(z1) = 2/3
    std::complex<double> z2{}; // double pole, p(z2) = -1/3
    std::complex<double> single_closed{};
    std::complex<double> double_closed{};
    std::complex<double> single_contour{};
    std::complex<double> double_contour{};
    std::complex<double> du_single{}; // after du = -sqrt(2/H) Omega dz
    std::complex<double> du_double{};
};

ResidueReport du_residues(const EllipticCurveData& curve, int epsilon);

/// Loop integral of du around one pole (must be +-4*pi*i) and around both
/// poles (must vanish), plus the e^{u/2} continuation defect.
struct PeriodCheck {
    int epsilon = 1;
    std::complex<double> period{};            // loop around the single pole
    double period_err = 0.0;                  // distance to the nearest +-4*pi*i
    std::complex<double> period_both_poles{}; // loop enclosing both poles
    double exp_roundtrip_err = 0.0;           // |e^{period/2} - 1|
};

PeriodCheck u_period_check(const EllipticCurveData& curve, int epsilon);

/// The genus-2 data: S(x) = U^2 x^6 - 2H x^2 + 2H, its roots (six when
/// U != 0, the pair +-1 when the sextic degenerates), and the distinctness /
/// +- pairing flags.
struct SexticData {
    double H = 0.0;
    double U = 0.0;
    std::array<double, 7> coeffs{}; // ascending powers
    std::vector<std::complex<double>> roots{};
    bool distinct = false;
    bool paired = false;
};

SexticData sextic_from_invariants(double H, double U);

/// Verify H x^6 q(1/x^2 - 1/3) = 2 S(x) at random complex points and match
/// the sextic roots against +-(e_i + 1/3)^{-1/2}.
struct CorrespondenceReport {
    double max_identity_residual = 0.0; // relative
    double max_root_mismatch = 0.0;
    double max_cubic_residual = 0.0; // |q(x*^-2 - 1/3)| over sextic roots
    bool ok = false;
};

CorrespondenceReport cubic_sextic_correspondence(const EllipticCurveData& curve, const SexticData& sextic,
                                                 int n_samples = 100, std::uint64_t seed = 20240901);

/// Fix the integration constant z0 from one trajectory sample
/// (omega(s_a), domega/ds(s_a)) so that omega(s) = p(s sqrt(H/2) - z0).
std::complex<double> fit_z0(const EllipticCurveData& curve, double s_a, double omega_a, double domega_ds_a);

/// omega(s) predicted by the Weierstrass model for a given z0.
double omega_model(const EllipticCurveData& curve, std::complex<double> z0, double s);

} // namespace strgeo

#endif
