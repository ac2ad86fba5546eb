#include "strgeo/elliptic.hpp"
#include "strgeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace strgeo {

namespace {

using cplx = std::complex<double>;

constexpr double kScri = -1.0 / 3.0;
constexpr double kHorizon = 2.0 / 3.0;
constexpr int kContourNodes = 256;
// Fraction of the shortest lattice generator used as contour radius. Radii
// near 1e-2 leave the double-pole quadrature at the 1e-8 level; 3e-2 keeps
// it around 1e-10 while staying far inside the neighbouring cells.
constexpr double kContourRadiusFactor = 0.03;

double degeneracy_measure(double H, double U)
{
    return std::abs(U) * std::abs(8.0 * H - 27.0 * U * U) / (1.0 + H);
}

// p is real and strictly decreasing from +inf to p(omega1) on (0, omega1].
// Invert p(t) = target by bisection plus Newton polish.
double invert_p_real(const WeierstrassP& wp, double target)
{
    const double w1 = wp.lattice().omega1.real();
    double lo = 1e-6 * w1, hi = w1;
    if (wp(cplx(lo, 0.0)).p.real() < target)
        throw domain_error("invert_p_real: target above the pole branch");
    if (wp(cplx(hi, 0.0)).p.real() > target)
        throw domain_error("invert_p_real: target below p(omega1)");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (wp(cplx(mid, 0.0)).p.real() > target ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const WeierstrassValue v = wp(cplx(t, 0.0));
        const double dp = v.dp.real();
        if (dp == 0.0)
            break;
        t -= (v.p.real() - target) / dp;
    }
    return t;
}

// Case 1 only: p(omega3 + t) is real and increases from e1 to e2 on [0, omega1].
double invert_p_shifted(const WeierstrassP& wp, double target)
{
    const double w1 = wp.lattice().omega1.real();
    const cplx w3 = wp.lattice().omega3;
    double lo = 0.0, hi = w1;
    if (wp(w3 + 1e-12).p.real() > target || wp(w3 + cplx(w1, 0.0)).p.real() < target)
        throw domain_error("invert_p_shifted: target not in [e1, e2]");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (wp(w3 + cplx(mid, 0.0)).p.real() < target ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const WeierstrassValue v = wp(w3 + cplx(t, 0.0));
        const double dp = v.dp.real();
        if (dp == 0.0)
            break;
        t -= (v.p.real() - target) / dp;
    }
    return t;
}

// z with p(z) = target (on the component that carries it) and p'(z) matching
// the sign of dp_target; p being even, z -> -z flips the branch.
cplx locate_on_curve(const EllipticCurveData& curve, const WeierstrassP& wp, double target, double dp_target)
{
    cplx z;
    if (curve.kase == CurveCase::case1_pos && target <= curve.roots.e[1].real() + 1e-14 &&
        target >= curve.roots.e[0].real() - 1e-14) {
        z = wp.lattice().omega3 + invert_p_shifted(wp, target);
    } else {
        z = cplx(invert_p_real(wp, target), 0.0);
    }
    const double slope = wp(z).dp.real();
    if (slope * dp_target < 0.0)
        z = -z;
    return z;
}

// The one-form f(z) dz = Omega dz on branch epsilon:
// f = -sqrt(8H) eps / (eps sqrt(2U^2/H) + p'(z)).
//
// Near both poles c + p' vanishes, so the direct quotient loses the digits
// the contour quadrature needs. Since c^2 = q(-1/3) and p'^2 = q(p), the
// denominator factors exactly: c^2 - p'^2 = -4 (p + 1/3)^2 (p - 2/3), giving
// the cancellation-free form f = pref (c - p') / (c^2 - p'^2).
struct OmegaForm {
    double H;
    double c; // eps sqrt(2U^2/H)
    double pref;
    const WeierstrassP* wp;

    cplx operator()(cplx z) const
    {
        const WeierstrassValue v = (*wp)(z);
        const cplx sum = c + v.dp, diff = c - v.dp;
        if (std::abs(diff) <= std::abs(sum))
            return pref / sum;
        const cplx w13 = v.p + 1.0 / 3.0;
        return pref * diff / (-4.0 * w13 * w13 * (v.p - 2.0 / 3.0));
    }
};

OmegaForm omega_form(const EllipticCurveData& curve, int eps, const WeierstrassP& wp)
{
    const double c = eps * std::sqrt(2.0 * curve.U * curve.U / curve.H);
    return {curve.H, c, -eps * std::sqrt(8.0 * curve.H), &wp};
}

cplx contour_residue(const OmegaForm& f, cplx center, double rho)
{
    cplx acc = 0.0;
    for (int j = 0; j < kContourNodes; ++j) {
        const double th = 2.0 * M_PI * j / kContourNodes;
        const cplx e(std::cos(th), std::sin(th));
        acc += f(center + rho * e) * e;
    }
    return acc * (rho / double(kContourNodes));
}

} // namespace

std::string_view curve_case_name(CurveCase c)
{
    switch (c) {
    case CurveCase::case1_pos: return "case1_pos";
    case CurveCase::case2_neg: return "case2_neg";
    case CurveCase::degenerate: return "degenerate";
    }
    return "?";
}

EllipticCurveData curve_from_invariants(double H, double U)
{
    if (!(H > 0.0))
        throw domain_error("curve_from_invariants: requires H > 0");
    EllipticCurveData out;
    out.H = H;
    out.U = U;
    out.inv = {4.0 / 3.0, 8.0 / 27.0 - 2.0 * U * U / H};
    out.roots = cubic_roots(out.inv);
    out.discriminant = 64.0 * U * U * (8.0 * H - 27.0 * U * U) / (H * H);
    if (degeneracy_measure(H, U) <= 1e-12) {
        out.kase = CurveCase::degenerate;
    } else {
        out.kase = out.discriminant > 0.0 ? CurveCase::case1_pos : CurveCase::case2_neg;
        out.lattice = half_periods(out.inv);
    }
    return out;
}

const Segment& SegmentTable::containing(double omega) const
{
    for (const Segment& s : segments)
        if (omega >= s.lo && omega <= s.hi)
            return s;
    throw domain_error("SegmentTable: omega not covered");
}

SegmentTable segments(const EllipticCurveData& curve)
{
    if (curve.kase == CurveCase::degenerate)
        throw degenerate_error("segments: degenerate curve");
    const double inf = std::numeric_limits<double>::infinity();
    SegmentTable t;
    if (curve.kase == CurveCase::case1_pos) {
        const double e1 = curve.roots.e[0].real(), e2 = curve.roots.e[1].real(), e3 = curve.roots.e[2].real();
        t.segments = {{'A', -inf, e1, false, {}},
                      {'B', e1, e2, true, {"scri"}},
                      {'C', e2, e3, false, {}},
                      {'D', e3, inf, true, {"horizon", "singularity"}}};
    } else {
        const double e1 = curve.roots.e[0].real();
        t.segments = {{'A', -inf, e1, false, {}},
                      {'D', e1, inf, true, {"scri", "horizon", "singularity"}}};
    }
    return t;
}

ResidueReport du_residues(const EllipticCurveData& curve, int epsilon)
{
    if (curve.kase == CurveCase::degenerate)
        throw degenerate_error("du_residues: degenerate curve");
    if (!(curve.H > 0.0))
        throw domain_error("du_residues: requires H > 0");
    if (epsilon != 1 && epsilon != -1)
        throw domain_error("du_residues: epsilon must be +-1");

    const WeierstrassP wp(curve.inv);
    const double c = epsilon * std::sqrt(2.0 * curve.U * curve.U / curve.H);

    ResidueReport rep;
    rep.epsilon = epsilon;
    rep.z1 = locate_on_curve(curve, wp, kHorizon, -c);
    rep.z2 = locate_on_curve(curve, wp, kScri, -c);

    // Both poles must sit on the branch p' = -c.
    const double branch_tol = 1e-6 * (1.0 + std::abs(c));
    if (std::abs(wp(rep.z1).dp.real() + c) > branch_tol || std::abs(wp(rep.z2).dp.real() + c) > branch_tol)
        throw branch_error("du_residues: located pole does not lie on the requested epsilon branch");

    const double s2h = std::sqrt(2.0 * curve.H);
    rep.single_closed = cplx(-epsilon * s2h, 0.0);
    rep.double_closed = cplx(epsilon * s2h, 0.0);

    const OmegaForm f = omega_form(curve, epsilon, wp);
    const double gmin = std::min(std::abs(wp.lattice().gen1()), std::abs(wp.lattice().gen3()));
    const double rho = kContourRadiusFactor * gmin;
    rep.single_contour = contour_residue(f, rep.z1, rho);
    rep.double_contour = contour_residue(f, rep.z2, rho);

    const double fac = -std::sqrt(2.0 / curve.H);
    rep.du_single = fac * rep.single_contour;
    rep.du_double = fac * rep.double_contour;
    return rep;
}

PeriodCheck u_period_check(const EllipticCurveData& curve, int epsilon)
{
    const ResidueReport rr = du_residues(curve, epsilon);
    const WeierstrassP wp(curve.inv);
    const OmegaForm f = omega_form(curve, epsilon, wp);
    const double fac = -std::sqrt(2.0 / curve.H);

    PeriodCheck out;
    out.epsilon = epsilon;

    // du around the single pole
    const double gmin = std::min(std::abs(wp.lattice().gen1()), std::abs(wp.lattice().gen3()));
    out.period = fac * 2.0 * M_PI * cplx(0.0, 1.0) * contour_residue(f, rr.z1, kContourRadiusFactor * gmin);
    const cplx four_pi_i(0.0, 4.0 * M_PI);
    out.period_err = std::min(std::abs(out.period - four_pi_i), std::abs(out.period + four_pi_i));
    out.exp_roundtrip_err = std::abs(std::exp(out.period / 2.0) - 1.0);

    // loop enclosing both poles: centre between them, radius checked against
    // all nearby lattice translates of either pole.
    const cplx mid = 0.5 * (rr.z1 + rr.z2);
    const double base = 0.5 * std::abs(rr.z1 - rr.z2);
    for (double factor : {1.35, 1.2, 1.1, 1.05}) {
        const double rho = base * factor;
        int inside = 0;
        bool clean = true;
        for (int m = -2; m <= 2 && clean; ++m)
            for (int n = -2; n <= 2 && clean; ++n) {
                const cplx shift = double(m) * wp.lattice().gen1() + double(n) * wp.lattice().gen3();
                for (const cplx& pole : {rr.z1 + shift, rr.z2 + shift, -rr.z1 + shift, -rr.z2 + shift}) {
                    const double d = std::abs(pole - mid);
                    if (std::abs(d - rho) < 0.02 * rho) {
                        clean = false;
                        break;
                    }
                    if (d < rho) {
                        const bool is_own = std::abs(pole - rr.z1) < 1e-9 || std::abs(pole - rr.z2) < 1e-9;
                        if (!is_own) {
                            clean = false;
                            break;
                        }
                        ++inside;
                    }
                }
            }
        if (clean && inside == 2) {
            cplx acc = 0.0;
            for (int j = 0; j < kContourNodes * 4; ++j) {
                const double th = 2.0 * M_PI * j / (kContourNodes * 4);
                const cplx e(std::cos(th), std::sin(th));
                acc += f(mid + rho * e) * e;
            }
            out.period_both_poles = fac * 2.0 * M_PI * cplx(0.0, 1.0) * acc * (rho / double(kContourNodes * 4));
            return out;
        }
    }
    // fallback: sum of the two individual loops
    out.period_both_poles =
        fac * 2.0 * M_PI * cplx(0.0, 1.0) * (contour_residue(f, rr.z1, kContourRadiusFactor * gmin) + contour_residue(f, rr.z2, kContourRadiusFactor * gmin));
    return out;
}

SexticData sextic_from_invariants(double H, double U)
{
    if (!(H > 0.0))
        throw domain_error("sextic_from_invariants: requires H > 0");
    SexticData out;
    out.H = H;
    out.U = U;
    out.coeffs = {2.0 * H, 0.0, -2.0 * H, 0.0, 0.0, 0.0, U * U};

    auto sextic = [&](cplx x) {
        const cplx x2 = x * x;
        return U * U * x2 * x2 * x2 - 2.0 * H * x2 + 2.0 * H;
    };
    auto sextic_d = [&](cplx x) {
        const cplx x2 = x * x;
        return 6.0 * U * U * x2 * x2 * x - 4.0 * H * x;
    };

    if (U == 0.0) {
        out.roots = {cplx(-1.0, 0.0), cplx(1.0, 0.0)};
    } else {
        // cubic in w = x^2: U^2 w^3 - 2H w + 2H = 0, rescaled to 4w^3 - g2 w - g3.
        const WeierstrassInvariants winv{8.0 * H / (U * U), -8.0 * H / (U * U)};
        const CubicRootSet ws = cubic_roots(winv);
        std::array<cplx, 3> wroots = ws.e;
        if (ws.multiple_root) {
            // the closed form splits a double root by ~cbrt(eps); at the
            // degeneracy 27U^2 = 8H the double root solves 3U^2 w^2 = 2H and
            // the simple one follows from the vanishing trace
            const double wd = std::sqrt(2.0 * H / (3.0 * U * U));
            wroots = {cplx(wd, 0.0), cplx(wd, 0.0), cplx(-2.0 * wd, 0.0)};
        }
        for (const cplx& w : wroots) {
            cplx x = std::sqrt(w);
            for (int it = 0; it < 4 && !ws.multiple_root; ++it) {
                const cplx d = sextic_d(x);
                if (std::abs(d) == 0.0)
                    break;
                x -= sextic(x) / d;
            }
            out.roots.push_back(x);
            out.roots.push_back(-x);
        }
    }

    const double scale = 1.0 + std::pow(2.0 * H / (1.0 + U * U), 1.0 / 6.0);
    double min_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.roots.size(); ++i)
        for (std::size_t j = i + 1; j < out.roots.size(); ++j)
            min_dist = std::min(min_dist, std::abs(out.roots[i] - out.roots[j]));
    // A relative defect of 1e-9 in U(8H-27U^2) already splits a double root by
    // ~1e-5 of the root scale, so separations below that are numerical noise.
    out.distinct = out.roots.size() == 6 && min_dist > 1e-5 * scale;

    out.paired = true;
    for (const cplx& x : out.roots) {
        double best = std::numeric_limits<double>::infinity();
        for (const cplx& y : out.roots)
            best = std::min(best, std::abs(x + y));
        if (best > 1e-9 * scale)
            out.paired = false;
    }
    return out;
}

CorrespondenceReport cubic_sextic_correspondence(const EllipticCurveData& curve, const SexticData& sextic,
                                                 int n_samples, std::uint64_t seed)
{
    if (curve.kase == CurveCase::degenerate || !sextic.distinct)
        throw degenerate_error("cubic_sextic_correspondence: degenerate input");
    if (curve.H != sextic.H || curve.U != sextic.U)
        throw domain_error("cubic_sextic_correspondence: mismatched (H, U)");

    CorrespondenceReport rep;
    const double H = curve.H, U = curve.U;

    auto qpoly = [&](cplx w) { return ((4.0 * w * w) - curve.inv.g2) * w - curve.inv.g3; };
    auto sx = [&](cplx x) {
        const cplx x2 = x * x;
        return U * U * x2 * x2 * x2 - 2.0 * H * x2 + 2.0 * H;
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-2.0, 2.0);
    for (int i = 0; i < n_samples; ++i) {
        cplx x(re(rng), re(rng));
        if (std::abs(x) < 0.1)
            x += cplx(0.5, 0.5);
        const cplx x2 = x * x;
        const cplx lhs = H * x2 * x2 * x2 * qpoly(1.0 / x2 - 1.0 / 3.0);
        const cplx rhs = 2.0 * sx(x);
        const double denom = std::abs(lhs) + std::abs(rhs) + 1.0;
        rep.max_identity_residual = std::max(rep.max_identity_residual, std::abs(lhs - rhs) / denom);
    }

    // sextic roots are +-(e_i + 1/3)^{-1/2}
    for (const cplx& e : curve.roots.e) {
        const cplx xs = 1.0 / std::sqrt(e + 1.0 / 3.0);
        for (const cplx& target : {xs, -xs}) {
            double best = std::numeric_limits<double>::infinity();
            for (const cplx& x : sextic.roots)
                best = std::min(best, std::abs(x - target));
            rep.max_root_mismatch = std::max(rep.max_root_mismatch, best);
        }
    }
    for (const cplx& x : sextic.roots)
        rep.max_cubic_residual = std::max(rep.max_cubic_residual, std::abs(qpoly(1.0 / (x * x) - 1.0 / 3.0)));

    rep.ok = rep.max_identity_residual <= 1e-10 && rep.max_root_mismatch <= 1e-8 && rep.max_cubic_residual <= 1e-9;
    if (!rep.ok)
        throw domain_error("cubic_sextic_correspondence: verification failed (implementation bug)");
    return rep;
}

std::complex<double> fit_z0(const EllipticCurveData& curve, double s_a, double omega_a, double domega_ds_a)
{
    if (curve.kase == CurveCase::degenerate)
        throw degenerate_error("fit_z0: degenerate curve");
    const WeierstrassP wp(curve.inv);
    const double dz_slope = domega_ds_a * std::sqrt(2.0 / curve.H); // d omega / dz
    const cplx z_star = locate_on_curve(curve, wp, omega_a, dz_slope);
    return cplx(s_a * std::sqrt(curve.H / 2.0), 0.0) - z_star;
}

double omega_model(const EllipticCurveData& curve, std::complex<double> z0, double s)
{
    const WeierstrassP wp(curve.inv);
    return wp(cplx(s * std::sqrt(curve.H / 2.0), 0.0) - z0).p.real();
}

} // namespace strgeo
