#ifndef STRGEO_ATLAS_HPP
#define STRGEO_ATLAS_HPP

#include "strgeo/errors.hpp"
#include "strgeo/lambert.hpp"

#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <type_traits>

namespace strgeo {

// Charts of the extended string surface. Coordinates / momenta:
//   schw   (t, r)      (T, R)
//   ef_adv (u, omega)  (U, Omega)
//   ef_ret (v, omega)  (V, Omega)
//   ks     (p, q)      (P, Q)
//   xu     (u, x)      (U, X)        x^2 = r
//   xv     (v, x)      (V, X)
//   xt     (t, x)      (T, X)
//   yp     (p, y)      (R, Y)        x^2 y = 1
//   yq     (q, y)      (S, Y)
//   xp     (p, x)      (R, X)
//   xq     (q, x)      (S, Y)
enum class Chart { schw, ef_adv, ef_ret, ks, xu, xv, xt, yp, yq, xp, xq };

constexpr int kChartCount = 11;

std::string_view chart_name(Chart c);
Chart chart_from_name(std::string_view name);

template <typename S>
inline constexpr bool is_complex_scalar = !std::is_floating_point_v<S>;

/// A point of the cotangent bundle in one chart: two coordinates and the two
/// components of the canonical one-form in that chart. `sheet` tracks the
/// branch of the double cover r = x^2 (meaningful where x or W is implicit),
/// `wbranch` the Lambert-W branch used by KS-family charts, and `aux_x`
/// carries x explicitly for KS states in complex mode, where the real-valued
/// W is unavailable.
template <typename S>
struct CotangentState {
    Chart chart = Chart::ef_adv;
    std::array<S, 2> pos{};
    std::array<S, 2> mom{};
    int sheet = 1;
    WBranch wbranch = WBranch::principal;
    std::optional<S> aux_x{};
};

using StateR = CotangentState<double>;
using StateC = CotangentState<std::complex<double>>;

/// Quadrant labels follow the Kruskal diamond: I (p>0, q>0) exterior,
/// II (p>0, q<0) black-hole interior, III (p<0, q<0), IV (p<0, q>0)
/// white-hole interior.
struct RegionLabel {
    enum class Quadrant { I, II, III, IV, boundary } quadrant = Quadrant::boundary;
    int sheet = 0; // +1 / -1, 0 on the x = 0 boundary
    enum class Side { schwarzschild, anti_schwarzschild, boundary } side = Side::boundary;
};

// --- scalar helpers -------------------------------------------------------

// Q(omega) = omega^3/2 - omega/6 - 1/27 in factored form, so the horizon and
// scri roots are exact.
template <typename S>
S metric_q(const S& w)
{
    return 0.5 * (w - 2.0 / 3.0) * (w + 1.0 / 3.0) * (w + 1.0 / 3.0);
}

template <typename S>
S metric_q_prime(const S& w)
{
    return (3.0 * w - 1.0) * (3.0 * w + 1.0) / 6.0;
}

// log|w| for real scalars; the principal value of log(w^2)/2 in complex mode.
inline double ln_abs(double w) { return std::log(std::abs(w)); }
inline std::complex<double> ln_abs(const std::complex<double>& w) { return 0.5 * std::log(w * w); }

// --- chart queries ---------------------------------------------------------

/// Validity predicate of the state's chart at its position (and branch data).
template <typename S>
bool chart_valid(const CotangentState<S>& st);

/// The closed-form geodesic Hamiltonian of the state's chart; equals
/// (1/2) g^{ab} p_a p_b. Throws validity_error off the chart domain.
template <typename S>
S hamiltonian(const CotangentState<S>& st);

/// Covariant metric components {g11, g12, g22} at the state's position.
/// Throws validity_error where the coordinate metric is singular (even if
/// the Hamiltonian flow extends there, e.g. x = 0 in the x charts).
template <typename S>
std::array<S, 3> chart_metric(const CotangentState<S>& st);

/// (1/2) g^{ab} p_a p_b computed from chart_metric; test hook for the uniform
/// Hamiltonian convention.
template <typename S>
S hamiltonian_metric_form(const CotangentState<S>& st);

/// Hamilton's equations in the state's chart: d/ds (pos0, pos1, mom0, mom1).
template <typename S>
std::array<S, 4> flow_rhs(const CotangentState<S>& st);

/// Area radius r (r = x^2 when on the double cover); +/-inf at scri.
double state_r(const StateR& st);

/// omega = 1/r - 1/3; +/-inf at the singularity.
double state_omega(const StateR& st);

/// The conserved momentum conjugate to u, read out of any chart.
double state_conserved_u(const StateR& st);

/// Transition map between charts: positions by the coordinate relations and
/// momenta by the cotangent transform. Routes through intermediate charts
/// when source and target are not directly related; throws overlap_error if
/// the point is outside the target (or every intermediate) domain.
template <typename S>
CotangentState<S> to_chart(const CotangentState<S>& st, Chart target);

/// Region of the extended manifold the state sits in.
RegionLabel classify_region(const StateR& st);

// --- complex surface -------------------------------------------------------

/// Defect of the Kruskal surface equation pq = (x^2-1) e^{x^2-1}.
template <typename S>
S surface_residual(const S& p, const S& q, const S& x)
{
    return p * q - (x * x - 1.0) * exp(x * x - 1.0);
}

/// The differential constraint p dq + q dp - 2 x^3 e^{x^2-1} dx evaluated on a
/// tangent candidate (dp, dq, dx).
template <typename S>
S surface_tangency_residual(const S& p, const S& q, const S& x, const S& dp, const S& dq, const S& dx)
{
    return p * dq + q * dp - 2.0 * x * x * x * exp(x * x - 1.0) * dx;
}

} // namespace strgeo

#endif
