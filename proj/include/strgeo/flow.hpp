#ifndef STRGEO_FLOW_HPP
#define STRGEO_FLOW_HPP

#include "strgeo/atlas.hpp"

#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace strgeo {

constexpr double kScriOmega = -1.0 / 3.0;
constexpr double kHorizonOmega = 2.0 / 3.0;

/// Flow invariants: string energy H, the momentum U conjugate to u, and the
/// sphere energy H2. A null geodesic of the product space has H = H2.
struct ConservedSet {
    double H = 0.0;
    double U = 0.0;
    double H2 = 0.0;
};

/// Great circle on the unit sphere traced at uniform rate sqrt(2 H2):
/// x(s) = cos(theta0 + rate s) a + sin(theta0 + rate s) b, n = a x b.
struct SphereGeodesic {
    std::array<double, 3> n{0.0, 0.0, 1.0};
    std::array<double, 3> a{1.0, 0.0, 0.0};
    std::array<double, 3> b{0.0, 1.0, 0.0};
    double theta0 = 0.0;
    double rate = 0.0;

    double theta(double s) const { return theta0 + rate * s; }
};

enum class EventKind { horizon, scri_plus, scri_minus, singularity, chart_switch, turning_point };

std::string_view event_kind_name(EventKind k);

struct Event {
    double s = 0.0;
    EventKind kind = EventKind::chart_switch;
    RegionLabel region{};
};

struct Sample {
    double s = 0.0;
    StateR state{};
    double h_err = 0.0; // |H(state) - conserved.H|
};

struct Trajectory {
    std::vector<Sample> samples; // strictly increasing in s
    std::vector<Event> events;   // ordered in s
    ConservedSet conserved{};
    double max_h_drift = 0.0;
    double max_u_drift = 0.0;
};

/// Chart-switch thresholds. Exit bands sit 10% above the entry bands so the
/// policy cannot thrash on the boundary.
struct FlowConfig {
    double x_enter_r = 0.40;     // switch into an x chart below this r
    double x_exit_r = 0.44;      // and leave it above this r
    double horizon_band = 0.20;  // switch into KS when |r-1| is below this
    double horizon_exit = 0.22;  // and leave KS when |r-1| exceeds this
    double flip_factor = 25.0;   // EF family flip when |Omega| > flip_factor * momentum scale
};

struct IntegrateOptions {
    double tol = 1e-10;
    std::size_t max_steps = 50'000'000;
    bool store_samples = true;
    std::size_t sample_stride = 1;
    bool physical_only = false; // stop at the first scri crossing
    FlowConfig flow{};
};

/// Complete the second momentum component of `start` so that the string
/// Hamiltonian equals H2 (null pairing with the sphere factor). When the
/// completion is quadratic, `direction` (+1/-1) selects the root by the sign
/// of the radial velocity it produces; ties fall back to the algebraically
/// larger root for +1. Throws infeasible_error when no real completion
/// exists.
std::tuple<ConservedSet, SphereGeodesic, StateR> init_null(double H2, const StateR& start, int direction);

/// Sphere geodesic with a given plane normal.
SphereGeodesic make_sphere_geodesic(double H2, const std::array<double, 3>& n, double theta0);

std::array<double, 3> sphere_point(const SphereGeodesic& geo, double s);

/// Chart the integrator should be using at this state: x charts around the
/// singularity, KS across the horizon, EF charts elsewhere, with a family
/// flip when the current EF momentum blows up relative to the other family.
Chart switch_policy(const StateR& st, const FlowConfig& cfg = {});

/// Adaptive Dormand-Prince integration of the chart Hamiltonian flow over
/// s_span (must contain 0; `start` sits at s = 0). Events are located by
/// sign-change bracketing and bisection on a dense single-step evaluation.
Trajectory integrate(const StateR& start, const ConservedSet& conserved, std::pair<double, double> s_span,
                     const IntegrateOptions& opts = {});

/// One accepted Dormand-Prince step of size h (no error control); test hook
/// and dense-evaluation primitive.
StateR flow_step(const StateR& st, double h);

struct Pass {
    double s_enter = 0.0;
    double s_exit = 0.0;
    double theta_enter = 0.0;
    double theta_exit = 0.0;
};

/// Maximal accessible-region passes (omega in (-1/3, 2/3), sheet +1) with the
/// unwrapped sphere angle at entry and exit.
std::vector<Pass> precession(const Trajectory& traj, const SphereGeodesic& geo);

struct ProbeReport {
    double reached_forward = 0.0;
    double reached_backward = 0.0;
    bool obstructed = false;
    std::string obstruction;
    double max_h_drift = 0.0;
    double max_u_drift = 0.0;
    int singularity_crossings = 0;
};

/// Integrate to |s| = S_max in both directions and report drift and any
/// obstruction (the extended flow is geodesically complete, so an
/// obstruction on valid input signals a bug).
ProbeReport completeness_probe(const StateR& start, const ConservedSet& conserved, double S_max, double tol);

} // namespace strgeo

#endif
