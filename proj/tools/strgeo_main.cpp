// Command-line frontend: trace geodesics, classify curves, compute residues
// and precession tables, and run the randomized atlas consistency sweep.

#include "strgeo/errors.hpp"
#include "strgeo/io.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

using namespace strgeo;

namespace {

int momentum_sign_for_u(Chart c)
{
    switch (c) {
    case Chart::ef_adv:
    case Chart::xu:
    case Chart::schw:
    case Chart::xt: return 1;
    case Chart::ef_ret:
    case Chart::xv: return -1;
    default: return 0;
    }
}

int cmd_trace(RunConfig& cfg)
{
    const Chart chart = chart_from_name(cfg.chart);
    const double H2 = cfg.H2 < 0.0 ? cfg.H : cfg.H2;

    StateR st;
    st.chart = chart;
    st.pos = {cfg.start[0], cfg.start[1]};

    ConservedSet cons;
    SphereGeodesic geo;
    if (cfg.start.size() == 4) {
        st.mom = {cfg.start[2], cfg.start[3]};
        if (!chart_valid(st))
            throw validity_error("trace: start state invalid in chart " + cfg.chart);
        const double h = hamiltonian(st);
        if (std::abs(h - H2) > 1e-8 * (1.0 + std::abs(h)))
            throw domain_error("trace: full start state has H_Sigma != H2 (not a null pairing)");
        cons = {h, state_conserved_u(st), H2};
        geo = make_sphere_geodesic(H2, {0.0, 0.0, 1.0}, 0.0);
    } else {
        const int sgn = momentum_sign_for_u(chart);
        if (sgn == 0)
            throw domain_error("trace: 2-scalar start needs a chart whose first momentum is +-U (ef_*, xu, xv, schw, xt)");
        st.mom = {sgn * cfg.U, 0.0};
        std::tie(cons, geo, st) = init_null(H2, st, cfg.direction);
    }

    IntegrateOptions opts;
    opts.tol = cfg.tol;
    opts.max_steps = cfg.max_steps;
    opts.physical_only = cfg.physical_only;
    const Trajectory traj = integrate(st, cons, {cfg.span_lo, cfg.span_hi}, opts);

    std::string payload;
    if (cfg.format == "csv")
        payload = trajectory_to_csv(traj);
    else
        payload = wrap_report(cfg, trajectory_to_json(traj)).dump(2);
    emit(cfg, payload);

    std::ostream& sum = cfg.out_path.empty() ? std::cerr : std::cout;
    sum << "samples " << traj.samples.size() << ", events " << traj.events.size() << ", |H drift| "
        << traj.max_h_drift << ", |U drift| " << traj.max_u_drift << ", |H_Sigma - H2| "
        << std::abs(traj.conserved.H - traj.conserved.H2) << "\n";
    return 0;
}

int cmd_classify(RunConfig& cfg)
{
    const EllipticCurveData curve = curve_from_invariants(cfg.H, cfg.U);
    emit(cfg, wrap_report(cfg, classify_to_json(curve)).dump(2));
    return 0;
}

int cmd_residues(RunConfig& cfg)
{
    const EllipticCurveData curve = curve_from_invariants(cfg.H, cfg.U);
    if (curve.kase == CurveCase::degenerate)
        throw domain_error("residues: degenerate invariants (U(8H-27U^2) = 0)");
    const ResidueReport rr = du_residues(curve, cfg.epsilon);
    const PeriodCheck pc = u_period_check(curve, cfg.epsilon);
    emit(cfg, wrap_report(cfg, residues_to_json(rr, pc)).dump(2));
    return 0;
}

int cmd_precession(RunConfig& cfg)
{
    const EllipticCurveData curve = curve_from_invariants(cfg.H, cfg.U);
    if (curve.kase == CurveCase::degenerate)
        throw domain_error("precession: degenerate invariants");
    const double H2 = cfg.H2 < 0.0 ? cfg.H : cfg.H2;

    double omega0;
    if (curve.kase == CurveCase::case1_pos)
        omega0 = 0.5 * (curve.roots.e[0].real() + curve.roots.e[1].real()); // midpoint of B
    else
        omega0 = 0.0; // inside D, outside the horizon
    StateR st{Chart::ef_adv, {0.0, omega0}, {cfg.U, 0.0}};
    auto [cons, geo, start] = init_null(H2, st, cfg.direction);

    IntegrateOptions opts;
    opts.tol = cfg.tol;
    opts.max_steps = cfg.max_steps;
    const Trajectory traj = integrate(start, cons, {cfg.span_lo, cfg.span_hi}, opts);
    const std::vector<Pass> passes = precession(traj, geo);
    emit(cfg, wrap_report(cfg, precession_to_json(passes, cfg.rational_tol)).dump(2));
    return 0;
}

int cmd_atlas_check(RunConfig& cfg)
{
    const AtlasCheckReport rep = run_atlas_check(cfg.n, cfg.seed, cfg.inject_fault);
    emit(cfg, wrap_report(cfg, atlas_check_to_json(rep)).dump(2));
    return rep.failures > 0 ? 1 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"string-geometry geodesic toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env = std::getenv("STRING_GEODESICS_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0)
            cfg.tol = v;
    }

    std::vector<double> span_vec;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--tol", cfg.tol, "integration / check tolerance")->capture_default_str();
        sub->add_option("--out", cfg.out_path, "output file (default: stdout)");
        sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    };
    auto add_span = [&](CLI::App* sub) {
        sub->add_option("--span", span_vec, "affine span lo,hi (use --span=lo,hi; must contain 0)")
            ->delimiter(',')
            ->expected(2);
    };

    CLI::App* trace = app.add_subcommand("trace", "integrate a null geodesic and write samples/events");
    trace->add_option("--H", cfg.H, "string energy (alias for --H2 when that is omitted)")->capture_default_str();
    trace->add_option("--U", cfg.U, "conserved momentum conjugate to u")->capture_default_str();
    trace->add_option("--H2", cfg.H2, "sphere energy (null pairing H_Sigma = H2)");
    trace->add_option("--chart", cfg.chart, "start chart name")->capture_default_str();
    trace->add_option("--start", cfg.start, "start coordinates c1,c2 or c1,c2,m1,m2")->delimiter(',')->expected(2, 4);
    add_span(trace);
    trace->add_option("--direction", cfg.direction, "+1/-1 root choice in the momentum completion")->capture_default_str();
    trace->add_option("--format", cfg.format, "json | csv")->capture_default_str();
    trace->add_option("--max-steps", cfg.max_steps, "step budget")->capture_default_str();
    trace->add_flag("--physical-only", cfg.physical_only, "stop at the first scri crossing");
    add_common(trace);

    CLI::App* classify = app.add_subcommand("classify", "discriminant, case, roots, segments");
    classify->add_option("--H", cfg.H, "string energy")->required();
    classify->add_option("--U", cfg.U, "conserved u-momentum")->required();
    add_common(classify);

    CLI::App* residues = app.add_subcommand("residues", "du residues, u-period, e^{u/2} round trip");
    residues->add_option("--H", cfg.H, "string energy")->required();
    residues->add_option("--U", cfg.U, "conserved u-momentum")->required();
    residues->add_option("--epsilon", cfg.epsilon, "+1/-1 branch")->capture_default_str();
    add_common(residues);

    CLI::App* prec = app.add_subcommand("precession", "accessible-region passes and delta-theta table");
    prec->add_option("--H", cfg.H, "string energy")->required();
    prec->add_option("--U", cfg.U, "conserved u-momentum")->required();
    prec->add_option("--H2", cfg.H2, "sphere energy (default: H)");
    add_span(prec);
    prec->add_option("--direction", cfg.direction, "+1/-1 momentum completion root")->capture_default_str();
    prec->add_option("--rational-tol", cfg.rational_tol, "tolerance for flagging rational delta-theta/2pi")
        ->capture_default_str();
    prec->add_option("--max-steps", cfg.max_steps, "step budget")->capture_default_str();
    add_common(prec);

    CLI::App* atlas = app.add_subcommand("atlas-check", "randomized chart-overlap consistency sweep");
    atlas->add_option("--n", cfg.n, "number of random base points")->capture_default_str();
    atlas->add_flag("--inject-fault", cfg.inject_fault, "perturb one check (harness sanity; must fail)");
    add_common(atlas);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (span_vec.size() == 2) {
        cfg.span_lo = span_vec[0];
        cfg.span_hi = span_vec[1];
    } else if (prec->parsed()) {
        cfg.span_lo = 0.0;
        cfg.span_hi = 80.0; // several string periods
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        validate_config(cfg);
        if (trace->parsed())
            return cmd_trace(cfg);
        if (classify->parsed())
            return cmd_classify(cfg);
        if (residues->parsed())
            return cmd_residues(cfg);
        if (prec->parsed())
            return cmd_precession(cfg);
        if (atlas->parsed())
            return cmd_atlas_check(cfg);
        return 2;
    } catch (const integration_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const validity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
