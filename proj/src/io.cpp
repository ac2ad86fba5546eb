#include "strgeo/io.hpp"
#include "strgeo/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

namespace strgeo {

namespace {

using nlohmann::json;
using cplx = std::complex<double>;

json cplx_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* quadrant_name(RegionLabel::Quadrant q)
{
    switch (q) {
    case RegionLabel::Quadrant::I: return "I";
    case RegionLabel::Quadrant::II: return "II";
    case RegionLabel::Quadrant::III: return "III";
    case RegionLabel::Quadrant::IV: return "IV";
    case RegionLabel::Quadrant::boundary: return "boundary";
    }
    return "?";
}

RegionLabel::Quadrant quadrant_from_name(const std::string& s)
{
    if (s == "I") return RegionLabel::Quadrant::I;
    if (s == "II") return RegionLabel::Quadrant::II;
    if (s == "III") return RegionLabel::Quadrant::III;
    if (s == "IV") return RegionLabel::Quadrant::IV;
    return RegionLabel::Quadrant::boundary;
}

const char* side_name(RegionLabel::Side s)
{
    switch (s) {
    case RegionLabel::Side::schwarzschild: return "schwarzschild";
    case RegionLabel::Side::anti_schwarzschild: return "anti_schwarzschild";
    case RegionLabel::Side::boundary: return "boundary";
    }
    return "?";
}

RegionLabel::Side side_from_name(const std::string& s)
{
    if (s == "schwarzschild") return RegionLabel::Side::schwarzschild;
    if (s == "anti_schwarzschild") return RegionLabel::Side::anti_schwarzschild;
    return RegionLabel::Side::boundary;
}

EventKind event_kind_from_name(const std::string& s)
{
    for (EventKind k : {EventKind::horizon, EventKind::scri_plus, EventKind::scri_minus, EventKind::singularity,
                        EventKind::chart_switch, EventKind::turning_point})
        if (event_kind_name(k) == s)
            return k;
    throw domain_error("unknown event kind: " + s);
}

} // namespace

void validate_config(const RunConfig& cfg)
{
    if (!(cfg.tol > 0.0 && cfg.tol <= 1e-4))
        throw domain_error("config: tol must lie in (0, 1e-4]");
    if (cfg.command == "classify" || cfg.command == "residues" || cfg.command == "precession") {
        if (!(cfg.H > 0.0))
            throw domain_error("config: H must be positive for elliptic commands");
    }
    if (cfg.command == "trace" || cfg.command == "precession") {
        const double h2 = cfg.H2 < 0.0 ? cfg.H : cfg.H2;
        if (!(h2 >= 0.0))
            throw domain_error("config: H2 must be non-negative");
        if (!(cfg.span_lo <= 0.0 && cfg.span_hi >= 0.0 && cfg.span_lo < cfg.span_hi))
            throw domain_error("config: span must contain 0 with span_lo < span_hi");
    }
    if (cfg.command == "trace") {
        chart_from_name(cfg.chart); // throws on bad name
        if (cfg.start.size() != 2 && cfg.start.size() != 4)
            throw domain_error("config: start expects 2 or 4 comma-separated scalars");
        if (cfg.format != "json" && cfg.format != "csv")
            throw domain_error("config: format must be json or csv");
    }
    if (cfg.command == "residues" && cfg.epsilon != 1 && cfg.epsilon != -1)
        throw domain_error("config: epsilon must be +1 or -1");
    if (cfg.command == "atlas-check" && cfg.n < 1)
        throw domain_error("config: atlas-check requires n >= 1");
}

json config_to_json(const RunConfig& cfg)
{
    json j{{"command", cfg.command}, {"H", cfg.H},         {"U", cfg.U},
           {"H2", cfg.H2},           {"chart", cfg.chart}, {"start", cfg.start},
           {"span", {cfg.span_lo, cfg.span_hi}},           {"tol", cfg.tol},
           {"epsilon", cfg.epsilon}, {"direction", cfg.direction},
           {"format", cfg.format},   {"seed", cfg.seed},   {"n", cfg.n},
           {"physical_only", cfg.physical_only}};
    return j;
}

json wrap_report(const RunConfig& cfg, json data)
{
    return json{{"meta", {{"version", kVersion}, {"config", config_to_json(cfg)}}}, {"data", std::move(data)}};
}

json state_to_json(const StateR& st)
{
    return json{{"chart", std::string(chart_name(st.chart))},
                {"pos", {st.pos[0], st.pos[1]}},
                {"mom", {st.mom[0], st.mom[1]}},
                {"sheet", st.sheet},
                {"wbranch", st.wbranch == WBranch::principal ? "principal" : "lower"},
                {"mode", "real"}};
}

StateR state_from_json(const json& j)
{
    StateR st;
    st.chart = chart_from_name(j.at("chart").get<std::string>());
    st.pos = {j.at("pos").at(0).get<double>(), j.at("pos").at(1).get<double>()};
    st.mom = {j.at("mom").at(0).get<double>(), j.at("mom").at(1).get<double>()};
    st.sheet = j.at("sheet").get<int>();
    st.wbranch = j.at("wbranch").get<std::string>() == "lower" ? WBranch::lower : WBranch::principal;
    return st;
}

json region_to_json(const RegionLabel& r)
{
    return json{{"quadrant", quadrant_name(r.quadrant)}, {"sheet", r.sheet}, {"side", side_name(r.side)}};
}

RegionLabel region_from_json(const json& j)
{
    RegionLabel r;
    r.quadrant = quadrant_from_name(j.at("quadrant").get<std::string>());
    r.sheet = j.at("sheet").get<int>();
    r.side = side_from_name(j.at("side").get<std::string>());
    return r;
}

json trajectory_to_json(const Trajectory& traj)
{
    json samples = json::array();
    for (const Sample& s : traj.samples)
        samples.push_back(json{{"s", s.s}, {"state", state_to_json(s.state)}, {"H_err", s.h_err}});
    json events = json::array();
    for (const Event& e : traj.events)
        events.push_back(
            json{{"s", e.s}, {"kind", std::string(event_kind_name(e.kind))}, {"region", region_to_json(e.region)}});
    return json{{"samples", samples},
                {"events", events},
                {"conserved", {{"H", traj.conserved.H}, {"U", traj.conserved.U}, {"H2", traj.conserved.H2}}},
                {"max_h_drift", traj.max_h_drift},
                {"max_u_drift", traj.max_u_drift}};
}

Trajectory trajectory_from_json(const json& j)
{
    Trajectory traj;
    for (const json& s : j.at("samples"))
        traj.samples.push_back({s.at("s").get<double>(), state_from_json(s.at("state")), s.at("H_err").get<double>()});
    for (const json& e : j.at("events"))
        traj.events.push_back({e.at("s").get<double>(), event_kind_from_name(e.at("kind").get<std::string>()),
                               region_from_json(e.at("region"))});
    traj.conserved = {j.at("conserved").at("H").get<double>(), j.at("conserved").at("U").get<double>(),
                      j.at("conserved").at("H2").get<double>()};
    traj.max_h_drift = j.at("max_h_drift").get<double>();
    traj.max_u_drift = j.at("max_u_drift").get<double>();
    return traj;
}

std::string trajectory_to_csv(const Trajectory& traj)
{
    std::string out = "s,chart,c1,c2,m1,m2,H_err\n";
    for (const Sample& s : traj.samples) {
        out += fmt17(s.s);
        out += ',';
        out += chart_name(s.state.chart);
        for (double v : {s.state.pos[0], s.state.pos[1], s.state.mom[0], s.state.mom[1], s.h_err}) {
            out += ',';
            out += fmt17(v);
        }
        out += '\n';
    }
    return out;
}

json classify_to_json(const EllipticCurveData& curve)
{
    json roots = json::array();
    for (const cplx& e : curve.roots.e)
        roots.push_back(cplx_to_json(e));
    json j{{"H", curve.H},
           {"U", curve.U},
           {"g2", curve.inv.g2},
           {"g3", curve.inv.g3},
           {"discriminant", curve.discriminant},
           {"discriminant_16", curve.roots.discriminant},
           {"case", std::string(curve_case_name(curve.kase))},
           {"roots", roots},
           {"n_real_roots", curve.roots.n_real},
           {"landmarks", {{"scri", kScriOmega}, {"horizon", kHorizonOmega}, {"singularity", "omega=inf"}}}};
    if (curve.lattice) {
        j["lattice"] = {{"omega1", cplx_to_json(curve.lattice->omega1)}, {"omega3", cplx_to_json(curve.lattice->omega3)}};
    }
    if (curve.kase != CurveCase::degenerate)
        j["segments"] = segments_to_json(segments(curve));
    return j;
}

json segments_to_json(const SegmentTable& table)
{
    json arr = json::array();
    for (const Segment& s : table.segments)
        arr.push_back(json{{"label", std::string(1, s.label)},
                           {"lo", std::isfinite(s.lo) ? json(s.lo) : json("-inf")},
                           {"hi", std::isfinite(s.hi) ? json(s.hi) : json("inf")},
                           {"parameter", s.real_parameter ? "real" : "imaginary"},
                           {"landmarks", s.landmarks}});
    return arr;
}

json residues_to_json(const ResidueReport& rr, const PeriodCheck& pc)
{
    return json{{"epsilon", rr.epsilon},
                {"z1", cplx_to_json(rr.z1)},
                {"z2", cplx_to_json(rr.z2)},
                {"omega_dz", {{"single_closed", cplx_to_json(rr.single_closed)},
                              {"double_closed", cplx_to_json(rr.double_closed)},
                              {"single_contour", cplx_to_json(rr.single_contour)},
                              {"double_contour", cplx_to_json(rr.double_contour)}}},
                {"du", {{"single", cplx_to_json(rr.du_single)}, {"double", cplx_to_json(rr.du_double)}}},
                {"u_period", {{"value", cplx_to_json(pc.period)},
                              {"deviation_from_4pi_i", pc.period_err},
                              {"both_poles", cplx_to_json(pc.period_both_poles)},
                              {"exp_u_half_roundtrip_err", pc.exp_roundtrip_err}}}};
}

RationalFlag nearest_rational(double x, double tol, long q_max)
{
    RationalFlag best;
    best.err = std::numeric_limits<double>::infinity();
    for (long q = 1; q <= q_max; ++q) {
        const long p = std::lround(x * double(q));
        const double err = std::abs(x - double(p) / double(q));
        if (err < best.err) {
            best = {err <= tol, p, q, err};
            if (best.flagged)
                break;
        }
    }
    return best;
}

json precession_to_json(const std::vector<Pass>& passes, double rational_tol)
{
    json parr = json::array();
    for (const Pass& p : passes)
        parr.push_back(json{{"s_enter", p.s_enter},
                            {"s_exit", p.s_exit},
                            {"theta_enter", p.theta_enter},
                            {"theta_exit", p.theta_exit}});
    json dth = json::array();
    json flags = json::array();
    for (std::size_t i = 1; i < passes.size(); ++i) {
        const double d = passes[i].theta_enter - passes[i - 1].theta_enter;
        dth.push_back(d);
        const RationalFlag rf = nearest_rational(d / (2.0 * M_PI), rational_tol);
        flags.push_back(json{{"delta_theta_over_2pi", d / (2.0 * M_PI)},
                             {"flagged", rf.flagged},
                             {"p", rf.p},
                             {"q", rf.q},
                             {"err", rf.err}});
    }
    return json{{"passes", parr}, {"delta_theta", dth}, {"rational", flags}};
}

AtlasCheckReport run_atlas_check(int n, std::uint64_t seed, bool inject_fault)
{
    if (n < 1)
        throw domain_error("atlas-check: n must be >= 1");
    AtlasCheckReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> mom(-2.0, 2.0);
    std::uniform_real_distribution<double> upos(-3.0, 3.0);

    for (int i = 0; i < n; ++i) {
        // r drawn over exterior, horizon band, interior, and anti regions
        double r;
        const double pick = unit(rng);
        if (pick < 0.35)
            r = std::exp(std::log(1.3) + unit(rng) * (std::log(30.0) - std::log(1.3)));
        else if (pick < 0.55)
            r = 0.8 + 0.4 * unit(rng);
        else if (pick < 0.8)
            r = 0.05 + 0.7 * unit(rng);
        else
            r = -std::exp(std::log(0.05) + unit(rng) * (std::log(30.0) - std::log(0.05)));
        // keep clear of the horizon collar where the ef_adv/ef_ret overlap
        // degenerates and any chart expression loses digits to omega - 2/3
        if (std::abs(r - 1.0) < 1e-2)
            r = r >= 1.0 ? 1.0 + 1e-2 : 1.0 - 1e-2;
        if (std::abs(r) < 1e-3)
            r = 1e-3;

        StateR base{Chart::ef_adv, {upos(rng), 1.0 / r - 1.0 / 3.0}, {mom(rng), mom(rng)}};
        base.sheet = unit(rng) < 0.5 ? 1 : -1;
        const double h_base = hamiltonian(base);

        for (int c = 0; c < kChartCount; ++c) {
            const Chart target = static_cast<Chart>(c);
            StateR t;
            try {
                t = to_chart(base, target);
            } catch (const overlap_error&) {
                continue;
            }
            ++rep.checks;
            double h_t = hamiltonian(t);
            if (inject_fault && i == 0)
                h_t += 1e-5 * (1.0 + std::abs(h_t));
            const double herr = std::abs(h_t - h_base) / (1.0 + std::abs(h_base));
            rep.max_h_err = std::max(rep.max_h_err, herr);
            double rterr = 0.0;
            try {
                const StateR back = to_chart(t, Chart::ef_adv);
                const double scale = 1.0 + std::abs(base.pos[0]) + std::abs(base.mom[0]) + std::abs(base.mom[1]);
                rterr = (std::abs(back.pos[0] - base.pos[0]) + std::abs(back.pos[1] - base.pos[1]) +
                         std::abs(back.mom[0] - base.mom[0]) + std::abs(back.mom[1] - base.mom[1])) /
                        scale;
            } catch (const overlap_error&) {
            }
            rep.max_roundtrip_err = std::max(rep.max_roundtrip_err, rterr);
            if (herr > 1e-10 || rterr > 1e-9)
                ++rep.failures;
        }

        // momentum overlap relations among the KS-family charts (r > 0)
        if (r > 0.05 && std::abs(r - 1.0) > 1e-6) {
            try {
                const StateR xp = to_chart(base, Chart::xp);
                const StateR xq = to_chart(base, Chart::xq);
                const StateR ks = to_chart(base, Chart::ks);
                const double p = xp.pos[0], x = xp.pos[1], R = xp.mom[0], X = xp.mom[1];
                const double q = xq.pos[0], S = xq.mom[0], Y = xq.mom[1];
                const double P = ks.mom[0], Q = ks.mom[1];
                const double x3 = x * x * x, x2m = x * x - 1.0;
                const double mscale = 1.0 + std::abs(R) + std::abs(S) + std::abs(X) + std::abs(Y);
                double worst = std::abs(R + q * S / p) / mscale;
                worst = std::max(worst, std::abs(S + p * R / q) / mscale);
                if (std::abs(x2m) > 1e-3) {
                    worst = std::max(worst, std::abs(X - (Y + 2.0 * x3 * q * S / x2m)) / mscale);
                    worst = std::max(worst, std::abs(Y - (X + 2.0 * x3 * p * R / x2m)) / mscale);
                    worst = std::max(worst, std::abs(P - (R + X * x2m / (2.0 * x3 * p))) / mscale);
                    worst = std::max(worst, std::abs(Q - (S + Y * x2m / (2.0 * x3 * q))) / mscale);
                }
                rep.max_overlap_rel = std::max(rep.max_overlap_rel, worst);
                if (worst > 1e-10)
                    ++rep.failures;
            } catch (const overlap_error&) {
            }
        }
    }
    return rep;
}

json atlas_check_to_json(const AtlasCheckReport& rep)
{
    return json{{"checks", rep.checks},
                {"failures", rep.failures},
                {"max_h_err", rep.max_h_err},
                {"max_roundtrip_err", rep.max_roundtrip_err},
                {"max_overlap_rel", rep.max_overlap_rel}};
}

void emit(const RunConfig& cfg, const std::string& payload)
{
    if (cfg.out_path.empty()) {
        std::cout << payload;
        if (!payload.empty() && payload.back() != '\n')
            std::cout << '\n';
        return;
    }
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f)
        throw domain_error("cannot open output file: " + cfg.out_path);
    f << payload;
}

} // namespace strgeo
