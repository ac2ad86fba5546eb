#ifndef STRGEO_IO_HPP
#define STRGEO_IO_HPP

#include "strgeo/elliptic.hpp"
#include "strgeo/flow.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace strgeo {

inline constexpr const char* kVersion = "0.1.0";

/// Configuration shared by the CLI subcommands.
struct RunConfig {
    std::string command;
    double H = 1.0;
    double U = 0.0;
    double H2 = -1.0; // -1: default to H
    std::string chart = "ef_adv";
    std::vector<double> start{}; // 2 scalars (position) or 4 (position+momentum)
    double span_lo = 0.0;
    double span_hi = 10.0;
    double tol = 1e-10;
    int epsilon = 1;
    int direction = 1;
    std::string format = "json"; // json | csv (trace samples only)
    std::string out_path{};      // empty: stdout
    std::uint64_t seed = 20240901;
    std::uint64_t max_steps = 50'000'000;
    bool physical_only = false;
    int n = 1000;
    bool inject_fault = false;
    double rational_tol = 1e-6;
};

/// Throws domain_error on invalid configuration (CLI exit code 2).
void validate_config(const RunConfig& cfg);

nlohmann::json config_to_json(const RunConfig& cfg);

/// {meta: {version, config}, data: ...}
nlohmann::json wrap_report(const RunConfig& cfg, nlohmann::json data);

nlohmann::json state_to_json(const StateR& st);
StateR state_from_json(const nlohmann::json& j);

nlohmann::json region_to_json(const RegionLabel& r);
RegionLabel region_from_json(const nlohmann::json& j);

nlohmann::json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);

/// Samples only: columns s, chart, c1, c2, m1, m2, H_err.
std::string trajectory_to_csv(const Trajectory& traj);

nlohmann::json classify_to_json(const EllipticCurveData& curve);
nlohmann::json segments_to_json(const SegmentTable& table);
nlohmann::json residues_to_json(const ResidueReport& rr, const PeriodCheck& pc);

struct RationalFlag {
    bool flagged = false;
    long p = 0;
    long q = 0;
    double err = 0.0;
};

/// Best rational approximation p/q (q <= q_max) of x, flagged within tol.
RationalFlag nearest_rational(double x, double tol, long q_max = 64);

nlohmann::json precession_to_json(const std::vector<Pass>& passes, double rational_tol);

/// Randomized chart-overlap consistency sweep (the atlas-check command).
struct AtlasCheckReport {
    int checks = 0;
    int failures = 0;
    double max_h_err = 0.0;         // |H_src - H_tgt| / (1 + |H|)
    double max_roundtrip_err = 0.0; // position+momentum round-trip defect
    double max_overlap_rel = 0.0;   // KS-family momentum overlap residual
};

AtlasCheckReport run_atlas_check(int n, std::uint64_t seed, bool inject_fault = false);

nlohmann::json atlas_check_to_json(const AtlasCheckReport& rep);

/// Serialize to out_path, or stdout when the path is empty.
void emit(const RunConfig& cfg, const std::string& payload);

} // namespace strgeo

#endif
