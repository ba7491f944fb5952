#pragma once

#include <string>

#include <json.hpp>

#include "pgnudge/assimilate.hpp"

namespace pgnudge {

/// Analytic low-mode forcing shapes: amplitude * cos(pi kx x / Lx) * cos(pi ky y / Ly)
/// (times cos(pi kz (z+H)/H) for the 3D heat source). Cosine modes keep the
/// surface forcing compatible with the wall conditions by construction.
struct Mode2D {
    double amplitude = 0.0;
    int kx = 0;
    int ky = 0;
};

struct Mode3D {
    double amplitude = 0.0;
    int kx = 0;
    int ky = 0;
    int kz = 0;
};

struct RunConfig {
    TwinConfig twin;
    Mode3D q_mode;
    Mode2D tstar_mode;
    Mode2D tau1_mode;
    Mode2D tau2_mode;
    double theory_c = 1.0;
    double r = 1.0;
    int snapshot_stride = 100;
    bool mu_auto = false;  // mu resolved from the relaxation heuristic
};

Field2D make_mode_field2d(const DomainSpec& d, const Mode2D& m);
Field3D make_mode_field3d(const DomainSpec& d, const Mode3D& m);

/// Fills twin.forcing from the analytic mode specs and refreshes the derived
/// source; resolves mu when mu_auto is set.
void finalize_config(RunConfig& cfg);

/// Heuristic default relaxation coefficient, the theorem lower bound evaluated
/// with a C-equivalent of 10.
double mu_heuristic(const PhysParams& p, const ForcingSpec& forcing);

/// Parses and validates; throws config_error listing every problem with its
/// field path.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Echo that round-trips: parse_config(config_echo(c)) yields the same config
/// (mu already resolved to a number).
nlohmann::ordered_json config_echo(const RunConfig& cfg);

}  // namespace pgnudge
