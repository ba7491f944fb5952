#pragma once

#include <filesystem>
#include <string>

#include "pgnudge/domain.hpp"

namespace pgnudge {

/// Writes `base`.f64 (little-endian float64, z-fastest) and `base`.json
/// sidecar {nx, ny, nz, lx, ly, h, name, time}.
void write_snapshot(const std::filesystem::path& base, const Field3D& f,
                    const std::string& name, double time);

/// Reads a snapshot pair written by write_snapshot; throws on mismatch.
Field3D read_snapshot(const std::filesystem::path& base, std::string* name_out = nullptr,
                      double* time_out = nullptr);

/// Canonical float formatting used for every CSV/JSON artifact (shortest
/// round-trip representation; reruns are byte-identical by construction).
std::string format_double(double v);

}  // namespace pgnudge
