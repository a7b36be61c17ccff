#pragma once

#include <filesystem>
#include <string>

#include "spinor/state.hpp"

namespace spinor {

/// Shortest text form that round-trips the double exactly (17 significant
/// digits at most).
std::string format_double(double x);

/// 1D states: "x,u1,u0,um1" rows under a shape comment. Higher dimensions:
/// row-major flat "u1,u0,um1" rows plus a <path>.meta.json sidecar with the
/// grid shape.
void write_state_csv(const std::filesystem::path& path, const SpinorState& s);

/// Inverse of write_state_csv; grid rebuilt from the shape comment or the
/// sidecar.
SpinorState read_state_csv(const std::filesystem::path& path);

}  // namespace spinor
