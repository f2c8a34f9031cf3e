#pragma once

// Text export of wavefunctions: CSV rows (x1, x2, Re psi, Im psi) and a JSON sidecar.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "tdho/oracle.hpp"

namespace tdho {

/// 17 significant digits, '.' separator, no locale; reads back to the same double.
std::string format_double(double v);

/// 64-bit FNV-1a of the given bytes, as 16 hex digits.
std::string config_hash(std::string_view text);

/// Writes `csv_path` and `csv_path` with extension ".json" (grid, time, norm, hash).
void write_snapshot(const Wavefunction2D& psi, const std::filesystem::path& csv_path, const std::string& hash);

}  // namespace tdho
