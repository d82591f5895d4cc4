#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "membrane/diagnostics.hpp"
#include "membrane/geometry.hpp"

namespace membrane::io {

/// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

/// Columns: t, min_indicator, mean_r_1..k, density_spread, X_inf, Y_inf,
/// max_speed, velocity_margin, gtt_integral.
std::string diagnostics_csv(std::span<const DiagnosticsRecord> records, int k);
std::vector<DiagnosticsRecord> parse_diagnostics_csv(const std::string& text);

/// Columns: y, z_1..m, r_1..k, vz_1..m, vr_1..k.
std::string snapshot_csv(const FieldState& state);

/// gnuplot script plotting min_indicator and the mean radii against t for
/// the given diagnostics files (paths relative to the script).
std::string gnuplot_script(const std::vector<std::string>& diagnostics_files, int k);

}  // namespace membrane::io
