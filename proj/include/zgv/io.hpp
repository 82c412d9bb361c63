#pragma once

// File formats of the command-line front end: MatrixMarket matrices,
// key-value material files, CSV results and a JSON run manifest.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zgv/pencil.hpp"
#include "zgv/refine.hpp"
#include "zgv/waveguide.hpp"

namespace zgv {

inline constexpr std::string_view kVersion = "0.1.0";

/// Real matrix from a MatrixMarket file in coordinate or array format.
/// Fields real, integer and complex (all imaginary parts zero) are accepted;
/// symmetric and skew-symmetric storage is expanded.
/// Throws IoError, ParseError (with the line number) or NonRealEntries.
RealMatrix read_matrix_market(const std::string& path);

/// Array-format MatrixMarket file with shortest round-trip numbers, which read
/// back bit for bit.
void write_matrix_market(const std::string& path, const RealMatrix& A);

/// Pencil from four files in the order L0, L1, L2, M. Throws
/// DimensionMismatch naming the offending files.
QuadraticPencil load_pencil(const std::string& l0, const std::string& l1, const std::string& l2,
                            const std::string& m);

/// Key-value material file: `key = value` or `key value` per line, `#`
/// comments. Keys rho, h and either ct, cl (isotropic) or Cij with
/// 1 <= i <= j <= 6 (missing entries are zero).
PlateMaterial read_material(const std::string& path);

/// Locale-independent shortest form with at most 17 significant digits.
std::string format_double(double x);

struct RunManifest {
    std::string command;
    std::vector<std::string> arguments; ///< argv without the program name
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json config = nlohmann::json::object();
    std::string timestamp;              ///< ISO 8601 UTC
    std::string version{kVersion};
    std::uint64_t seed = 0;
};

nlohmann::json to_json(const RunManifest& m);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Writes <prefix>_zgv.csv (k,omega,classification,residual,omega_gap,
/// ascending k), <prefix>_dispersion.csv (k,branch,omega) when a grid is
/// given, and <prefix>_manifest.json. Throws IoError.
void emit_results(const std::vector<ZgvPoint>& points, const std::optional<DispersionGrid>& grid,
                  const std::string& out_prefix, const RunManifest& manifest);

} // namespace zgv
