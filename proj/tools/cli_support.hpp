#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "atyp/bits.hpp"
#include "atyp/montecarlo.hpp"
#include "atyp/scanner.hpp"
#include "json.hpp"

// Helpers shared by the CLI subcommands: typed errors mapped to exit codes,
// file I/O with path-naming messages, run manifests, and SVG rendering.
namespace atyp::cli {

inline constexpr std::string_view kToolName = "atyp";
inline constexpr std::string_view kToolVersion = "1.0.0";

// Exit codes: 0 success, 2 usage errors, 3 data errors.
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

// Bad flag combinations and malformed flag values.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable/unwritable files and content that fails validation.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
BitSequence load_bits_file(const std::filesystem::path& path);

// Manifest skeleton: tool identity plus the subcommand; callers fill
// "parameters", "inputs", and "outputs".  No timestamps: a manifest plus the
// inputs reproduces the run bit-exactly.
nlohmann::ordered_json manifest_base(std::string_view subcommand);
void write_manifest(const std::filesystem::path& path,
                    const nlohmann::ordered_json& manifest);

// "a", "a,b,c", or "start:stop:step" (inclusive stop, positive step).
std::vector<double> parse_value_grid(const std::string& text);

// Two-panel figure: random-walk representation of the stream on top, the
// per-position code-length difference below, flagged segments shaded.
std::string render_scan_svg(BitSpan x, const ScanProfile& profile,
                            const std::vector<FlaggedSegment>& flags,
                            std::optional<double> tau);

// Single-panel estimate-versus-x curve with the bound overlaid when finite.
std::string render_grid_svg(const std::vector<GridRow>& rows,
                            std::string_view x_label, bool log_x, bool log_y);

}  // namespace atyp::cli
