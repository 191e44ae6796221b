#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <cstdint>

namespace sogs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCorrupt = 3;

// Entry point of the `sogs` tool. Summaries go to `out` as key=value lines,
// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Writes through a temporary file in the same directory, then renames it over
// `path`, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace sogs::cli
