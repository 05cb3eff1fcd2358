#pragma once

#include "crimereg/rhythms/time_series.hpp"
#include "crimereg/time.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace crimereg {

enum class Command { tessellate, concentrate, ranks, rhythms, composed, independence, simulate, report };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command c);

/// Everything one subcommand needs. Unset inputs are simply not used; each
/// command checks for the ones it requires before computing anything.
struct RunConfig {
    Command command = Command::report;
    std::filesystem::path out = ".";

    std::optional<std::filesystem::path> events;
    std::optional<std::filesystem::path> population;
    std::optional<std::filesystem::path> counts;   // `count` column, one row per region
    std::optional<std::filesystem::path> series;   // wide weekly region series
    std::optional<std::filesystem::path> pairs;    // `label,x,y`
    std::optional<std::filesystem::path> scenario; // generator JSON
    std::optional<std::filesystem::path> artifacts; // report input directory; defaults to `out`

    std::optional<double> target_pop;
    std::optional<std::string> category;
    std::optional<Date> week_origin;
    bool dedup = false;
    std::optional<int> region; // rhythms: analyse this region instead of the city sum

    Band band;
    double alpha_level = 0.05;
    int boot = 1000; // 0 skips the goodness-of-fit bootstrap
    int perm = 999;
    std::uint64_t seed = 0;
    int workers = 1;
};

/// Executes one subcommand and writes its artifacts plus an entry in
/// `out/manifest.json`. On error every file written by this run is removed
/// and Error is rethrown.
void run(const RunConfig& config);

/// FNV-1a 64-bit digest of a file, as 16 lowercase hex digits.
std::string file_checksum(const std::filesystem::path& path);

} // namespace crimereg
