#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace srm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Options shared by the subcommands.
struct RunConfig {
    std::string subcommand;
    std::string input;
    std::string output;
    std::string profile;
    std::string format;
    std::vector<std::string> indices;
    std::vector<double> cutoffs;
    std::vector<double> deltas;
    std::size_t samples = 0;
    std::optional<std::uint64_t> seed;
    std::optional<double> extent;
};

/// `srm <compute|calibrate|rank|dual-check> [flags]`.
///
/// `--config FILE` reads `key=value` lines (`#` comments) naming long flags;
/// flags given on the command line win. Returns 0 on success, 1 on a data
/// error and 2 on a usage error. Output files are written to a temporary
/// name and renamed, so a failed run leaves no partial file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace srm::cli
