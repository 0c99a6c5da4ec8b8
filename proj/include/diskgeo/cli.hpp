#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace diskgeo::cli {

enum ExitCode : int { kPass = 0, kUsage = 1, kFail = 2, kInconclusive = 3 };

/// Runs one subcommand (dist, analyze, diff, sumdiff, carleson, verify, path,
/// weight-validate). The JSON report goes to `out` unless --output is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Splits "M1,M2,..." into map specs; commas inside a map spec (e.g.
/// "affine:0.5,0.5") stay with their map.
std::vector<std::string> split_map_list(const std::string& text);

}  // namespace diskgeo::cli
