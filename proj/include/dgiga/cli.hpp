#pragma once

// Command-line front end: solve, rates, grade-preview, list-cases.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage or input error.
// Output files go to --out, else $DGIGA_OUT_DIR, else the config file's
// `out`, else the working directory.

#include <iosfwd>
#include <optional>
#include <string>

namespace dgiga {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kOutDirEnv = "DGIGA_OUT_DIR";

/// Run configuration, also readable from a `key = value` file.
struct RunConfig {
  std::string case_name;       ///< benchmark name
  std::string geometry;        ///< multipatch file (alternative to case_name)
  int k = 1;
  std::string mu = "auto";     ///< number in (0,1] or "auto"
  std::string eta = "default"; ///< number or "default"
  int levels = 3;              ///< max level S for rates
  int level = 2;               ///< refinement level for solve
  std::string out = ".";
  double tol = 1e-10;
  bool grading = true;
  bool both = false;           ///< rates with and without grading
  std::string solver = "auto";
  std::string penalty = "local";
  int samples = 11;            ///< field dump points per direction

  bool operator==(const RunConfig&) const = default;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and
/// malformed values throw ParseError naming the line.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);
/// Canonical form: every key once, fixed order, shortest round-trip numbers.
std::string serialize_config(const RunConfig& c);
/// Throws ParseError for values outside their domain.
void validate_config(const RunConfig& c);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dgiga
