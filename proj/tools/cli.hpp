#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mdl::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSchema = "mdl v1";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitPrecondition = 2,
  kExitResourceGuard = 3,
};

// Runs one subcommand; `args` excludes the program name. The report goes to
// `out` unless --output is given, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Exact decimal parsing; throws PreconditionError on anything that is not a
// complete integer literal in range.
std::uint64_t parse_unsigned(const std::string& flag, const std::string& text);
std::int64_t parse_signed(const std::string& flag, const std::string& text);
mpz_class parse_integer(const std::string& flag, const std::string& text);

}  // namespace mdl::cli
