#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include "cantor/certify.hpp"
#include "cantor/report.hpp"

namespace cantor {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitNoCertificate = 2 };

enum class OutputFormat { Json, Csv };

struct RunConfig {
  std::string expression;
  Box region{Interval(0.0, 1.0), Interval(0.0, 1.0)};
  unsigned max_rank = 12;
  std::size_t budget = 100000;
  unsigned oracle_depth = 10;
  std::optional<std::pair<Rational, Rational>> seed;
  OutputFormat format = OutputFormat::Json;
  unsigned workers = 1;
};

// Grid spacing of the certify workflow's hit test.
inline constexpr double kHitTestGrid = 1e-3;
inline constexpr unsigned kRecursionDepth = 8;

// Full certify workflow: parse, differentiate, optional seed check, search,
// then oracle containment, hit test and recursion check on the result.
struct CertifyRun {
  int exit_code = kExitError;
  Json report;
  std::optional<Certificate> certificate;
  std::string error;
};

CertifyRun run_certify(const RunConfig& config);

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_cover(const RunConfig& config, std::ostream& out, std::ostream& err);
// name is one of steinhaus-sum, steinhaus-diff, product, corollary.
int cmd_reproduce(const std::string& name, const RunConfig& config, std::ostream& out, std::ostream& err);

// Entry point shared by the executable and the tests. Reads CANTOR_RANK_CAP.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cantor
