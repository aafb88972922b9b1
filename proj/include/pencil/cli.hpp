#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "pencil/characterize.hpp"

namespace pencil::cli {

enum class Command { forward, inverse, roundtrip, characterize, validate };

enum ExitCode : int {
  kOk = 0,
  kVerdictFail = 2,
  kSolverError = 3,
  kInputError = 4,
};

struct JobConfig {
  Command command = Command::forward;
  std::optional<int> order;  // pad or truncate the input to this order
  std::string input_path;
  std::string output_path;
  std::optional<GridSpec> grid;  // characterize only
  double tol_zero = characterize::kDefaultTolZero;
  double route_tol = 1e-6;
  std::optional<std::string> report_path;  // determinant CSV
  unsigned threads = 0;                    // 0: hardware concurrency

  /// Throws DomainError on violated invariants.
  void validate() const;
};

std::optional<Command> parse_command(const std::string& name);
const char* to_string(Command c) noexcept;

/// "re0,re1,im0,im1,nx,ny"; DomainError when malformed.
GridSpec parse_grid(const std::string& text);

/// Runs one job. Errors are reported as a single-line JSON object on `err`:
///   {"error": {"kind": ..., "message": ..., "exit_code": ...[, "pointer": ...]}}
int run(const JobConfig& config, std::ostream& err);

/// argv front end used by the pencil-scatter executable.
int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err);

}  // namespace pencil::cli
