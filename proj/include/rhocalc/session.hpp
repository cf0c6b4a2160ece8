#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rhocalc/format.hpp"

namespace rhocalc {

struct RunOptions {
  /// I-adic truncation order of every declared chart.
  int trunc = 8;
  /// Total-exponent bound of the exactness search when it is not complete.
  int degree_bound = 4;
  /// Random samples for the fuzz layers of cartan and jacobian.
  int samples = 20;
};

/// RHOCALC_TRUNC, or 8 when unset or malformed.
int trunc_from_env();

struct Report {
  std::string verb;
  /// Statement text with whitespace collapsed.
  std::string command;
  dsl::Span span;
  bool ok = true;
  Json result;
  /// {"trunc", "conductor"} when ok.
  Json diagnostics;
  /// {"code", "message", "line", "col", "length"} when !ok.
  Json error;
};

struct SessionOutcome {
  std::vector<Report> reports;
  std::optional<CommutationFactor> factor;
  int trunc = 8;
  /// A syntax error or failed declaration stopped the run.
  bool aborted = false;

  /// True when no command or declaration failed.
  bool ok() const;
};

/// Runs the commands in order. A failed command is reported and the run
/// continues; a failed declaration is reported and stops the run.
SessionOutcome run_session(const dsl::Session& session, const RunOptions& opts);
/// Parses then runs; a syntax error becomes a single failed report.
SessionOutcome run_text(std::string_view text, const RunOptions& opts);

/// {"schema": 1, "factor", "trunc", "ok", "reports": [...]}.
Json to_json(const SessionOutcome& out);
std::string to_text(const SessionOutcome& out);
/// The ModularClassReports of every modular command and scenario class.
Json modular_reports(const SessionOutcome& out);

}  // namespace rhocalc
