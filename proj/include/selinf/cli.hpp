#pragma once

#include "selinf/simulation.hpp"
#include "selinf/support.hpp"
#include "selinf/thresholds.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace selinf {

enum class Subcommand { select, infer, simulate, bootstrap };
enum class OutputFormat { table, json, csv };

std::string_view to_string(Subcommand c);
std::string_view to_string(OutputFormat f);

/// Everything a CLI invocation needs. Unset optionals take the subcommand's
/// default when resolved.
struct RunConfig {
  Subcommand subcommand = Subcommand::select;

  // select / infer
  std::string estimates_path;
  std::string cov_path;    // empty: identity, estimates are t-statistics
  std::string draws_path;  // bootstrap family
  std::string table_path;  // fixed family
  Family family = Family::holm;
  Procedure fixed_procedure = Procedure::step_down;
  Sidedness sided = Sidedness::two;
  double level = 0.1;  // beta or q
  double gamma = 0.0;  // fdp
  double alpha = 0.1;
  std::optional<EventKind> event;  // equal for infer, superset for simulate
  bool joint = false;
  bool sweep_line = false;
  bool initial_bounds = true;

  // simulate
  Design design = Design::normal;
  int n = 300;
  int reps = 0;
  double rho = 0.5;
  std::vector<double> theta = {0.05, 0.03, 0.01, 0.0, 0.0};
  int target = 0;
  int threads = 0;  // 0: SELINF_THREADS, then hardware concurrency

  // bootstrap
  std::string residuals_path;
  std::string clusters_path;  // empty: every row is its own cluster
  int draws = 999;

  std::uint64_t seed = 1;
  OutputFormat format = OutputFormat::table;
  std::string output_path;  // empty: the stream passed to run()

  EventKind resolved_event() const;
  /// Throws Error(usage) when flags are missing or do not fit together.
  void validate() const;
};

/// Runs one subcommand and writes its document. Returns the exit status;
/// failures are written to `err` as one line `error[<code>]: <message>`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Builds the threshold family for m hypotheses as configured.
ThresholdSpec build_spec(const RunConfig& cfg, int m);

}  // namespace selinf
