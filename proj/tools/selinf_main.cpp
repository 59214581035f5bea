#include "selinf/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <sstream>

using namespace selinf;

namespace {

const std::map<std::string, Family> kFamilies = {
    {"bonferroni", Family::bonferroni}, {"sidak", Family::sidak},
    {"holm", Family::holm},             {"sidak_holm", Family::sidak_holm},
    {"fdp", Family::fdp},               {"bh", Family::bh},
    {"by", Family::by},                 {"bootstrap", Family::bootstrap},
    {"fixed", Family::fixed}};
const std::map<std::string, Sidedness> kSided = {{"one", Sidedness::one},
                                                 {"two", Sidedness::two}};
const std::map<std::string, EventKind> kEvents = {{"equal", EventKind::equal},
                                                  {"superset", EventKind::superset}};
const std::map<std::string, Procedure> kProcedures = {{"step_down", Procedure::step_down},
                                                      {"step_up", Procedure::step_up}};
const std::map<std::string, OutputFormat> kFormats = {
    {"table", OutputFormat::table}, {"json", OutputFormat::json}, {"csv", OutputFormat::csv}};
const std::map<std::string, Design> kDesigns = {{"normal", Design::normal},
                                                {"chisq", Design::chisq}};

// Enumerated flags are parsed as names and mapped after parsing.
struct Names {
  std::string family;
  std::string sided;
  std::string direction;
  std::string format;
  std::string design;
  std::string event;
};

template <class T>
void assign(const std::map<std::string, T>& table, const std::string& name, T& out) {
  if (!name.empty()) out = table.at(CLI::detail::to_lower(name));
}

void selection_flags(CLI::App* app, RunConfig& cfg, Names& names) {
  app->add_option("--estimates", cfg.estimates_path, "CSV with header id,estimate")
      ->check(CLI::ExistingFile);
  app->add_option("--cov", cfg.cov_path, "headerless m x m covariance CSV (default: identity)")
      ->check(CLI::ExistingFile);
  app->add_option("--draws", cfg.draws_path, "bootstrap t-statistics, B x m CSV")
      ->check(CLI::ExistingFile);
  app->add_option("--table", cfg.table_path, "critical values for the fixed family")
      ->check(CLI::ExistingFile);
  app->add_option("--direction", names.direction, "step_down or step_up (fixed family)")
      ->check(CLI::IsMember(kProcedures, CLI::ignore_case));
  app->add_option("--gamma", cfg.gamma, "exceedance fraction for the fdp family");
}

void common_flags(CLI::App* app, RunConfig& cfg, Names& names) {
  app->add_option("--procedure,--family", names.family, "threshold family")
      ->check(CLI::IsMember(kFamilies, CLI::ignore_case));
  app->add_option("--sided", names.sided, "one or two")
      ->check(CLI::IsMember(kSided, CLI::ignore_case));
  app->add_option("--level", cfg.level, "FWER or FDR level of the selection rule");
  app->add_option("--format", names.format, "table, json or csv")
      ->check(CLI::IsMember(kFormats, CLI::ignore_case));
  app->add_option("-o,--output", cfg.output_path, "write here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  Names names;
  CLI::App app{"Conditional inference on effects flagged by multiple testing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "selinf 1.0");

  CLI::App* sel = app.add_subcommand("select", "run the selection procedure");
  CLI::App* inf = app.add_subcommand("infer", "conditional estimates and intervals");
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo coverage study");
  CLI::App* boot = app.add_subcommand("bootstrap", "wild bootstrap t-statistic draws");

  for (CLI::App* a : {sel, inf}) {
    common_flags(a, cfg, names);
    selection_flags(a, cfg, names);
  }
  common_flags(sim, cfg, names);

  for (CLI::App* a : {inf, sim}) {
    a->add_option("--alpha", cfg.alpha, "one minus the confidence level");
    a->add_option("--event", names.event, "equal or superset")
        ->check(CLI::IsMember({"equal", "superset"}, CLI::ignore_case));
  }
  inf->add_flag("--joint", cfg.joint, "Bonferroni joint region: alpha / |S| per effect");
  inf->add_flag("--sweep-line", cfg.sweep_line, "find breakpoints with a kinetic sweep");
  bool no_bounds = false;
  inf->add_flag("--no-initial-bounds", no_bounds, "sweep the whole real line");

  sim->add_option("--design", names.design, "normal or chisq")
      ->check(CLI::IsMember(kDesigns, CLI::ignore_case));
  sim->add_option("--n", cfg.n, "sample size");
  sim->add_option("--reps", cfg.reps, "replications (default 20000 for n = 100, else 5000)");
  sim->add_option("--rho", cfg.rho, "pairwise correlation");
  sim->add_option("--theta", cfg.theta, "effect sizes")->delimiter(',');
  int target = 1;
  sim->add_option("--target", target, "1-based effect to study");
  sim->add_option("--seed", cfg.seed);
  sim->add_option("--threads", cfg.threads, "worker threads (env SELINF_THREADS)");

  boot->add_option("--residuals", cfg.residuals_path, "n x m residual CSV")
      ->check(CLI::ExistingFile);
  boot->add_option("--clusters", cfg.clusters_path, "one integer cluster id per row")
      ->check(CLI::ExistingFile);
  boot->add_option("--draws-count,-B", cfg.draws, "bootstrap replicates");
  boot->add_option("--seed", cfg.seed);
  boot->add_option("-o,--output", cfg.output_path, "write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage_error]: " << e.what() << '\n';
    return 2;
  }

  if (sel->parsed()) cfg.subcommand = Subcommand::select;
  if (inf->parsed()) cfg.subcommand = Subcommand::infer;
  if (sim->parsed()) cfg.subcommand = Subcommand::simulate;
  if (boot->parsed()) cfg.subcommand = Subcommand::bootstrap;
  assign(kFamilies, names.family, cfg.family);
  assign(kSided, names.sided, cfg.sided);
  assign(kProcedures, names.direction, cfg.fixed_procedure);
  assign(kFormats, names.format, cfg.format);
  assign(kDesigns, names.design, cfg.design);
  if (!names.event.empty()) cfg.event = kEvents.at(CLI::detail::to_lower(names.event));
  cfg.initial_bounds = !no_bounds;
  cfg.target = target - 1;
  return run(cfg, std::cout, std::cerr);
}
