#include "selinf/cli.hpp"

#include "selinf/bootstrap.hpp"
#include "selinf/error.hpp"
#include "selinf/inference.hpp"
#include "selinf/io.hpp"
#include "selinf/selection.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace selinf {

namespace {

constexpr int kSchemaVersion = 1;

using nlohmann::ordered_json;

}  // namespace

std::string_view to_string(Subcommand c) {
  switch (c) {
    case Subcommand::select: return "select";
    case Subcommand::infer: return "infer";
    case Subcommand::simulate: return "simulate";
    case Subcommand::bootstrap: return "bootstrap";
  }
  return "unknown";
}

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::table: return "table";
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
  }
  return "unknown";
}

EventKind RunConfig::resolved_event() const {
  if (event) return *event;
  return subcommand == Subcommand::simulate ? EventKind::superset : EventKind::equal;
}

void RunConfig::validate() const {
  auto usage = [](const std::string& msg) { throw Error(ErrorCode::usage, msg); };
  auto unit = [&](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) usage(std::string("--") + name + " must lie in (0, 1)");
  };
  switch (subcommand) {
    case Subcommand::select:
    case Subcommand::infer:
      if (estimates_path.empty()) usage("--estimates is required");
      if (family == Family::bootstrap && draws_path.empty()) {
        usage("the bootstrap family requires --draws");
      }
      if (family == Family::fixed && table_path.empty()) usage("the fixed family requires --table");
      if (family != Family::fixed) unit(level, "level");
      if (family == Family::fdp && !(gamma >= 0.0 && gamma < 1.0)) {
        usage("--gamma must lie in [0, 1)");
      }
      if (subcommand == Subcommand::infer) unit(alpha, "alpha");
      if (format == OutputFormat::csv) usage("--format csv is only available for simulate");
      break;
    case Subcommand::simulate:
      unit(level, "level");
      unit(alpha, "alpha");
      if (family == Family::bootstrap || family == Family::fixed) {
        usage("simulate needs a closed-form family");
      }
      if (n < 2) usage("--n must be at least 2");
      if (reps < 0) usage("--reps must be positive");
      break;
    case Subcommand::bootstrap:
      if (residuals_path.empty()) usage("--residuals is required");
      if (draws < 2) usage("--draws-count must be at least 2");
      if (format == OutputFormat::json) usage("bootstrap writes CSV only");
      break;
  }
  if (threads < 0) usage("--threads must be non-negative");
}

ThresholdSpec build_spec(const RunConfig& cfg, int m) {
  if (cfg.family == Family::bootstrap) {
    Eigen::MatrixXd draws = read_draws_csv(cfg.draws_path);
    if (draws.cols() != m) {
      throw Error(ErrorCode::dimension_mismatch,
                  "draws have " + std::to_string(draws.cols()) + " columns but there are " +
                      std::to_string(m) + " effects");
    }
    return ThresholdSpec::bootstrap(std::move(draws), cfg.level, cfg.sided);
  }
  if (cfg.family == Family::fixed) {
    std::vector<double> table = read_vector_csv(cfg.table_path);
    if (static_cast<int>(table.size()) != m) {
      throw Error(ErrorCode::dimension_mismatch, "threshold table must have one entry per effect");
    }
    return ThresholdSpec::fixed(std::move(table), cfg.fixed_procedure, cfg.sided);
  }
  return ThresholdSpec::from_family(cfg.family, m, cfg.level, cfg.sided, cfg.gamma);
}

namespace {

int resolved_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("SELINF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    throw Error(ErrorCode::usage, "SELINF_THREADS must be a positive integer");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ordered_json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : ordered_json(nullptr);
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json c;
  c["subcommand"] = to_string(cfg.subcommand);
  switch (cfg.subcommand) {
    case Subcommand::select:
    case Subcommand::infer:
      c["estimates"] = cfg.estimates_path;
      c["cov"] = cfg.cov_path.empty() ? ordered_json(nullptr) : ordered_json(cfg.cov_path);
      c["family"] = to_string(cfg.family);
      c["sided"] = to_string(cfg.sided);
      if (cfg.family == Family::fixed) {
        c["table"] = cfg.table_path;
        c["fixed_procedure"] = to_string(cfg.fixed_procedure);
      } else {
        c["level"] = cfg.level;
      }
      if (cfg.family == Family::fdp) c["gamma"] = cfg.gamma;
      if (cfg.family == Family::bootstrap) c["draws"] = cfg.draws_path;
      if (cfg.subcommand == Subcommand::infer) {
        c["alpha"] = cfg.alpha;
        c["event"] = to_string(cfg.resolved_event());
        c["joint"] = cfg.joint;
        c["sweep_line"] = cfg.sweep_line;
        c["initial_bounds"] = cfg.initial_bounds;
      }
      break;
    case Subcommand::simulate:
      c["design"] = to_string(cfg.design);
      c["n"] = cfg.n;
      c["reps"] = cfg.reps > 0 ? cfg.reps : DesignConfig::default_reps(cfg.n);
      c["rho"] = cfg.rho;
      c["theta"] = cfg.theta;
      c["target"] = cfg.target + 1;
      c["family"] = to_string(cfg.family);
      c["sided"] = to_string(cfg.sided);
      c["level"] = cfg.level;
      if (cfg.family == Family::fdp) c["gamma"] = cfg.gamma;
      c["alpha"] = cfg.alpha;
      c["event"] = to_string(cfg.resolved_event());
      c["seed"] = cfg.seed;
      c["threads"] = resolved_threads(cfg);
      break;
    case Subcommand::bootstrap:
      c["residuals"] = cfg.residuals_path;
      c["clusters"] =
          cfg.clusters_path.empty() ? ordered_json(nullptr) : ordered_json(cfg.clusters_path);
      c["draws_count"] = cfg.draws;
      c["seed"] = cfg.seed;
      break;
  }
  c["format"] = to_string(cfg.format);
  return c;
}

// Aligned columns, 6 significant digits.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  static std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
  }

  void print(std::ostream& out) const {
    std::vector<std::size_t> width;
    for (const auto& row : rows_) {
      width.resize(std::max(width.size(), row.size()), 0);
      for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
    }
    for (const auto& row : rows_) {
      std::string line;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j > 0) line += "  ";
        line += row[j];
        if (j + 1 < row.size()) line.append(width[j] - row[j].size(), ' ');
      }
      line.erase(line.find_last_not_of(' ') + 1);
      out << line << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

void echo_config(const RunConfig& cfg, std::ostream& out) {
  const ordered_json config = config_json(cfg);
  out << "# config";
  for (const auto& [key, value] : config.items()) {
    out << ' ' << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump());
  }
  out << '\n';
}

EffectEstimates load(const RunConfig& cfg) {
  return cfg.cov_path.empty() ? load_estimates(cfg.estimates_path)
                              : load_estimates(cfg.estimates_path, cfg.cov_path);
}

std::string support_text(const IntervalUnion& u) {
  std::string s;
  for (const Interval& iv : u) {
    if (!s.empty()) s += " U ";
    s += "[" + TextTable::num(iv.lo) + ", " + TextTable::num(iv.hi) + "]";
  }
  return s.empty() ? "{}" : s;
}

std::string event_text(const SelectionEvent& ev, const EffectEstimates& e) {
  std::string s = ev.kind == EventKind::equal ? "S = {" : "S >= {";
  for (std::size_t k = 0; k < ev.target.size(); ++k) {
    if (k > 0) s += ",";
    s += e.label(ev.target[k]);
  }
  return s + "}";
}

ordered_json event_json(const SelectionEvent& ev, const EffectEstimates& e) {
  ordered_json j;
  j["kind"] = to_string(ev.kind);
  ordered_json target = ordered_json::array();
  for (int h : ev.target) target.push_back(e.label(h));
  j["target"] = target;
  return j;
}

ordered_json selection_json(const SelectionOutcome& sel, const Studentized& st,
                            const EffectEstimates& e) {
  ordered_json j;
  j["procedure"] = to_string(sel.procedure);
  ordered_json significant = ordered_json::array();
  for (std::size_t k = 0; k < sel.significant.size(); ++k) {
    const int h = sel.significant[k];
    significant.push_back({{"id", e.label(h)},
                           {"index", h + 1},
                           {"statistic", number(st.x[h])},
                           {"threshold", number(sel.thresholds[k])}});
  }
  j["significant"] = significant;
  ordered_json insignificant = ordered_json::array();
  for (int h : sel.insignificant) insignificant.push_back(e.label(h));
  j["insignificant"] = insignificant;
  return j;
}

void run_select(const RunConfig& cfg, std::ostream& out) {
  const EffectEstimates e = load(cfg);
  const Studentized st = studentize(e);
  const ThresholdSpec spec = build_spec(cfg, e.m());
  const SelectionOutcome sel = select(st.x, spec);

  if (cfg.format == OutputFormat::json) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = config_json(cfg);
    doc["selection"] = selection_json(sel, st, e);
    out << doc.dump(2) << '\n';
    return;
  }
  echo_config(cfg, out);
  if (sel.empty()) {
    out << "no significant effects\n";
    return;
  }
  TextTable t({"step", "id", "statistic", "threshold"});
  for (std::size_t k = 0; k < sel.significant.size(); ++k) {
    const int h = sel.significant[k];
    t.add({std::to_string(k + 1), e.label(h), TextTable::num(st.x[h]),
           TextTable::num(sel.thresholds[k])});
  }
  t.print(out);
  out << "insignificant:";
  for (int h : sel.insignificant) out << ' ' << e.label(h);
  out << '\n';
}

void run_infer(const RunConfig& cfg, std::ostream& out) {
  const EffectEstimates e = load(cfg);
  const ThresholdSpec spec = build_spec(cfg, e.m());
  SupportOptions options;
  options.sweep_line = cfg.sweep_line;
  options.initial_bounds = cfg.initial_bounds;
  const InferenceResult res =
      infer_significant(e, spec, cfg.resolved_event(), cfg.alpha, cfg.joint, options);
  const Studentized st = studentize(e);

  if (cfg.format == OutputFormat::json) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = config_json(cfg);
    doc["selection"] = selection_json(res.selection, st, e);
    ordered_json meta;
    meta["joint"] = cfg.joint;
    meta["joint_rule"] = cfg.joint ? "alpha / |S| per effect" : "none";
    meta["joint_rule_extended_to_superset"] =
        cfg.joint && cfg.resolved_event() == EventKind::superset;
    doc["metadata"] = meta;
    ordered_json effects = ordered_json::array();
    for (const ConditionalInference& ci : res.effects) {
      ordered_json j;
      j["s"] = ci.s + 1;
      j["id"] = e.label(ci.s);
      j["status"] = to_string(ci.status);
      j["diagnostic"] = ci.diagnostic;
      j["estimate_ub"] = number(ci.estimate_ub);
      j["ci_lo"] = number(ci.ci_lo);
      j["ci_hi"] = number(ci.ci_hi);
      j["naive_estimate"] = number(ci.naive_estimate);
      j["naive_ci_lo"] = number(ci.naive_ci_lo);
      j["naive_ci_hi"] = number(ci.naive_ci_hi);
      ordered_json support = ordered_json::array();
      for (const Interval& iv : ci.support) support.push_back({number(iv.lo), number(iv.hi)});
      j["support"] = support;
      j["alpha"] = ci.alpha;
      j["event"] = event_json(ci.event, e);
      effects.push_back(j);
    }
    doc["effects"] = effects;
    out << doc.dump(2) << '\n';
    return;
  }

  echo_config(cfg, out);
  if (res.effects.empty()) {
    out << "no significant effects\n";
    return;
  }
  TextTable t({"id", "naive_est", "naive_lo", "naive_hi", "cond_est", "cond_lo", "cond_hi",
               "alpha", "status"});
  for (const ConditionalInference& ci : res.effects) {
    t.add({e.label(ci.s), TextTable::num(ci.naive_estimate), TextTable::num(ci.naive_ci_lo),
           TextTable::num(ci.naive_ci_hi), TextTable::num(ci.estimate_ub),
           TextTable::num(ci.ci_lo), TextTable::num(ci.ci_hi), TextTable::num(ci.alpha),
           std::string(to_string(ci.status))});
  }
  t.print(out);
  for (const ConditionalInference& ci : res.effects) {
    out << "effect " << e.label(ci.s) << ": event " << event_text(ci.event, e) << ", support (t) "
        << support_text(ci.support) << '\n';
    if (!ci.diagnostic.empty()) out << "  note: " << ci.diagnostic << '\n';
  }
}

DesignConfig design_config(const RunConfig& cfg) {
  DesignConfig d;
  d.design = cfg.design;
  d.n = cfg.n;
  d.theta = cfg.theta;
  d.rho = cfg.rho;
  d.reps = cfg.reps;
  d.seed = cfg.seed;
  d.family = cfg.family;
  d.sided = cfg.sided;
  d.beta = cfg.level;
  d.alpha = cfg.alpha;
  d.event = cfg.resolved_event();
  d.target = cfg.target;
  d.threads = resolved_threads(cfg);
  return d;
}

void run_simulate(const RunConfig& cfg, std::ostream& out) {
  const DesignConfig d = design_config(cfg);
  const SimulationSummary s = simulate_design(d);

  struct Field {
    const char* name;
    std::optional<double> value;
  };
  const std::vector<Field> fields = {
      {"sel_prob", s.sel_prob},
      {"cond_coverage", s.cond_coverage},
      {"naive_coverage", s.naive_coverage},
      {"bonf_coverage", s.bonf_coverage},
      {"cond_median_length", s.cond_median_length},
      {"naive_median_length", s.naive_median_length},
      {"bonf_median_length", s.bonf_median_length},
      {"cond_median_bias", s.cond_median_bias},
      {"naive_median_bias", s.naive_median_bias},
  };

  if (cfg.format == OutputFormat::json) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = config_json(cfg);
    ordered_json sum;
    sum["reps"] = s.reps;
    sum["reps_selected"] = s.reps_selected;
    sum["reps_failed"] = s.reps_failed;
    for (const Field& f : fields) sum[f.name] = optional_number(f.value);
    doc["summary"] = sum;
    out << doc.dump(2) << '\n';
    return;
  }
  if (cfg.format == OutputFormat::csv) {
    out << "design,n,sided,event,seed,reps,reps_selected,reps_failed";
    for (const Field& f : fields) out << ',' << f.name;
    out << '\n';
    out << to_string(cfg.design) << ',' << cfg.n << ',' << to_string(cfg.sided) << ','
        << to_string(d.event) << ',' << cfg.seed << ',' << s.reps << ',' << s.reps_selected
        << ',' << s.reps_failed << std::setprecision(17);
    for (const Field& f : fields) {
      out << ',';
      if (f.value) out << *f.value;
      else out << "NA";
    }
    out << '\n';
    return;
  }

  echo_config(cfg, out);
  auto cell = [](const std::optional<double>& v) { return v ? TextTable::num(*v) : "NA"; };
  TextTable t({"", to_string(cfg.design) == "normal" ? "Normal" : "Chi-squared"});
  t.add({"n", std::to_string(cfg.n)});
  t.add({"Sel Prob", TextTable::num(s.sel_prob)});
  t.add({"Conditional Coverage", ""});
  t.add({"  Cond CI", cell(s.cond_coverage)});
  t.add({"  Naive CI", cell(s.naive_coverage)});
  t.add({"  Bonf CI", cell(s.bonf_coverage)});
  t.add({"Conditional Median CI Length", ""});
  t.add({"  Cond CI", cell(s.cond_median_length)});
  t.add({"  Naive CI", cell(s.naive_median_length)});
  t.add({"  Bonf CI", cell(s.bonf_median_length)});
  t.add({"Conditional Median Bias", ""});
  t.add({"  Cond Est", cell(s.cond_median_bias)});
  t.add({"  Naive Est", cell(s.naive_median_bias)});
  t.print(out);
  out << "replications " << s.reps << ", selected " << s.reps_selected << ", degenerate "
      << s.reps_failed << '\n';
}

void run_bootstrap(const RunConfig& cfg, std::ostream& out) {
  const Eigen::MatrixXd residuals = read_matrix_csv(cfg.residuals_path);
  std::vector<int> clusters;
  if (cfg.clusters_path.empty()) {
    clusters.resize(residuals.rows());
    for (Eigen::Index i = 0; i < residuals.rows(); ++i) clusters[i] = static_cast<int>(i);
  } else {
    for (double v : read_vector_csv(cfg.clusters_path)) {
      if (v != std::floor(v)) throw Error(ErrorCode::parse, "cluster ids must be integers");
      clusters.push_back(static_cast<int>(v));
    }
  }
  write_matrix_csv(out, wild_bootstrap_draws(residuals, clusters, cfg.draws, cfg.seed));
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    std::ofstream file;
    std::ostream* sink = &out;
    if (!cfg.output_path.empty()) {
      file.open(cfg.output_path, std::ios::binary);
      if (!file) throw Error(ErrorCode::io, "cannot write " + cfg.output_path);
      sink = &file;
    }
    switch (cfg.subcommand) {
      case Subcommand::select: run_select(cfg, *sink); break;
      case Subcommand::infer: run_infer(cfg, *sink); break;
      case Subcommand::simulate: run_simulate(cfg, *sink); break;
      case Subcommand::bootstrap: run_bootstrap(cfg, *sink); break;
    }
    sink->flush();
    if (!*sink) throw Error(ErrorCode::io, "write failed");
    return 0;
  } catch (const Error& e) {
    err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
    return e.code() == ErrorCode::usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace selinf
