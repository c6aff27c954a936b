#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "unitsel/benefit.hpp"
#include "unitsel/dataset.hpp"
#include "unitsel/errors.hpp"
#include "unitsel/lp_oracle.hpp"
#include "unitsel/pc_bounds.hpp"
#include "unitsel/sim.hpp"

#ifndef UNITSEL_VERSION
#define UNITSEL_VERSION "0.0.0"
#endif

namespace unitsel::cli {
namespace {

using nlohmann::json;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Outcome {
  int code = exit_ok;
  json result = json::object();
  std::string text;
};

struct Options {
  int precision = 3;
  bool precision_given = false;
  std::size_t max_states = EngineConfig{}.max_states;
  bool as_json = false;
  bool trace = false;
  bool oracle = false;
};

json number_json(const Rational& value, int precision) {
  return {{"exact", to_fraction_string(value)}, {"decimal", to_decimal_string(value, precision)}};
}

json interval_json(const Interval& interval, int precision) {
  return {{"lower", number_json(interval.lower, precision)}, {"upper", number_json(interval.upper, precision)}};
}

std::string exact_pair(const Interval& interval) {
  return "[" + to_fraction_string(interval.lower) + ", " + to_fraction_string(interval.upper) + "]";
}

std::string inequality(const Interval& interval, std::string_view middle, int precision) {
  return to_decimal_string(interval.lower, precision) + " ≤ " + std::string(middle) + " ≤ " +
         to_decimal_string(interval.upper, precision);
}

EngineConfig engine_config(const Options& options) {
  EngineConfig config;
  config.max_states = options.max_states;
  return config;
}

std::string describe(const Violation& v, int precision) {
  std::string where;
  if (v.treatment) where += " x" + std::to_string(*v.treatment + 1);
  if (v.outcome) where += " y" + std::to_string(*v.outcome + 1);
  return v.constraint + where + ": slack " + to_fraction_string(v.slack) + " (" +
         to_decimal_string(v.slack, precision) + ")";
}

json violations_json(const ValidationReport& report, int precision) {
  json list = json::array();
  for (const auto& v : report.violations) {
    list.push_back({{"constraint", v.constraint},
                    {"treatment", v.treatment ? json(*v.treatment + 1) : json(nullptr)},
                    {"outcome", v.outcome ? json(*v.outcome + 1) : json(nullptr)},
                    {"slack", number_json(v.slack, precision)}});
  }
  return list;
}

// Fills `outcome` and returns false when the tables fail validation.
bool check_tables(const Dataset& dataset, const Options& options, Outcome& outcome) {
  const ValidationReport report = validate(dataset.experimental, dataset.observational);
  if (report.ok()) return true;
  std::ostringstream text;
  text << "invalid: " << report.violations.size() << " violation(s)\n";
  for (const auto& v : report.violations) text << "  " << describe(v, options.precision) << '\n';
  outcome.code = exit_invalid;
  outcome.text = text.str();
  outcome.result = {{"ok", false}, {"violations", violations_json(report, options.precision)}};
  return false;
}

TraceSink trace_sink(std::ostringstream& text) {
  return [&text](const TraceStep& step) {
    text << std::string(2 * (step.depth + 1), ' ') << "group x" << step.position + 1 << "=y" << step.outcome + 1
         << ": keep " << step.kept.to_string() << ", coefficient " << to_fraction_string(step.kept_coefficient);
    if (step.revisit) text << " (revisit)";
    text << '\n';
  };
}

Outcome cmd_validate(const std::string& path, const Options& options) {
  const Dataset dataset = load_dataset(path);
  Outcome outcome;
  if (!check_tables(dataset, options, outcome)) return outcome;
  outcome.text = "ok: m = " + std::to_string(dataset.m) + ", n = " + std::to_string(dataset.n) +
                 ", every constraint holds\n";
  outcome.result = {{"ok", true}, {"violations", json::array()}};
  return outcome;
}

Outcome cmd_identify(const std::string& path, const Options& options) {
  const Dataset dataset = load_dataset(path);
  const BenefitFunction f = dataset.benefit_function();
  const ExperimentalDistribution experimental = dataset.experimental_distribution();

  std::ostringstream text;
  std::ostringstream trace;
  const auto result = identify(f, experimental, engine_config(options), options.trace ? trace_sink(trace) : TraceSink{});
  if (options.trace) text << "trace:\n" << trace.str();

  Outcome outcome;
  outcome.result = {{"identifiable", result.identifiable}, {"expansions", result.expansions}};
  if (result.identifiable) {
    text << "identifiable: yes, value = " << to_fraction_string(result.value) << " ("
         << to_decimal_string(result.value, options.precision) << ")\n";
    text << "closed form: " << result.closed_form->to_string() << '\n';
    outcome.result["value"] = number_json(result.value, options.precision);
    outcome.result["closed_form"] = result.closed_form->to_string();
  } else {
    text << "identifiable: no\n";
  }
  outcome.text = text.str();
  return outcome;
}

Outcome cmd_bounds(const std::string& path, const Options& options) {
  const Dataset dataset = load_dataset(path);
  Outcome outcome;
  if (!check_tables(dataset, options, outcome)) return outcome;
  const BenefitFunction f = dataset.benefit_function();
  const auto experimental = dataset.experimental_distribution();
  const auto observational = dataset.observational_distribution();

  std::ostringstream text;
  std::ostringstream trace;
  const BenefitBounds bounds =
      bound_benefit(f, experimental, observational, engine_config(options),
                    options.trace ? trace_sink(trace) : TraceSink{});
  if (options.trace) text << "trace:\n" << trace.str();
  text << inequality(bounds.interval, "f(c)", options.precision) << '\n';
  text << "exact: " << exact_pair(bounds.interval) << '\n';
  text << "forms: " << bounds.forms << ", expansions: " << bounds.expansions << '\n';
  if (bounds.partial) {
    text << "partial: state budget exhausted, the bound may be loose\n";
    outcome.code = exit_budget;
  }
  outcome.result = {{"interval", interval_json(bounds.interval, options.precision)},
                    {"partial", bounds.partial},
                    {"forms", bounds.forms},
                    {"expansions", bounds.expansions}};

  if (options.oracle) {
    Interval lp;
    try {
      lp = oracle_bounds(f, experimental, observational);
    } catch (const Infeasible& e) {
      outcome.code = exit_invalid;
      text << "oracle: infeasible (" << e.what() << ")\n";
      outcome.result["oracle"] = nullptr;
      outcome.text = text.str();
      return outcome;
    }
    const bool contained = bounds.interval.contains(lp);
    text << "oracle: " << inequality(lp, "f(c)", options.precision) << '\n';
    text << "oracle exact: " << exact_pair(lp) << '\n';
    text << "containment: " << (contained ? "ok" : "violated") << '\n';
    if (contained && lp == bounds.interval) {
      text << "tightness: equal\n";
    } else if (contained) {
      text << "tightness: wider by " << to_fraction_string(bounds.interval.width() - lp.width()) << '\n';
    }
    outcome.result["oracle"] = interval_json(lp, options.precision);
    outcome.result["containment"] = contained;
  }
  outcome.text = text.str();
  return outcome;
}

CounterfactualPair parse_pair(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--pair expects j:i, got '" + text + "'");
  try {
    const int j = std::stoi(text.substr(0, colon));
    const int i = std::stoi(text.substr(colon + 1));
    return {j - 1, i - 1};
  } catch (const std::logic_error&) {
    throw UsageError("--pair expects j:i, got '" + text + "'");
  }
}

Outcome cmd_pc_bound(const std::string& path, const std::vector<std::string>& pair_text,
                     std::optional<int> given_x, std::optional<int> given_y, const Options& options) {
  const Dataset dataset = load_dataset(path);
  Outcome outcome;
  if (!check_tables(dataset, options, outcome)) return outcome;
  std::vector<CounterfactualPair> pairs;
  for (const auto& p : pair_text) pairs.push_back(parse_pair(p));
  if (given_x) *given_x -= 1;
  if (given_y) *given_y -= 1;
  const CounterfactualQuery query(std::move(pairs), given_x, given_y);
  query.check_arity(dataset.m, dataset.n);

  const auto experimental = dataset.experimental_distribution();
  const auto observational = dataset.observational_distribution();
  BoundsEvaluator evaluator(experimental, observational);
  const Interval bound = evaluator.bound(query);

  std::ostringstream text;
  text << inequality(bound, query.to_string(), options.precision) << '\n';
  text << "exact: " << exact_pair(bound) << '\n';
  outcome.result = {{"query", query.to_string()}, {"interval", interval_json(bound, options.precision)}};
  if (options.oracle) {
    const Interval lp = oracle_query_bounds(query, experimental, observational);
    const bool contained = bound.contains(lp);
    text << "oracle: " << inequality(lp, query.to_string(), options.precision) << '\n';
    text << "oracle exact: " << exact_pair(lp) << '\n';
    text << "containment: " << (contained ? "ok" : "violated") << '\n';
    outcome.result["oracle"] = interval_json(lp, options.precision);
    outcome.result["containment"] = contained;
  }
  outcome.text = text.str();
  return outcome;
}

std::vector<Rational> parse_vector(const std::string& text) {
  std::vector<Rational> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      values.push_back(parse_rational(item));
    } catch (const ParseError& e) {
      throw UsageError(std::string("--vector: ") + e.what());
    }
  }
  return values;
}

struct SimulateArgs {
  std::string vector = "0,1,1,-1,0,1,-1,-1,0";
  std::size_t count = 1000;
  std::uint64_t seed = SimConfig{}.seed;
  std::string out;
  std::string summary;
  std::size_t rows = 100;
  std::size_t rejection_cap = SimConfig{}.rejection_cap;
};

Outcome cmd_simulate(const SimulateArgs& args, const Options& options) {
  SimConfig config;
  config.benefit_vector = parse_vector(args.vector);
  const std::size_t expected = response_type_count(config.m, config.n);
  if (config.benefit_vector.size() != expected) {
    throw UsageError("--vector has " + std::to_string(config.benefit_vector.size()) + " entries, expected " +
                     std::to_string(expected));
  }
  if (args.count < 1) throw UsageError("--count must be >= 1");
  config.count = args.count;
  config.seed = args.seed;
  config.rejection_cap = args.rejection_cap;
  config.engine = engine_config(options);
  const int precision = options.precision_given ? options.precision : 6;

  const SimStudy study = run_study(config);
  if (!args.out.empty()) {
    std::ofstream file(args.out, std::ios::binary);
    if (!file) throw UsageError("cannot write " + args.out);
    file << records_csv(study.records, precision, args.rows);
  }
  Outcome outcome;
  outcome.result = summary_json(study.summary, precision);
  if (!args.summary.empty()) {
    std::ofstream file(args.summary, std::ios::binary);
    if (!file) throw UsageError("cannot write " + args.summary);
    file << outcome.result.dump(2) << '\n';
  }
  outcome.text = outcome.result.dump(2) + "\n";
  if (study.summary.partial) outcome.code = exit_budget;
  return outcome;
}

struct Ranked {
  std::string path;
  Interval interval;
  bool identified = false;
};

Outcome cmd_rank(const std::vector<std::string>& paths, const Options& options) {
  std::vector<Dataset> datasets;
  for (const auto& path : paths) datasets.push_back(load_dataset(path));
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    if (!datasets[k].benefit_vector) throw UsageError(paths[k] + " has no benefit_vector");
    if (datasets[k].m != datasets[0].m || datasets[k].n != datasets[0].n) {
      throw UsageError("rank needs datasets with equal (m, n); " + paths[k] + " differs from " + paths[0]);
    }
    if (*datasets[k].benefit_vector != *datasets[0].benefit_vector) {
      throw UsageError("rank needs equal benefit vectors; " + paths[k] + " differs from " + paths[0]);
    }
  }

  Outcome outcome;
  std::vector<Ranked> ranked;
  const EngineConfig config = engine_config(options);
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    Outcome failed;
    if (!check_tables(datasets[k], options, failed)) {
      failed.text = paths[k] + ": " + failed.text;
      return failed;
    }
    const BenefitFunction f = datasets[k].benefit_function();
    const auto experimental = datasets[k].experimental_distribution();
    Ranked entry{paths[k], {}, false};
    const auto identified = identify(f, experimental, config);
    if (identified.identifiable) {
      entry.interval = Interval::point(identified.value);
      entry.identified = true;
    } else {
      entry.interval = bound_benefit(f, experimental, datasets[k].observational_distribution(), config).interval;
    }
    ranked.push_back(std::move(entry));
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.interval.lower != b.interval.lower) return a.interval.lower > b.interval.lower;
    if (a.interval.midpoint() != b.interval.midpoint()) return a.interval.midpoint() > b.interval.midpoint();
    return a.path < b.path;
  });

  std::ostringstream text;
  json list = json::array();
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const auto& r = ranked[k];
    text << k + 1 << ". " << r.path << "  " << inequality(r.interval, "f(c)", options.precision) << "  "
         << exact_pair(r.interval) << (r.identified ? "  identified" : "") << '\n';
    list.push_back({{"rank", k + 1},
                    {"path", r.path},
                    {"identified", r.identified},
                    {"interval", interval_json(r.interval, options.precision)}});
  }
  outcome.text = text.str();
  outcome.result = {{"ranking", list}};
  return outcome;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const ArityMismatch*>(&e) || dynamic_cast<const InvalidQuery*>(&e)) {
    return exit_usage;
  }
  if (dynamic_cast<const BudgetExceeded*>(&e) || dynamic_cast<const SizeLimitExceeded*>(&e)) return exit_budget;
  if (dynamic_cast<const RejectionCapExceeded*>(&e)) return exit_rejection;
  if (dynamic_cast<const Error*>(&e)) return exit_invalid;
  return 1;
}

std::vector<std::string> without_manifest(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--manifest") {
      ++k;
      continue;
    }
    if (args[k].rfind("--manifest=", 0) == 0) continue;
    kept.push_back(args[k]);
  }
  return kept;
}

struct Invocation {
  Outcome outcome;
  std::string command;
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
  Options options;
  std::string manifest;
  bool help = false;
};

Outcome replay(const std::string& path, std::ostream& err);

// Parses and executes one command. Throws CLI::ParseError and library errors.
Invocation execute(const std::vector<std::string>& args, std::ostream& err) {
  Invocation inv;
  Options& options = inv.options;

  CLI::App app{"Bounds and identifiability of benefit functions for nonbinary unit selection", "unitsel"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", UNITSEL_VERSION);
  auto* precision = app.add_option("--precision", options.precision, "Digits after the decimal point")
                        ->check(CLI::Range(0, 40));
  app.add_option("--max-states", options.max_states, "Reduction search budget")->check(CLI::PositiveNumber);
  app.add_option("--manifest", inv.manifest, "Write a run manifest (JSON) to this path");
  app.add_flag("--json", options.as_json, "Print the machine-readable result instead of text");

  std::string path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a dataset against the probability invariants");
  validate_cmd->add_option("dataset", path, "Dataset JSON")->required();

  auto* identify_cmd = app.add_subcommand("identify", "Decide identifiability of the benefit function");
  identify_cmd->add_option("dataset", path, "Dataset JSON")->required();
  identify_cmd->add_flag("--trace", options.trace, "Print every reduction step");

  auto* bounds_cmd = app.add_subcommand("bounds", "Bound the benefit function");
  bounds_cmd->add_option("dataset", path, "Dataset JSON")->required();
  bounds_cmd->add_flag("--oracle", options.oracle, "Also solve the canonical LP and compare");
  bounds_cmd->add_flag("--trace", options.trace, "Print every reduction step");

  auto* oracle_cmd = app.add_subcommand("oracle", "Compare the bounds with the canonical LP range");
  oracle_cmd->add_option("dataset", path, "Dataset JSON")->required();
  oracle_cmd->add_flag("--trace", options.trace, "Print every reduction step");

  std::vector<std::string> pairs;
  std::optional<int> given_x;
  std::optional<int> given_y;
  auto* pc_cmd = app.add_subcommand("pc-bound", "Bound one probability of causation");
  pc_cmd->add_option("dataset", path, "Dataset JSON")->required();
  pc_cmd->add_option("--pair", pairs, "Counterfactual event j:i meaning Y_{x_j} = y_i (1-based)")->required();
  pc_cmd->add_option("--given-x", given_x, "Observed treatment p (1-based)");
  pc_cmd->add_option("--given-y", given_y, "Observed outcome q (1-based)");
  pc_cmd->add_flag("--oracle", options.oracle, "Also solve the canonical LP for the event");

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the simulated study (m = 2, n = 3)");
  simulate_cmd->add_option("--vector", sim.vector, "Benefit vector, comma separated, term order");
  simulate_cmd->add_option("--count", sim.count, "Number of populations");
  simulate_cmd->add_option("--seed", sim.seed, "RNG seed");
  simulate_cmd->add_option("--out", sim.out, "Per-population CSV");
  simulate_cmd->add_option("--rows", sim.rows, "CSV rows to write, 0 for all");
  simulate_cmd->add_option("--summary", sim.summary, "Summary JSON path");
  simulate_cmd->add_option("--rejection-cap", sim.rejection_cap, "Draws allowed per population")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> rank_paths;
  auto* rank_cmd = app.add_subcommand("rank", "Rank populations by their benefit bounds");
  rank_cmd->add_option("datasets", rank_paths, "Dataset JSON files")->required();

  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a manifest and compare outputs");
  replay_cmd->add_option("manifest", manifest_path, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    inv.help = true;
    inv.outcome.text = app.help();
    return inv;
  } catch (const CLI::CallForVersion&) {
    inv.help = true;
    inv.outcome.text = std::string(UNITSEL_VERSION) + "\n";
    return inv;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  options.precision_given = precision->count() > 0;

  if (validate_cmd->parsed()) {
    inv.command = "validate";
    inv.inputs = {path};
    inv.outcome = cmd_validate(path, options);
  } else if (identify_cmd->parsed()) {
    inv.command = "identify";
    inv.inputs = {path};
    inv.outcome = cmd_identify(path, options);
  } else if (bounds_cmd->parsed()) {
    inv.command = "bounds";
    inv.inputs = {path};
    inv.outcome = cmd_bounds(path, options);
  } else if (oracle_cmd->parsed()) {
    inv.command = "oracle";
    inv.inputs = {path};
    options.oracle = true;
    inv.outcome = cmd_bounds(path, options);
  } else if (pc_cmd->parsed()) {
    inv.command = "pc-bound";
    inv.inputs = {path};
    inv.outcome = cmd_pc_bound(path, pairs, given_x, given_y, options);
  } else if (simulate_cmd->parsed()) {
    inv.command = "simulate";
    inv.seed = sim.seed;
    inv.outcome = cmd_simulate(sim, options);
  } else if (rank_cmd->parsed()) {
    inv.command = "rank";
    inv.inputs = rank_paths;
    inv.outcome = cmd_rank(rank_paths, options);
  } else if (replay_cmd->parsed()) {
    inv.command = "replay";
    inv.inputs = {manifest_path};
    inv.manifest.clear();
    inv.outcome = replay(manifest_path, err);
  }
  return inv;
}

Outcome replay(const std::string& path, std::ostream& err) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot read manifest " + path);
  json manifest;
  try {
    manifest = json::parse(file);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!manifest.contains("args") || !manifest.contains("result") || !manifest.contains("exit_code")) {
    throw ParseError(path + ": not a run manifest");
  }
  const auto args = manifest.at("args").get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") throw UsageError("a manifest cannot replay another manifest");

  Invocation again = execute(args, err);
  Outcome outcome;
  const bool same = again.outcome.code == manifest.at("exit_code").get<int>() &&
                    again.outcome.result == manifest.at("result");
  outcome.code = same ? exit_ok : exit_invalid;
  outcome.text = same ? "replay: identical\n" : "replay: outputs differ\n";
  outcome.result = {{"identical", same}, {"result", again.outcome.result}};
  return outcome;
}

void write_manifest(const Invocation& inv, const std::vector<std::string>& args) {
  json manifest = {
      {"tool", "unitsel"},
      {"version", UNITSEL_VERSION},
      {"command", inv.command},
      {"args", without_manifest(args)},
      {"inputs", inv.inputs},
      {"seed", inv.seed ? json(*inv.seed) : json(nullptr)},
      {"config",
       {{"precision", inv.options.precision}, {"max_states", inv.options.max_states}}},
      {"exit_code", inv.outcome.code},
      {"result", inv.outcome.result},
  };
  std::ofstream file(inv.manifest, std::ios::binary);
  if (!file) throw UsageError("cannot write manifest " + inv.manifest);
  file << manifest.dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    Invocation inv = execute(args, err);
    if (inv.help) {
      out << inv.outcome.text;
      return exit_ok;
    }
    if (inv.options.as_json) {
      out << json{{"command", inv.command}, {"exit_code", inv.outcome.code}, {"result", inv.outcome.result}}.dump(2)
          << '\n';
    } else {
      out << inv.outcome.text;
    }
    if (!inv.manifest.empty()) write_manifest(inv, args);
    return inv.outcome.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace unitsel::cli
