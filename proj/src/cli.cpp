#include "iotc/cli.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "iotc/atomizer.hpp"
#include "iotc/planner.hpp"
#include "iotc/services.hpp"

#ifndef IOTC_DATA_DIR
#define IOTC_DATA_DIR "data"
#endif

namespace iotc {

std::string default_vocabulary_path() {
  return std::string(IOTC_DATA_DIR) + "/myont.vocab";
}

namespace {

// Error raised by one pipeline stage; the message is prefixed by the stage.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what) {}
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string extension(const std::string& path) {
  return std::filesystem::path(path).extension().string();
}

struct GlobalOptions {
  std::string vocab = default_vocabulary_path();
  std::string format = "text";
  std::string output;
};

struct Inputs {
  std::vector<ThingDescription> things;
  std::vector<CloudServiceDescription> clouds;
};

// Parses and validates every input; diagnostics go to `err` as
// "<path>: <message>". Returns the number of failing files.
std::size_t load_inputs(const std::vector<std::string>& paths, const Vocabulary& vocab,
                        Inputs& inputs, std::ostream& err) {
  std::size_t failures = 0;
  for (const auto& path : paths) {
    try {
      if (!std::filesystem::is_regular_file(path))
        throw std::runtime_error("cannot read " + path);
      const auto ext = extension(path);
      if (ext == ".jsonld" || ext == ".json") {
        auto thing = expand_thing(parse_json_preserving(read_file(path)), vocab);
        const auto diags = validate_description(thing, vocab);
        for (const auto& d : diags) err << path << ": " << d << "\n";
        if (!diags.empty()) {
          ++failures;
          continue;
        }
        inputs.things.push_back(std::move(thing));
      } else if (ext == ".wsdl" || ext == ".xml") {
        inputs.clouds.push_back(parse_sawsdl(read_file(path)));
      } else {
        err << path << ": unsupported input type (expected .jsonld or .wsdl)\n";
        ++failures;
      }
    } catch (const std::exception& e) {
      err << path << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures;
}

AtomizationMode parse_mode(const std::string& mode) {
  return mode == "paper-compat" ? AtomizationMode::PaperCompat : AtomizationMode::General;
}

std::vector<PAtom> parse_tasks(const std::vector<std::string>& tasks) {
  std::vector<PAtom> out;
  for (const auto& t : tasks) {
    auto atom = parse_atom_text(t);
    if (!atom.is_ground()) throw ShopError("task " + t + " is not ground");
    out.push_back(std::move(atom));
  }
  return out;
}

void emit(const GlobalOptions& g, std::ostream& out, const std::string& text) {
  if (g.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(g.output, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + g.output);
  file << text;
}

std::string ranked_text(const std::vector<RankedPlan>& ranked) {
  std::string text;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& r = ranked[i];
    text += "; plan " + std::to_string(i + 1) + " score " + format_number(r.score);
    std::string sep = " (";
    for (const auto& [metric, value] : r.score_breakdown) {
      text += sep + metric + " " + format_number(value);
      sep = ", ";
    }
    text += ")\n" + print_plan(r.plan);
  }
  return text;
}

JsonNode ranked_json(const std::vector<RankedPlan>& ranked) {
  JsonNode arr = JsonNode::array();
  for (const auto& r : ranked) arr.push_back(to_json(r));
  return arr;
}

int outcome_code(const PlanResult& result) {
  switch (result.outcome) {
    case PlanOutcome::Found: return kExitOk;
    case PlanOutcome::NoPlan: return kExitNoPlan;
    case PlanOutcome::Truncated: return kExitTruncated;
  }
  return kExitNoPlan;
}

std::string outcome_message(const PlanResult& result) {
  return result.outcome == PlanOutcome::Truncated
             ? "search truncated at the depth limit before any plan was found\n"
             : "no plan\n";
}

// --- subcommands ------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> paths;
  bool dump = false;
};

int cmd_validate(const GlobalOptions& g, const ValidateArgs& a, std::ostream& out,
                 std::ostream& err) {
  const auto vocab = load_vocabulary_file(g.vocab);
  Inputs inputs;
  const auto failures = load_inputs(a.paths, vocab, inputs, err);
  if (a.dump) {
    JsonNode arr = JsonNode::array();
    for (const auto& t : inputs.things) arr.push_back(to_json(t));
    for (const auto& c : inputs.clouds) arr.push_back(to_json(c));
    emit(g, out, serialize_json(arr, 2) + "\n");
  }
  return failures == 0 ? kExitOk : kExitInputError;
}

struct AtomizeArgs {
  std::vector<std::string> paths;
  std::string mode = "general";
  std::vector<std::string> tasks;
  std::string domain_name = "iot";
  std::string problem_name = "problem";
};

int cmd_atomize(const GlobalOptions& g, const AtomizeArgs& a, std::ostream& out,
                std::ostream& err) {
  const auto vocab = load_vocabulary_file(g.vocab);
  Inputs inputs;
  if (load_inputs(a.paths, vocab, inputs, err) != 0) return kExitInputError;
  const auto problem = build_problem(a.problem_name, a.domain_name, inputs.things,
                                     inputs.clouds, parse_tasks(a.tasks), parse_mode(a.mode));
  emit(g, out, print_problem(problem));
  return kExitOk;
}

struct PlanArgs {
  std::string domain;
  std::string problem;
  SearchLimits limits;
  bool rank = false;
  bool json = false;
  RankWeights weights;
};

int cmd_plan(const GlobalOptions& g, const PlanArgs& a, std::ostream& out, std::ostream& err) {
  Domain domain;
  Problem problem;
  try {
    domain = parse_domain_text(read_file(a.domain));
  } catch (const std::exception& e) {
    throw StageError("domain " + a.domain, e.what());
  }
  try {
    problem = parse_problem_text(read_file(a.problem));
  } catch (const std::exception& e) {
    throw StageError("problem " + a.problem, e.what());
  }
  const auto result = find_plans(domain, problem, a.limits);
  if (result.plans.empty()) {
    err << outcome_message(result);
    return outcome_code(result);
  }
  const bool json = a.json || g.format == "json";
  std::string text;
  if (a.rank) {
    const auto ranked = rank_plans(result.plans, problem, a.weights);
    text = json ? serialize_json(ranked_json(ranked), 2) + "\n" : ranked_text(ranked);
  } else if (json) {
    JsonNode arr = JsonNode::array();
    for (const auto& p : result.plans) arr.push_back(plan_to_json(p));
    text = serialize_json(arr, 2) + "\n";
  } else {
    for (const auto& p : result.plans) text += print_plan(p);
  }
  emit(g, out, text);
  return kExitOk;
}

struct ComposeArgs {
  std::vector<std::string> paths;
  std::string domain;
  std::vector<std::string> tasks;
  std::string mode = "general";
  std::string bindings;
  std::string threshold;
  std::string endpoint_base;
  SearchLimits limits;
  RankWeights weights;
  bool dry_run = false;
};

int cmd_compose(const GlobalOptions& g, const ComposeArgs& a, std::ostream& out,
                std::ostream& err) {
  Vocabulary vocab;
  Domain domain;
  Inputs inputs;
  Problem problem;
  try {
    vocab = load_vocabulary_file(g.vocab);
  } catch (const std::exception& e) {
    throw StageError("vocabulary", e.what());
  }
  if (load_inputs(a.paths, vocab, inputs, err) != 0) {
    err << "validate: input errors\n";
    return kExitInputError;
  }
  try {
    domain = parse_domain_text(read_file(a.domain));
  } catch (const std::exception& e) {
    throw StageError("domain", e.what());
  }
  try {
    problem = build_problem("problem", domain.name, inputs.things, inputs.clouds,
                            parse_tasks(a.tasks), parse_mode(a.mode));
  } catch (const std::exception& e) {
    throw StageError("atomize", e.what());
  }

  PlanResult result;
  try {
    result = find_plans(domain, problem, a.limits);
  } catch (const std::exception& e) {
    throw StageError("plan", e.what());
  }
  if (result.plans.empty()) {
    err << "plan: " << outcome_message(result);
    return outcome_code(result);
  }
  const auto ranked = rank_plans(result.plans, problem, a.weights);
  const bool json = g.format == "json";

  if (a.dry_run) {
    emit(g, out, json ? serialize_json(ranked_json(ranked), 2) + "\n" : ranked_text(ranked));
    return kExitOk;
  }

  std::vector<Binding> bindings;
  ThresholdRule rule;
  try {
    bindings = parse_bindings(parse_json_preserving(read_file(a.bindings)));
    if (!a.threshold.empty()) rule = parse_threshold(parse_json_preserving(read_file(a.threshold)));
  } catch (const std::exception& e) {
    throw StageError("config", e.what());
  }
  ExecutionOptions options;
  options.things = inputs.things;
  if (!a.endpoint_base.empty()) options.base_url_override = a.endpoint_base;
  const auto report = execute_plan(ranked.front().plan, bindings, rule, options);

  std::string text;
  if (json) {
    JsonNode o = JsonNode::object();
    o.add("plan", to_json(ranked.front()));
    o.add("execution", to_json(report));
    text = serialize_json(o, 2) + "\n";
  } else {
    text = ranked_text({ranked.front()});
    for (const auto& rec : report.records) {
      text += "; " + std::string(to_string(rec.role)) + " " + to_string(rec.step);
      if (!rec.endpoint.empty()) text += " " + rec.endpoint + " -> " + std::to_string(rec.response_status);
      if (!rec.request_payload.empty() && rec.role == StepRole::Actuate)
        text += " " + rec.request_payload;
      if (rec.role == StepRole::Decide) text += " -> " + rec.response_body;
      text += "\n";
    }
    text += report.completed() ? "; execution completed\n"
                               : "; execution failed at step " +
                                     std::to_string(report.failed_step) + ": " + report.error + "\n";
  }
  emit(g, out, text);
  if (!report.completed()) {
    err << "execute: " << report.error << "\n";
    return kExitExecutionFailed;
  }
  return kExitOk;
}

struct MockArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> sensors;
};

MockServer* g_serving = nullptr;

extern "C" void handle_stop_signal(int) {
  if (g_serving) g_serving->stop();
}

int cmd_mock_serve(const MockArgs& a, std::ostream& out, std::ostream& err) {
  MockConfig cfg;
  cfg.host = a.host;
  cfg.port = a.port;
  for (const auto& s : a.sensors) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      err << "--sensor expects NAME=VALUE, got '" << s << "'\n";
      return kExitInputError;
    }
    cfg.sensors[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
  }
  MockServer server(cfg);
  out << "listening on " << server.base_url() << std::endl;
  g_serving = &server;
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  server.wait();
  g_serving = nullptr;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compose semantically annotated IoT and cloud services with HTN planning",
               "iotcompose"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--vocab", g.vocab, "Vocabulary file")->capture_default_str();
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("-o,--output", g.output, "Write output to this file");

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate annotations");
  validate_cmd->add_option("paths", validate.paths, ".jsonld / .wsdl files")->required();
  validate_cmd->add_flag("--dump", validate.dump, "Print the canonical JSON descriptions");

  auto add_limits = [](CLI::App* cmd, SearchLimits& limits) {
    cmd->add_option("--max-plans", limits.max_plans)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--max-depth", limits.max_depth)->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto add_weights = [](CLI::App* cmd, RankWeights& w) {
    cmd->add_option("--security-weight", w.security)->capture_default_str();
    cmd->add_option("--protocol-weight", w.protocol)->capture_default_str();
  };
  const auto modes = CLI::IsMember({"general", "paper-compat"});

  AtomizeArgs atomize;
  auto* atomize_cmd = app.add_subcommand("atomize", "Compile annotations into a problem file");
  atomize_cmd->add_option("paths", atomize.paths, ".jsonld / .wsdl files")->required();
  atomize_cmd->add_option("--mode", atomize.mode)->check(modes)->capture_default_str();
  atomize_cmd->add_option("--task", atomize.tasks, "Task atom, e.g. \"(composeIoTServices DS18B20 long_LED)\"");
  atomize_cmd->add_option("--domain-name", atomize.domain_name)->capture_default_str();
  atomize_cmd->add_option("--problem-name", atomize.problem_name)->capture_default_str();

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Solve a problem against a domain");
  plan_cmd->add_option("--domain", plan.domain)->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--problem", plan.problem)->required()->check(CLI::ExistingFile);
  add_limits(plan_cmd, plan.limits);
  plan_cmd->add_flag("--rank", plan.rank, "Rank plans by non-functional properties");
  plan_cmd->add_flag("--json", plan.json, "JSON output");
  add_weights(plan_cmd, plan.weights);

  ComposeArgs compose;
  auto* compose_cmd = app.add_subcommand("compose", "Validate, atomize, plan, rank and execute");
  compose_cmd->add_option("paths", compose.paths, ".jsonld / .wsdl files")->required();
  compose_cmd->add_option("--domain", compose.domain)->required()->check(CLI::ExistingFile);
  compose_cmd->add_option("--task", compose.tasks)->required();
  compose_cmd->add_option("--mode", compose.mode)->check(modes)->capture_default_str();
  compose_cmd->add_option("--bindings", compose.bindings)->check(CLI::ExistingFile);
  compose_cmd->add_option("--threshold", compose.threshold)->check(CLI::ExistingFile);
  compose_cmd->add_option("--endpoint-base", compose.endpoint_base,
                          "Override every binding base_url");
  compose_cmd->add_flag("--dry-run", compose.dry_run, "Stop after ranking");
  add_limits(compose_cmd, compose.limits);
  add_weights(compose_cmd, compose.weights);

  MockArgs mock;
  auto* mock_cmd = app.add_subcommand("mock-serve", "Serve mock device, GSN and storage endpoints");
  mock_cmd->add_option("--host", mock.host)->capture_default_str();
  mock_cmd->add_option("--port", mock.port)->capture_default_str();
  mock_cmd->add_option("--sensor", mock.sensors, "Seed a sensor, NAME=VALUE");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*validate_cmd) return cmd_validate(g, validate, out, err);
    if (*atomize_cmd) return cmd_atomize(g, atomize, out, err);
    if (*plan_cmd) return cmd_plan(g, plan, out, err);
    if (*compose_cmd) {
      if (!compose.dry_run && compose.bindings.empty()) {
        err << "compose: --bindings is required unless --dry-run is given\n";
        return kExitInputError;
      }
      return cmd_compose(g, compose, out, err);
    }
    if (*mock_cmd) return cmd_mock_serve(mock, out, err);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace iotc
