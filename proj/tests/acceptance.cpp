// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each criterion also has a wall-clock budget.

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "iotc/atomizer.hpp"
#include "iotc/cli.hpp"
#include "iotc/planner.hpp"
#include "iotc/services.hpp"
#include "planning_oracle.hpp"
#include "test_support.hpp"

using namespace iotc;
using testing::fixture;
using testing::fixture_path;

namespace {

// A criterion returns an empty string on success or a failure reason.
using Check = std::function<std::string()>;

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // <= 0 means unbounded
  Check check;
};

#define EXPECT(cond, msg)                 \
  do {                                    \
    if (!(cond)) {                        \
      std::ostringstream why_;            \
      why_ << msg;                        \
      return why_.str();                  \
    }                                     \
  } while (0)

const Vocabulary& vocab() {
  static const Vocabulary v = load_vocabulary_file(testing::data_path("myont.vocab"));
  return v;
}

ThingDescription thing(const std::string& name) {
  return expand_thing(parse_json_preserving(fixture(name)), vocab());
}

// Symbols and parens of a .shop text, comments and whitespace dropped.
std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  bool comment = false;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char c : text) {
    if (comment) {
      comment = c != '\n';
      continue;
    }
    if (c == ';') {
      flush();
      comment = true;
    } else if (c == '(' || c == ')') {
      flush();
      out.emplace_back(1, c);
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

int run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

std::vector<Binding> bindings(const std::string& name) {
  return parse_bindings(parse_json_preserving(fixture(name)));
}

const PAtom kIotTask = make_atom("composeIoTServices", {"DS18B20", "long_LED"});

// --- criteria ---------------------------------------------------------------

std::string fixture_fidelity() {
  const auto p = build_problem("problem", "iot", {thing("arduino_yun.jsonld"), thing("littlebits_cloudbit.jsonld")},
                               {}, {kIotTask}, AtomizationMode::PaperCompat);
  EXPECT(p.initial_state.size() == 21, "expected 21 state atoms, got " << p.initial_state.size());
  EXPECT(p.task_list.size() == 1, "expected 1 task");
  const auto got = tokens(print_problem(p));
  const auto want = tokens(fixture("iot_problem.shop"));
  for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i)
    EXPECT(got[i] == want[i], "token " << i << ": got '" << got[i] << "', want '" << want[i] << "'");
  EXPECT(got.size() == want.size(), "token count " << got.size() << " vs " << want.size());
  return {};
}

std::string round_trip() {
  const auto d = parse_domain_text(fixture("iot_domain.shop"));
  const auto dtext = print_domain(d);
  EXPECT(parse_domain_text(dtext) == d, "domain fixture changed after print/parse");
  EXPECT(print_domain(parse_domain_text(dtext)) == dtext, "domain printing is not a fixpoint");
  const auto p = parse_problem_text(fixture("iot_problem.shop"));
  const auto ptext = print_problem(p);
  EXPECT(parse_problem_text(ptext) == p, "problem fixture changed after print/parse");
  EXPECT(print_problem(parse_problem_text(ptext)) == ptext, "problem printing is not a fixpoint");

  testing::Gen g(20240601);
  for (int i = 0; i < 1000; ++i) {
    const auto rd = testing::random_domain_ast(g);
    const auto rdt = print_domain(rd);
    EXPECT(parse_domain_text(rdt) == rd, "random domain " << i << " did not round-trip:\n" << rdt);
    const auto rp = testing::random_problem_ast(g);
    const auto rpt = print_problem(rp);
    EXPECT(parse_problem_text(rpt) == rp, "random problem " << i << " did not round-trip:\n" << rpt);
  }
  return {};
}

std::string planning_ground_truth() {
  const auto d = parse_domain_text(fixture("iot_domain.shop"));
  const auto p = parse_problem_text(fixture("iot_problem.shop"));
  const auto r = find_plans(d, p);
  EXPECT(r.plans.size() == 1, "expected one plan, got " << r.plans.size());
  const auto& plan = r.plans[0];
  EXPECT(plan.steps == std::vector<PAtom>{make_atom("!checkSensorActuator", {"DS18B20", "long_LED"})},
         "unexpected plan " << print_plan(plan));
  EXPECT(plan.total_cost == 1.0, "cost " << plan.total_cost);
  const auto final_state = replay_plan(d, p, plan);
  EXPECT(final_state.contains(make_atom("sensorCanConnectToActuator", {"DS18B20", "long_LED"})),
         "replay does not reach sensorCanConnectToActuator");
  return {};
}

std::string oracle_equivalence() {
  testing::Gen g(777);
  const int depth = 6;
  int with_plans = 0;
  for (int i = 0; i < 600; ++i) {
    const auto [d, p] = testing::random_planning_instance(g);
    const auto r = find_plans(d, p, {depth, 1000000});
    const auto expected = testing::brute_force_plans(d, p, depth);
    EXPECT(testing::as_step_sets(r.plans) == expected,
           "instance " << i << " differs from the oracle (" << r.plans.size() << " vs " << expected.size()
                       << " plans)\n" << print_domain(d) << print_problem(p));
    EXPECT(r.plans.size() == expected.size(), "instance " << i << " returned duplicate plans");
    if (!expected.empty()) ++with_plans;
  }
  // Guard against a generator that only produces trivially empty instances.
  EXPECT(with_plans >= 100, "only " << with_plans << " instances had plans");
  return {};
}

std::string unification_properties() {
  testing::Gen g(4242);
  int unified = 0;
  for (int i = 0; i < 12000; ++i) {
    const auto a = testing::random_unify_atom(g);
    const auto b = testing::random_unify_atom(g);
    const auto self = unify(a, a);
    EXPECT(self, "atom does not unify with itself: " << to_string(a));
    for (const auto& [var, value] : self->bindings())
      EXPECT(value.is_variable(), "self-unification bound " << var << " to a constant");
    const auto ab = unify(a, b);
    const auto ba = unify(b, a);
    EXPECT(ab.has_value() == ba.has_value(), "asymmetric result for " << to_string(a) << " / " << to_string(b));
    if (!ab) continue;
    ++unified;
    const auto ua = ab->apply(a);
    EXPECT(ua == ab->apply(b), "mgu does not equalize " << to_string(a) << " / " << to_string(b));
    EXPECT(ab->apply(ua) == ua, "substitution is not idempotent");
    EXPECT(ba->apply(b) == ba->apply(a), "reverse mgu does not equalize");
    EXPECT(testing::is_variant(ua, ba->apply(a)),
           "results differ beyond renaming: " << to_string(ua) << " vs " << to_string(ba->apply(a)));
  }
  EXPECT(unified >= 1000, "only " << unified << " pairs unified");
  return {};
}

std::string duplicate_members() {
  const auto doc = parse_json_preserving(fixture("littlebits_cloudbit.jsonld"));
  EXPECT(doc.count("myont.hasSecurityProblems") == 2,
         "hasSecurityProblems members: " << doc.count("myont.hasSecurityProblems"));
  EXPECT(doc.count("myont.supportsProtocols") == 1, "supportsProtocols members");
  const auto again = parse_json_preserving(serialize_json(doc));
  EXPECT(again == doc, "serialize/parse is not a fixpoint");
  EXPECT(serialize_json(again, 2) == serialize_json(doc, 2), "pretty form differs");
  return {};
}

std::string iot_scenario() {
  MockServer m({"127.0.0.1", 0, {{"DS18B20", 5.0}}, "celsius"});
  const std::vector<std::string> args{
      "compose", fixture_path("arduino_yun.jsonld"), fixture_path("littlebits_cloudbit.jsonld"),
      "--domain", fixture_path("iot_domain.shop"), "--task", to_string(kIotTask), "--mode", "paper-compat",
      "--bindings", fixture_path("bindings_iot.json"), "--threshold", fixture_path("threshold.json"),
      "--endpoint-base", m.base_url()};
  int code = run(args);
  EXPECT(code == 0, "compose at 5.0 exited " << code);
  EXPECT(m.actuator_last("long_LED") == 100.0, "actuator not at 100 after 5.0");
  m.seed_sensor("DS18B20", 21.0);
  code = run(args);
  EXPECT(code == 0, "compose at 21.0 exited " << code);
  EXPECT(m.actuator_last("long_LED") == 0.0, "actuator not at 0 after 21.0");

  const auto rule = parse_threshold(parse_json_preserving(fixture("threshold.json")));
  const Plan plan{{make_atom("!checkSensorActuator", {"DS18B20", "long_LED"})}, 1};
  ExecutionOptions opts;
  opts.base_url_override = m.base_url();
  const auto b = bindings("bindings_iot.json");
  for (double t : {rule.low - 1, rule.low, rule.low + 1, rule.high - 1, rule.high, rule.high + 1}) {
    m.seed_sensor("DS18B20", t);
    const auto report = execute_plan(plan, b, rule, opts);
    EXPECT(report.completed(), "execution failed at t=" << t << ": " << report.error);
    const double expected = decide_actuation({"DS18B20", t, "celsius", 0}, rule);
    EXPECT(m.actuator_last("long_LED") == expected, "t=" << t << " actuator " << m.actuator_last("long_LED").value_or(-1)
                                                          << " expected " << expected);
  }
  return {};
}

std::string cloud_scenario() {
  const auto d = parse_domain_text(fixture("cloud_domain.shop"));
  const auto cloud = parse_sawsdl(fixture("cloud_storage.wsdl"));
  const auto yun = thing("arduino_yun.jsonld");
  const auto p = build_problem("problem", d.name, {yun}, {cloud},
                               {make_atom("composeSensorToCloud", {"DS18B20", "putObject"})},
                               AtomizationMode::PaperCompat);
  const auto r = find_plans(d, p);
  EXPECT(r.plans.size() == 1, "expected one plan, got " << r.plans.size());
  EXPECT(r.plans[0].steps.size() == 2, "expected 2 steps, got " << r.plans[0].steps.size());

  MockServer m({"127.0.0.1", 0, {{"DS18B20", 19.5}}, "celsius"});
  ExecutionOptions opts;
  opts.base_url_override = m.base_url();
  opts.things = {yun};
  const auto report = execute_plan(r.plans[0], bindings("bindings_cloud.json"), ThresholdRule{}, opts);
  EXPECT(report.completed(), "execution failed: " << report.error);
  const auto stored = m.stored_objects();
  EXPECT(stored.size() == 1, "stored objects: " << stored.size());

  httplib::Client client(m.base_url());
  const auto res = client.Get("/storage/" + stored.begin()->first);
  EXPECT(res && res->status == 200, "stored object not retrievable");
  const auto doc = parse_json_preserving(res->body);
  EXPECT(doc.find("@context"), "stored document has no @context");
  for (const auto& term : collect_terms(doc))
    EXPECT(classify_term(vocab(), term) != TermKind::Unknown, "unknown term in stored document: " << term);
  return {};
}

std::string ranking() {
  const auto d = parse_domain_text(fixture("iot_domain.shop"));
  const auto p = parse_problem_text(fixture("iot_problem.shop"));
  const auto ranked = rank_plans(find_plans(d, p).plans, p);
  EXPECT(ranked.size() == 1 && ranked[0].score == 4.0,
         "single-plan score " << (ranked.empty() ? -1.0 : ranked[0].score));

  // Second actuator with no security problems, sharing WiFi with the sensor.
  auto alt = p;
  for (const char* s : {"(SemanticWebThing SemanticWebThing_5555)",
                        "(hasResources SemanticWebThing_5555 Actuator short_LED)",
                        "(supportsProtocol SemanticWebThing_5555 WiFi)"})
    alt.initial_state.push_back(parse_atom_text(s));
  alt.task_list = {make_atom("composeIoTServices", {"DS18B20", "long_LED"}),
                   make_atom("composeIoTServices", {"DS18B20", "short_LED"})};
  // Plan each alternative separately, in the order the user listed them.
  std::vector<Plan> plans;
  for (const auto& task : alt.task_list) {
    auto single = alt;
    single.task_list = {task};
    const auto r = find_plans(d, single);
    EXPECT(r.plans.size() == 1, "alternative " << to_string(task) << " has " << r.plans.size() << " plans");
    plans.push_back(r.plans[0]);
  }
  const auto order = rank_plans(plans, alt);
  EXPECT(order[0].plan.steps[0].args[1].text == "short_LED",
         "first ranked plan uses " << order[0].plan.steps[0].args[1].text);
  EXPECT(order[0].score < order[1].score, "scores " << order[0].score << " / " << order[1].score);
  return {};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "fixture fidelity: thing fixtures atomize to the problem fixture", 1, fixture_fidelity},
      {2, "round-trip: fixtures and 1000 random domains/problems", 10, round_trip},
      {3, "planning ground truth: one plan, cost 1, replay reaches the goal", 1, planning_ground_truth},
      {4, "oracle equivalence: 600 random instances vs brute force", 60, oracle_equivalence},
      {5, "unification properties over 12000 random pairs", 10, unification_properties},
      {6, "duplicate-member JSON retained and round-trips", 0, duplicate_members},
      {7, "IoT scenario: compose drives the actuator, threshold grid", 5, iot_scenario},
      {8, "cloud scenario: 2-step plan stores a known-term JSON-LD reading", 5, cloud_scenario},
      {9, "ranking: fewer security problems first, fixture plan score 4", 0, ranking},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string why;
    try {
      why = c.check();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (why.empty() && c.budget_s > 0 && secs > c.budget_s) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "took %.2fs, budget %.0fs", secs, c.budget_s);
      why = buf;
    }
    std::printf("%s [%d] %s (%.3fs)%s%s\n", why.empty() ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                why.empty() ? "" : ": ", why.c_str());
    if (!why.empty()) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
