#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "generators.hpp"
#include "iotc/atomizer.hpp"
#include "iotc/planner.hpp"
#include "planning_oracle.hpp"
#include "test_support.hpp"

using namespace iotc;

namespace {

const Domain& iot_domain() {
  static const Domain d = parse_domain_text(testing::fixture("iot_domain.shop"));
  return d;
}

const Problem& iot_problem() {
  static const Problem p = parse_problem_text(testing::fixture("iot_problem.shop"));
  return p;
}

}  // namespace

TEST_CASE("unify examples") {
  auto s = unify(make_atom("p", {"?x"}), make_atom("p", {"A"}));
  REQUIRE(s);
  CHECK(*s == Substitution{{"?x", Term{"A"}}});

  CHECK_FALSE(unify(make_atom("p", {"?x", "?x"}), make_atom("p", {"A", "B"})));
  CHECK_FALSE(unify(make_atom("p", {"A"}), make_atom("q", {"A"})));
  CHECK_FALSE(unify(make_atom("p", {"A"}), make_atom("p", {"A", "B"})));

  s = unify(make_atom("hasResources", {"?t", "Sensor", "?s"}),
            make_atom("hasResources", {"SemanticWebThing_2341", "Sensor", "DS18B20"}));
  REQUIRE(s);
  CHECK(*s == Substitution{{"?t", Term{"SemanticWebThing_2341"}}, {"?s", Term{"DS18B20"}}});

  s = unify(make_atom("p", {"?x", "?y"}), make_atom("p", {"?y", "A"}));
  REQUIRE(s);
  CHECK(s->apply(make_atom("p", {"?x", "?y"})) == make_atom("p", {"A", "A"}));

  Substitution cyc;
  CHECK(cyc.bind("?a", Term{"?b"}));
  CHECK_FALSE(cyc.bind("?b", Term{"?a"}));
  CHECK_FALSE(cyc.bind("?a", Term{"C"}));
  CHECK_FALSE(cyc.bind("?c", Term{"?c"}));
}

TEST_CASE("unification properties on random pairs") {
  testing::Gen g(99);
  for (int i = 0; i < 3000; ++i) {
    const auto a = testing::random_unify_atom(g);
    const auto b = testing::random_unify_atom(g);

    const auto self = unify(a, a);
    REQUIRE(self);
    for (const auto& [var, value] : self->bindings()) CHECK(value.is_variable());

    const auto ab = unify(a, b);
    const auto ba = unify(b, a);
    REQUIRE(ab.has_value() == ba.has_value());
    if (!ab) continue;
    const auto ua = ab->apply(a);
    CHECK(ua == ab->apply(b));
    CHECK(ab->apply(ua) == ua);
    CHECK(testing::is_variant(ua, ba->apply(a)));
  }
}

TEST_CASE("satisfy") {
  const State state(iot_problem().initial_state);
  const auto& op = iot_domain().operators[0];
  const Substitution s{{"?sensor", Term{"DS18B20"}}, {"?actuator", Term{"long_LED"}}};
  const auto r = satisfy(state, {}, op.precond, s);
  REQUIRE(r.substitutions.size() == 1);
  CHECK_FALSE(r.truncated);
  const auto& found = r.substitutions[0];
  CHECK(found.size() == 4);
  CHECK(found.resolve(Term{"?thingId1"}) == Term{"SemanticWebThing_2341"});
  CHECK(found.resolve(Term{"?thingId2"}) == Term{"SemanticWebThing_1234"});

  const auto empty = satisfy(state, {}, {}, s);
  REQUIRE(empty.substitutions.size() == 1);
  CHECK(empty.substitutions[0] == s);

  CHECK(satisfy(state, {}, {make_atom("missing", {"?x"})}).substitutions.empty());

  const std::vector<AxiomDef> axioms{
      {make_atom("secure", {"?t"}),
       {{make_atom("SemanticWebThing", {"?t"}), make_atom("supportsProtocol", {"?t", "Ethernet"})}}}};
  const auto derived = satisfy(state, axioms, {make_atom("secure", {"?who"})});
  REQUIRE(derived.substitutions.size() == 1);
  CHECK(derived.substitutions[0] == Substitution{{"?who", Term{"SemanticWebThing_2341"}}});

  const std::vector<AxiomDef> looping{{make_atom("loop", {"?x"}), {{make_atom("loop", {"?x"})}}}};
  const auto cut = satisfy(state, looping, {make_atom("loop", {"A"})}, {}, 10);
  CHECK(cut.substitutions.empty());
  CHECK(cut.truncated);
}

TEST_CASE("apply_operator") {
  const State state(iot_problem().initial_state);
  const auto& op = iot_domain().operators[0];
  const Substitution s{{"?sensor", Term{"DS18B20"}}, {"?actuator", Term{"long_LED"}}};
  const auto ground = satisfy(state, {}, op.precond, s).substitutions.at(0);
  const auto next = apply_operator(state, op, ground);
  CHECK(next.size() == state.size() + 1);
  CHECK(next.contains(make_atom("sensorCanConnectToActuator", {"DS18B20", "long_LED"})));

  OperatorDef noop{make_atom("!noop", {}), {}, {}, {}, 1.0};
  CHECK(apply_operator(state, noop, {}) == state);

  OperatorDef del{make_atom("!del", {}), {}, {make_atom("absent", {}), make_atom("x", {})},
                  {make_atom("x", {})}, 1.0};
  const auto after = apply_operator(state, del, {});
  CHECK(after.contains(make_atom("x", {})));  // deletes happen before adds

  OperatorDef open{make_atom("!o", {"?v"}), {}, {}, {make_atom("p", {"?v"})}, 1.0};
  CHECK_THROWS_AS(apply_operator(state, open, {}), PlanError);
}

TEST_CASE("find_plans on the IoT scenario") {
  const auto r = find_plans(iot_domain(), iot_problem());
  CHECK(r.outcome == PlanOutcome::Found);
  REQUIRE(r.plans.size() == 1);
  CHECK(r.plans[0].steps ==
        std::vector<PAtom>{make_atom("!checkSensorActuator", {"DS18B20", "long_LED"})});
  CHECK(r.plans[0].total_cost == 1.0);
  const auto final_state = replay_plan(iot_domain(), iot_problem(), r.plans[0]);
  CHECK(final_state.contains(make_atom("sensorCanConnectToActuator", {"DS18B20", "long_LED"})));

  auto none = iot_problem();
  none.task_list.clear();
  const auto e = find_plans(iot_domain(), none);
  REQUIRE(e.plans.size() == 1);
  CHECK(e.plans[0].steps.empty());
  CHECK(e.plans[0].total_cost == 0.0);

  auto bad = iot_problem();
  bad.task_list = {make_atom("composeIoTServices", {"DS18B20", "nosuch"})};
  const auto n = find_plans(iot_domain(), bad);
  CHECK(n.outcome == PlanOutcome::NoPlan);
  CHECK(n.plans.empty());

  auto other = iot_problem();
  other.domain_name = "elsewhere";
  CHECK_THROWS_AS(find_plans(iot_domain(), other), PlanError);
  CHECK_THROWS_AS(find_plans(iot_domain(), iot_problem(), {0, 1}), PlanError);
}

TEST_CASE("recursive methods are cut by the depth limit") {
  const auto d = parse_domain_text(
      "(defdomain r ((:method (forever) () ((forever)))"
      "(:method (count) () ((!tick) (count)) () ((!tick)))"
      "(:operator (!tick) () () ())))");
  const auto p = parse_problem_text("(defproblem p r () ((forever)))");
  const auto r = find_plans(d, p, {20, 8});
  CHECK(r.outcome == PlanOutcome::Truncated);
  CHECK(r.plans.empty());

  const auto q = parse_problem_text("(defproblem q r () ((count)))");
  const auto c = find_plans(d, q, {9, 100});
  CHECK(c.outcome == PlanOutcome::Found);
  CHECK(c.truncated);
  CHECK(c.plans.size() == 4);  // 1..4 ticks fit in 9 expansions and applications
  for (std::size_t i = 1; i < c.plans.size(); ++i)
    CHECK(c.plans[i].steps.size() != c.plans[i - 1].steps.size());
  CHECK(find_plans(d, q, {9, 2}).plans.size() == 2);
}

TEST_CASE("planner matches the brute-force oracle and plans replay") {
  testing::Gen g(2024);
  const int depth = 6;
  for (int i = 0; i < 150; ++i) {
    const auto [d, p] = testing::random_planning_instance(g);
    const auto r = find_plans(d, p, {depth, 1000000});
    const auto expected = testing::brute_force_plans(d, p, depth);
    CHECK_MESSAGE(testing::as_step_sets(r.plans) == expected, print_domain(d) << print_problem(p));
    CHECK(r.plans.size() == expected.size());
    for (const auto& plan : r.plans) CHECK_NOTHROW(replay_plan(d, p, plan, depth));
    const auto again = find_plans(d, p, {depth, 1000000});
    CHECK(again.plans == r.plans);
  }
}

TEST_CASE("ranking") {
  const auto r = find_plans(iot_domain(), iot_problem());
  const auto ranked = rank_plans(r.plans, iot_problem());
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].score == 4.0);
  CHECK(ranked[0].score_breakdown.at("security") == 4.0);
  CHECK(ranked[0].score_breakdown.at("protocol") == 0.0);
  CHECK(rank_plans({}, iot_problem()).empty());

  const auto weighted = rank_plans(r.plans, iot_problem(), {0.5, 3.0});
  CHECK(weighted[0].score == 2.0);

  const auto json = serialize_json(to_json(ranked[0]));
  CHECK(json.find("\"score\":4") != std::string::npos);
}

TEST_CASE("ranking prefers the actuator with fewer security problems") {
  auto p = iot_problem();
  const std::vector<std::string> safe{"(SemanticWebThing SemanticWebThing_77)",
                                      "(hasResources SemanticWebThing_77 Actuator safe_LED)",
                                      "(supportsProtocol SemanticWebThing_77 WiFi)"};
  for (const auto& s : safe) p.initial_state.push_back(parse_atom_text(s));
  const Plan risky{{make_atom("!checkSensorActuator", {"DS18B20", "long_LED"})}, 1};
  const Plan better{{make_atom("!checkSensorActuator", {"DS18B20", "safe_LED"})}, 1};
  const auto ranked = rank_plans({risky, better}, p);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].plan == better);
  CHECK(ranked[0].score == 2.0);
  CHECK(ranked[1].score == 4.0);

  // A pair of things with no common protocol costs one protocol point.
  auto q = p;
  q.initial_state.back() = parse_atom_text("(supportsProtocol SemanticWebThing_77 Zigbee)");
  const auto r2 = rank_plans({better}, q);
  CHECK(r2[0].score_breakdown.at("protocol") == 1.0);
  CHECK(r2[0].score == 3.0);

  // Ties keep discovery order.
  const auto tie = rank_plans({risky, risky}, p);
  CHECK(tie[0].score == tie[1].score);
}

TEST_CASE("scores do not depend on thing id spelling") {
  auto renamed = iot_problem();
  for (auto& a : renamed.initial_state)
    for (auto& t : a.args) {
      if (t.text == "SemanticWebThing_2341") t.text = normalize_symbol("9 9 9", SymbolRole::ThingId);
      if (t.text == "SemanticWebThing_1234") t.text = normalize_symbol("abc", SymbolRole::ThingId);
    }
  const auto plans = find_plans(iot_domain(), iot_problem()).plans;
  CHECK(rank_plans(plans, renamed)[0].score == rank_plans(plans, iot_problem())[0].score);
}
