#include "iotc/planner.hpp"

#include <algorithm>
#include <functional>

namespace iotc {

Substitution::Substitution(
    std::initializer_list<std::pair<const std::string, Term>> init) {
  for (const auto& [var, value] : init)
    if (!bind(var, value)) throw PlanError("invalid binding for " + var);
}

Term Substitution::resolve(const Term& t) const {
  Term cur = t;
  while (cur.is_variable()) {
    auto it = bindings_.find(cur.text);
    if (it == bindings_.end()) break;
    cur = it->second;
  }
  return cur;
}

PAtom Substitution::apply(const PAtom& a) const {
  PAtom out{a.head, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(resolve(t));
  return out;
}

std::vector<PAtom> Substitution::apply(const std::vector<PAtom>& atoms) const {
  std::vector<PAtom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(apply(a));
  return out;
}

bool Substitution::bind(const std::string& var, const Term& value) {
  if (var.empty() || var.front() != '?' || bindings_.count(var)) return false;
  if (resolve(value) == Term{var}) return false;
  bindings_.emplace(var, value);
  return true;
}

const Term* Substitution::lookup(const std::string& var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? nullptr : &it->second;
}

std::optional<Substitution> unify(const PAtom& a, const PAtom& b,
                                  const Substitution& s) {
  if (a.head != b.head || a.args.size() != b.args.size()) return std::nullopt;
  Substitution r = s;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    const Term x = r.resolve(a.args[i]);
    const Term y = r.resolve(b.args[i]);
    if (x == y) continue;
    if (x.is_variable()) {
      if (!r.bind(x.text, y)) return std::nullopt;
    } else if (y.is_variable()) {
      if (!r.bind(y.text, x)) return std::nullopt;
    } else {
      return std::nullopt;
    }
  }
  return r;
}

State::State(const std::vector<PAtom>& atoms) {
  for (const auto& a : atoms) insert(a);
}

bool State::insert(const PAtom& a) {
  if (!a.is_ground()) throw PlanError("state atoms must be ground: " + to_string(a));
  if (!members_.insert(a).second) return false;
  index_[a.head].push_back(a);
  return true;
}

bool State::erase(const PAtom& a) {
  if (!members_.erase(a)) return false;
  auto& bucket = index_[a.head];
  bucket.erase(std::find(bucket.begin(), bucket.end(), a));
  return true;
}

const std::vector<PAtom>& State::with_head(const std::string& head) const {
  static const std::vector<PAtom> kEmpty;
  auto it = index_.find(head);
  return it == index_.end() ? kEmpty : it->second;
}

void check_limits(const SearchLimits& limits) {
  if (limits.max_depth < 1 || limits.max_plans < 1)
    throw PlanError("search limits must be at least 1");
}

namespace {

// Axiom variables are renamed apart with a fresh `#n` suffix per use.
class Prover {
 public:
  using Emit = std::function<bool(const Substitution&)>;

  Prover(const State& state, const std::vector<AxiomDef>& axioms, int max_depth)
      : state_(state), axioms_(axioms), max_depth_(max_depth) {}

  bool truncated() const { return truncated_; }

  // Returns false once `emit` asks to stop.
  bool solve(const Conjunction& goals, std::size_t index, const Substitution& s,
             int depth, const Emit& emit) {
    if (index == goals.size()) return emit(s);
    return solve_atom(goals[index], s, depth, [&](const Substitution& next) {
      return solve(goals, index + 1, next, depth, emit);
    });
  }

 private:
  bool solve_atom(const PAtom& goal, const Substitution& s, int depth,
                  const Emit& emit) {
    const PAtom g = s.apply(goal);
    for (const auto& fact : state_.with_head(g.head)) {
      if (fact.args.size() != g.args.size()) continue;
      if (auto next = unify(g, fact, s))
        if (!emit(*next)) return false;
    }
    for (const auto& ax : axioms_) {
      if (ax.head.head != g.head || ax.head.args.size() != g.args.size()) continue;
      const std::string suffix = "#" + std::to_string(++rename_counter_);
      auto rename = [&](const PAtom& a) {
        PAtom r = a;
        for (auto& t : r.args)
          if (t.is_variable()) t.text += suffix;
        return r;
      };
      auto next = unify(rename(ax.head), g, s);
      if (!next) continue;
      if (depth + 1 > max_depth_) {
        truncated_ = true;
        continue;
      }
      for (const auto& tail : ax.tails) {
        Conjunction renamed;
        for (const auto& a : tail) renamed.push_back(rename(a));
        if (!solve(renamed, 0, *next, depth + 1, emit)) return false;
      }
    }
    return true;
  }

  const State& state_;
  const std::vector<AxiomDef>& axioms_;
  int max_depth_;
  bool truncated_ = false;
  unsigned rename_counter_ = 0;
};

bool is_renamed(const std::string& var) {
  return var.find('#') != std::string::npos;
}

// Drops axiom-internal variables, resolving through them first.
Substitution compact(const Substitution& s, const Substitution& base) {
  Substitution out = base;
  for (const auto& [var, value] : s.bindings()) {
    if (is_renamed(var) || base.lookup(var)) continue;
    out.bind(var, s.resolve(value));
  }
  return out;
}

}  // namespace

SatisfyResult satisfy(const State& state, const std::vector<AxiomDef>& axioms,
                      const Conjunction& conjunction, const Substitution& s,
                      int max_depth) {
  Prover prover(state, axioms, max_depth);
  SatisfyResult result;
  prover.solve(conjunction, 0, s, 0, [&](const Substitution& found) {
    Substitution c = compact(found, s);
    if (std::find(result.substitutions.begin(), result.substitutions.end(), c) ==
        result.substitutions.end())
      result.substitutions.push_back(std::move(c));
    return true;
  });
  result.truncated = prover.truncated();
  return result;
}

State apply_operator(const State& state, const OperatorDef& op, const Substitution& s) {
  const auto deletes = s.apply(op.delete_list);
  const auto adds = s.apply(op.add_list);
  for (const auto* list : {&deletes, &adds})
    for (const auto& a : *list)
      if (!a.is_ground())
        throw PlanError("operator " + to_string(op.head) +
                        " instantiates a non-ground effect " + to_string(a));
  State next = state;
  for (const auto& a : deletes) next.erase(a);
  for (const auto& a : adds) next.insert(a);
  return next;
}

namespace {

class Searcher {
 public:
  Searcher(const Domain& domain, const SearchLimits& limits)
      : domain_(domain), limits_(limits) {}

  void run(const State& state, std::vector<PAtom> tasks) {
    std::vector<PAtom> steps;
    search(state, tasks, steps, 0.0, 0);
  }

  PlanResult result() && {
    PlanResult r;
    r.plans = std::move(plans_);
    r.truncated = truncated_;
    r.outcome = !r.plans.empty() ? PlanOutcome::Found
                : truncated_     ? PlanOutcome::Truncated
                                 : PlanOutcome::NoPlan;
    return r;
  }

 private:
  bool done() const { return plans_.size() >= static_cast<std::size_t>(limits_.max_plans); }

  SatisfyResult holds(const State& state, const Conjunction& c, const Substitution& s) {
    auto r = satisfy(state, domain_.axioms, c, s, limits_.max_depth);
    if (r.truncated) truncated_ = true;
    return r;
  }

  void search(const State& state, const std::vector<PAtom>& tasks,
              std::vector<PAtom>& steps, double cost, int depth) {
    if (done()) return;
    if (tasks.empty()) {
      Plan p{steps, cost};
      if (std::none_of(plans_.begin(), plans_.end(),
                       [&](const Plan& q) { return q.steps == p.steps; }))
        plans_.push_back(std::move(p));
      return;
    }
    if (depth >= limits_.max_depth) {
      truncated_ = true;
      return;
    }
    const PAtom& task = tasks.front();
    const std::vector<PAtom> rest(tasks.begin() + 1, tasks.end());

    if (task.is_primitive()) {
      for (const auto& op : domain_.operators) {
        auto head = unify(op.head, task);
        if (!head) continue;
        for (const auto& s : holds(state, op.precond, *head).substitutions) {
          const State next = apply_operator(state, op, s);
          steps.push_back(s.apply(op.head));
          search(next, rest, steps, cost + op.cost, depth + 1);
          steps.pop_back();
          if (done()) return;
        }
      }
      return;
    }

    for (const auto& m : domain_.methods) {
      auto head = unify(m.head, task);
      if (!head) continue;
      for (const auto& branch : m.branches) {
        for (const auto& s : holds(state, branch.precond, *head).substitutions) {
          std::vector<PAtom> expanded = s.apply(branch.subtasks);
          expanded.insert(expanded.end(), rest.begin(), rest.end());
          search(state, expanded, steps, cost, depth + 1);
          if (done()) return;
        }
      }
    }
  }

  const Domain& domain_;
  SearchLimits limits_;
  std::vector<Plan> plans_;
  bool truncated_ = false;
};

}  // namespace

PlanResult find_plans(const Domain& domain, const Problem& problem,
                      const SearchLimits& limits) {
  check_limits(limits);
  if (problem.domain_name != domain.name)
    throw PlanError("problem targets domain '" + problem.domain_name +
                    "' but the domain is '" + domain.name + "'");
  check_problem(problem);
  Searcher searcher(domain, limits);
  searcher.run(State(problem.initial_state), problem.task_list);
  return std::move(searcher).result();
}

State replay_plan(const Domain& domain, const Problem& problem, const Plan& plan,
                  int max_depth) {
  State state(problem.initial_state);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    bool applied = false;
    for (const auto& op : domain.operators) {
      auto head = unify(op.head, step);
      if (!head) continue;
      auto sat = satisfy(state, domain.axioms, op.precond, *head, max_depth);
      if (sat.substitutions.empty()) continue;
      state = apply_operator(state, op, sat.substitutions.front());
      applied = true;
      break;
    }
    if (!applied)
      throw PlanError("step " + std::to_string(i) + " " + to_string(step) +
                      " is not applicable");
  }
  return state;
}

std::vector<RankedPlan> rank_plans(const std::vector<Plan>& plans,
                                   const Problem& problem,
                                   const RankWeights& weights) {
  std::map<std::string, std::set<std::string>> owners;  // resource -> things
  std::map<std::string, std::set<std::string>> problems, protocols;
  for (const auto& a : problem.initial_state) {
    if (a.head == "hasResources" && a.args.size() == 3)
      owners[a.args[2].text].insert(a.args[0].text);
    else if (a.head == "hasSecurityProblem" && a.args.size() == 2)
      problems[a.args[0].text].insert(a.args[1].text);
    else if (a.head == "supportsProtocol" && a.args.size() == 2)
      protocols[a.args[0].text].insert(a.args[1].text);
  }
  auto shares_protocol = [&](const std::string& a, const std::string& b) {
    const auto& pa = protocols[a];
    const auto& pb = protocols[b];
    return std::any_of(pa.begin(), pa.end(), [&](const auto& p) { return pb.count(p) > 0; });
  };

  std::vector<RankedPlan> ranked;
  for (const auto& plan : plans) {
    std::set<std::string> things;
    std::set<std::pair<std::string, std::string>> unmatched;
    for (const auto& step : plan.steps) {
      std::set<std::string> in_step;
      for (const auto& t : step.args)
        if (auto it = owners.find(t.text); it != owners.end())
          in_step.insert(it->second.begin(), it->second.end());
      things.insert(in_step.begin(), in_step.end());
      for (auto a = in_step.begin(); a != in_step.end(); ++a)
        for (auto b = std::next(a); b != in_step.end(); ++b)
          if (!shares_protocol(*a, *b)) unmatched.emplace(*a, *b);
    }
    std::size_t security = 0;
    for (const auto& t : things) security += problems[t].size();

    RankedPlan r;
    r.plan = plan;
    r.score_breakdown["security"] = weights.security * static_cast<double>(security);
    r.score_breakdown["protocol"] = weights.protocol * static_cast<double>(unmatched.size());
    for (const auto& [metric, value] : r.score_breakdown) r.score += value;
    ranked.push_back(std::move(r));
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedPlan& a, const RankedPlan& b) { return a.score < b.score; });
  return ranked;
}

JsonNode to_json(const RankedPlan& r) {
  JsonNode o = plan_to_json(r.plan);
  o.add("score", JsonNode::number(r.score));
  JsonNode breakdown = JsonNode::object();
  for (const auto& [metric, value] : r.score_breakdown)
    breakdown.add(metric, JsonNode::number(value));
  o.add("score_breakdown", std::move(breakdown));
  return o;
}

}  // namespace iotc
