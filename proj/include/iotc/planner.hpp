#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "iotc/shop.hpp"

namespace iotc {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Variable bindings. Chains (?x -> ?y -> A) are allowed; bind() refuses
/// anything that would make a variable reach itself.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const std::string, Term>> init);

  /// Follows variable chains to a constant or an unbound variable.
  Term resolve(const Term& t) const;
  PAtom apply(const PAtom& a) const;
  std::vector<PAtom> apply(const std::vector<PAtom>& atoms) const;

  /// Binds an unbound variable; false if already bound or if the binding
  /// would be cyclic.
  bool bind(const std::string& var, const Term& value);

  const Term* lookup(const std::string& var) const;
  const std::map<std::string, Term>& bindings() const { return bindings_; }
  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }

  bool operator==(const Substitution&) const = default;

 private:
  std::map<std::string, Term> bindings_;
};

/// Most general unifier of `a` and `b` extending `s`, or nullopt.
std::optional<Substitution> unify(const PAtom& a, const PAtom& b,
                                  const Substitution& s = {});

/// Set of ground atoms indexed by head symbol; each index keeps insertion
/// order, which fixes the order in which matches are enumerated.
class State {
 public:
  State() = default;
  explicit State(const std::vector<PAtom>& atoms);

  bool insert(const PAtom& a);
  bool erase(const PAtom& a);
  bool contains(const PAtom& a) const { return members_.count(a) > 0; }
  const std::vector<PAtom>& with_head(const std::string& head) const;
  std::size_t size() const { return members_.size(); }
  const std::set<PAtom>& atoms() const { return members_; }

  bool operator==(const State& other) const { return members_ == other.members_; }

 private:
  std::map<std::string, std::vector<PAtom>> index_;
  std::set<PAtom> members_;
};

struct SearchLimits {
  int max_depth = 64;
  int max_plans = 8;
};

void check_limits(const SearchLimits& limits);

struct SatisfyResult {
  std::vector<Substitution> substitutions;
  bool truncated = false;  // an axiom derivation hit the depth limit
};

/// Every substitution (extending `s`) under which all conjuncts hold, in
/// state-index order then axiom order. Duplicates are dropped.
SatisfyResult satisfy(const State& state, const std::vector<AxiomDef>& axioms,
                      const Conjunction& conjunction, const Substitution& s = {},
                      int max_depth = SearchLimits{}.max_depth);

/// Deletes then adds the instantiated effects. Throws PlanError if `s` does
/// not ground them.
State apply_operator(const State& state, const OperatorDef& op, const Substitution& s);

enum class PlanOutcome { Found, NoPlan, Truncated };

struct PlanResult {
  std::vector<Plan> plans;
  PlanOutcome outcome = PlanOutcome::NoPlan;
  bool truncated = false;  // some branch was cut, even if plans were found
};

/// Depth-first total-order decomposition. Returns up to max_plans distinct
/// plans in discovery order.
PlanResult find_plans(const Domain& domain, const Problem& problem,
                      const SearchLimits& limits = {});

/// Re-applies a plan from the problem's initial state, checking each
/// operator precondition. Returns the final state; throws PlanError on the
/// first step that is not applicable.
State replay_plan(const Domain& domain, const Problem& problem, const Plan& plan,
                  int max_depth = SearchLimits{}.max_depth);

struct RankWeights {
  double security = 1.0;
  double protocol = 1.0;
};

struct RankedPlan {
  Plan plan;
  double score = 0.0;
  std::map<std::string, double> score_breakdown;
};

/// Lower score is better; ties keep discovery order.
std::vector<RankedPlan> rank_plans(const std::vector<Plan>& plans,
                                   const Problem& problem,
                                   const RankWeights& weights = {});

JsonNode to_json(const RankedPlan& r);

}  // namespace iotc
