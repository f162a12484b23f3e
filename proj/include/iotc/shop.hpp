#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iotc/json.hpp"
#include "iotc/sexpr.hpp"

namespace iotc {

class ShopError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A variable (`?name`) or a constant symbol.
struct Term {
  std::string text;

  bool is_variable() const { return !text.empty() && text.front() == '?'; }
  auto operator<=>(const Term&) const = default;
};

struct PAtom {
  std::string head;
  std::vector<Term> args;

  bool is_ground() const;
  bool is_primitive() const { return !head.empty() && head.front() == '!'; }
  auto operator<=>(const PAtom&) const = default;
};

using Conjunction = std::vector<PAtom>;

struct OperatorDef {
  PAtom head;
  Conjunction precond;
  Conjunction delete_list;
  Conjunction add_list;
  double cost = 1.0;
  bool operator==(const OperatorDef&) const = default;
};

struct MethodBranch {
  Conjunction precond;
  std::vector<PAtom> subtasks;
  bool operator==(const MethodBranch&) const = default;
};

struct MethodDef {
  PAtom head;
  std::vector<MethodBranch> branches;
  bool operator==(const MethodDef&) const = default;
};

struct AxiomDef {
  PAtom head;
  std::vector<Conjunction> tails;
  bool operator==(const AxiomDef&) const = default;
};

struct Domain {
  std::string name;
  std::vector<MethodDef> methods;
  std::vector<OperatorDef> operators;
  std::vector<AxiomDef> axioms;
  bool operator==(const Domain&) const = default;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<PAtom> initial_state;
  std::vector<PAtom> task_list;
  bool operator==(const Problem&) const = default;
};

struct Plan {
  std::vector<PAtom> steps;
  double total_cost = 0.0;
  bool operator==(const Plan&) const = default;
};

PAtom make_atom(std::string head, std::vector<std::string> args);
PAtom parse_atom(const SExpr& e);
/// Parses a single atom from text, e.g. a `--task` flag.
PAtom parse_atom_text(std::string_view text);

/// Checks the invariants that the constructors do not: operator heads start
/// with `!`, effects and subtasks only use bound variables, no duplicate
/// operators, disjoint method/axiom heads.
void check_domain(const Domain& d);
void check_problem(const Problem& p);

Domain parse_domain(const SExpr& e);
Domain parse_domain_text(std::string_view text);
Problem parse_problem(const SExpr& e);
Problem parse_problem_text(std::string_view text);
Plan parse_plan_text(std::string_view text);

std::string to_string(const Term& t);
std::string to_string(const PAtom& a);
std::string format_number(double d);

std::string print_domain(const Domain& d);
std::string print_problem(const Problem& p);
std::string print_plan(const Plan& p);

/// `{"steps": [["!op", "a", ...], ...], "cost": n}`
JsonNode plan_to_json(const Plan& p);
Plan plan_from_json(const JsonNode& j);

}  // namespace iotc
