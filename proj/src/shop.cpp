#include "iotc/shop.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

namespace iotc {

bool PAtom::is_ground() const {
  for (const auto& a : args)
    if (a.is_variable()) return false;
  return true;
}

PAtom make_atom(std::string head, std::vector<std::string> args) {
  PAtom a{std::move(head), {}};
  for (auto& s : args) a.args.push_back(Term{std::move(s)});
  return a;
}

namespace {

[[noreturn]] void fail(const SExpr& at, const std::string& what) {
  throw ShopError(std::to_string(at.line) + ":" + std::to_string(at.column) +
                  ": " + what);
}

const std::vector<SExpr>& as_list(const SExpr& e, std::string_view what) {
  if (!e.is_list()) fail(e, "expected " + std::string(what) + ", found '" + e.symbol() + "'");
  return e.list();
}

// `()` and `((a) (b))` are conjunctions; `(a ?x)` is a single atom.
std::vector<PAtom> parse_atom_list(const SExpr& e, std::string_view what) {
  const auto& items = as_list(e, what);
  std::vector<PAtom> out;
  if (items.empty()) return out;
  if (items.front().is_symbol()) {
    out.push_back(parse_atom(e));
    return out;
  }
  for (const auto& item : items) out.push_back(parse_atom(item));
  return out;
}

void collect_vars(const PAtom& a, std::set<std::string>& vars) {
  for (const auto& t : a.args)
    if (t.is_variable()) vars.insert(t.text);
}

void require_bound(const std::vector<PAtom>& atoms,
                   const std::set<std::string>& bound, const std::string& where) {
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.is_variable() && !bound.count(t.text))
        throw ShopError(where + ": variable " + t.text + " in " + to_string(a) +
                        " is not bound by the head or precondition");
}

bool parse_number(std::string_view s, double& out) {
  const std::string buf(s);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return !buf.empty() && end == buf.c_str() + buf.size() && std::isfinite(out);
}

}  // namespace

PAtom parse_atom(const SExpr& e) {
  const auto& items = as_list(e, "an atom");
  if (items.empty()) fail(e, "empty atom");
  if (!items[0].is_symbol()) fail(items[0], "atom head must be a symbol");
  PAtom a;
  a.head = items[0].symbol();
  if (a.head.front() == '?') fail(items[0], "atom head cannot be a variable");
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (!items[i].is_symbol()) fail(items[i], "atom arguments must be symbols");
    const auto& sym = items[i].symbol();
    if (sym == "?") fail(items[i], "empty variable name");
    a.args.push_back(Term{sym});
  }
  return a;
}

PAtom parse_atom_text(std::string_view text) {
  const auto forms = read_sexprs(text);
  if (forms.size() != 1) throw ShopError("expected exactly one atom in '" + std::string(text) + "'");
  return parse_atom(forms[0]);
}

void check_domain(const Domain& d) {
  std::set<std::pair<std::string, std::size_t>> op_heads;
  std::set<std::string> op_symbols, method_symbols, axiom_symbols;
  for (const auto& op : d.operators) {
    const std::string where = "operator " + to_string(op.head);
    if (!op.head.is_primitive())
      throw ShopError(where + ": operator heads must start with '!'");
    if (!op_heads.emplace(op.head.head, op.head.args.size()).second)
      throw ShopError(where + ": duplicate operator");
    if (!(op.cost >= 0.0) || !std::isfinite(op.cost))
      throw ShopError(where + ": cost must be a finite non-negative number");
    op_symbols.insert(op.head.head);
    std::set<std::string> bound;
    collect_vars(op.head, bound);
    for (const auto& p : op.precond) collect_vars(p, bound);
    require_bound(op.delete_list, bound, where);
    require_bound(op.add_list, bound, where);
  }
  for (const auto& m : d.methods) {
    const std::string where = "method " + to_string(m.head);
    if (m.head.is_primitive())
      throw ShopError(where + ": method heads cannot start with '!'");
    if (m.branches.empty()) throw ShopError(where + ": method has no branches");
    method_symbols.insert(m.head.head);
    for (const auto& b : m.branches) {
      std::set<std::string> bound;
      collect_vars(m.head, bound);
      for (const auto& p : b.precond) collect_vars(p, bound);
      require_bound(b.subtasks, bound, where);
    }
  }
  for (const auto& ax : d.axioms) {
    const std::string where = "axiom " + to_string(ax.head);
    if (ax.head.is_primitive())
      throw ShopError(where + ": axiom heads cannot start with '!'");
    if (ax.tails.empty()) throw ShopError(where + ": axiom has no tail");
    axiom_symbols.insert(ax.head.head);
  }
  for (const auto& s : method_symbols)
    if (axiom_symbols.count(s))
      throw ShopError("'" + s + "' is used both as a method and an axiom head");
}

void check_problem(const Problem& p) {
  for (const auto& a : p.initial_state)
    if (!a.is_ground())
      throw ShopError("initial state atom " + to_string(a) + " is not ground");
  for (const auto& a : p.task_list)
    if (!a.is_ground()) throw ShopError("task " + to_string(a) + " is not ground");
}

Domain parse_domain(const SExpr& e) {
  const auto& top = as_list(e, "a defdomain form");
  if (top.size() != 3 || !top[0].is_symbol() || top[0].symbol() != "defdomain" ||
      !top[1].is_symbol())
    fail(e, "expected (defdomain <name> (<items>...))");
  Domain d;
  d.name = top[1].symbol();
  for (const auto& item : as_list(top[2], "the domain item list")) {
    const auto& parts = as_list(item, "a domain item");
    if (parts.empty() || !parts[0].is_symbol()) fail(item, "domain item needs a keyword");
    const auto& kw = parts[0].symbol();
    if (kw == ":operator") {
      if (parts.size() != 5 && parts.size() != 6)
        fail(item, ":operator expects head, precondition, delete list, add list and optional cost");
      OperatorDef op;
      op.head = parse_atom(parts[1]);
      op.precond = parse_atom_list(parts[2], "a precondition");
      op.delete_list = parse_atom_list(parts[3], "a delete list");
      op.add_list = parse_atom_list(parts[4], "an add list");
      if (parts.size() == 6) {
        if (!parts[5].is_symbol() || !parse_number(parts[5].symbol(), op.cost))
          fail(parts[5], "operator cost must be a number");
      }
      if (!op.head.is_primitive()) fail(parts[1], "operator head must start with '!'");
      d.operators.push_back(std::move(op));
    } else if (kw == ":method") {
      if (parts.size() < 2) fail(item, ":method needs a head");
      MethodDef m;
      m.head = parse_atom(parts[1]);
      std::size_t i = 2;
      while (i < parts.size()) {
        if (parts[i].is_symbol()) ++i;  // branch label
        if (i + 1 >= parts.size()) fail(item, ":method branch needs a precondition and a task list");
        MethodBranch b;
        b.precond = parse_atom_list(parts[i], "a precondition");
        b.subtasks = parse_atom_list(parts[i + 1], "a task list");
        m.branches.push_back(std::move(b));
        i += 2;
      }
      if (m.branches.empty()) fail(item, ":method has no branches");
      d.methods.push_back(std::move(m));
    } else if (kw == ":-") {
      if (parts.size() < 3) fail(item, ":- needs a head and at least one tail");
      AxiomDef ax;
      ax.head = parse_atom(parts[1]);
      for (std::size_t i = 2; i < parts.size(); ++i) {
        if (parts[i].is_symbol()) continue;  // label
        ax.tails.push_back(parse_atom_list(parts[i], "an axiom tail"));
      }
      if (ax.tails.empty()) fail(item, ":- needs at least one tail");
      d.axioms.push_back(std::move(ax));
    } else {
      fail(parts[0], "unknown domain item '" + kw + "'");
    }
  }
  check_domain(d);
  return d;
}

namespace {
const SExpr& single_form(const std::vector<SExpr>& forms, std::string_view what) {
  if (forms.size() != 1)
    throw ShopError("expected exactly one " + std::string(what) + " form, found " +
                    std::to_string(forms.size()));
  return forms[0];
}
}  // namespace

Domain parse_domain_text(std::string_view text) {
  return parse_domain(single_form(read_sexprs(text), "defdomain"));
}

Problem parse_problem(const SExpr& e) {
  const auto& top = as_list(e, "a defproblem form");
  if (top.size() != 5 || !top[0].is_symbol() || top[0].symbol() != "defproblem" ||
      !top[1].is_symbol() || !top[2].is_symbol())
    fail(e, "expected (defproblem <name> <domain> (<state>...) (<tasks>...))");
  Problem p;
  p.name = top[1].symbol();
  p.domain_name = top[2].symbol();
  for (const auto& a : as_list(top[3], "the initial state")) {
    p.initial_state.push_back(parse_atom(a));
    if (!p.initial_state.back().is_ground()) fail(a, "initial state atoms must be ground");
  }
  for (const auto& t : as_list(top[4], "the task list")) {
    p.task_list.push_back(parse_atom(t));
    if (!p.task_list.back().is_ground()) fail(t, "tasks must be ground");
  }
  return p;
}

Problem parse_problem_text(std::string_view text) {
  return parse_problem(single_form(read_sexprs(text), "defproblem"));
}

Plan parse_plan_text(std::string_view text) {
  Plan plan;
  const auto forms = read_sexprs(text);
  const auto& list = as_list(single_form(forms, "plan"), "a plan");
  for (const auto& step : list) {
    plan.steps.push_back(parse_atom(step));
    if (!plan.steps.back().is_primitive() || !plan.steps.back().is_ground())
      fail(step, "plan steps must be ground primitive atoms");
  }
  bool have_cost = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string_view::npos) continue;
    line = line.substr(start);
    constexpr std::string_view kCost = "; cost ";
    if (line.substr(0, kCost.size()) == kCost) {
      auto value = line.substr(kCost.size());
      while (!value.empty() && (value.back() == '\r' || value.back() == ' '))
        value.remove_suffix(1);
      if (!parse_number(value, plan.total_cost))
        throw ShopError("invalid plan cost '" + std::string(value) + "'");
      have_cost = true;
    }
  }
  if (!have_cost) throw ShopError("plan text has no '; cost' line");
  return plan;
}

std::string to_string(const Term& t) { return t.text; }

std::string to_string(const PAtom& a) {
  std::string out = "(" + a.head;
  for (const auto& t : a.args) {
    out += ' ';
    out += t.text;
  }
  out += ')';
  return out;
}

std::string format_number(double d) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, end);
}

namespace {
std::string conj(const std::vector<PAtom>& atoms) {
  std::string out = "(";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ' ';
    out += to_string(atoms[i]);
  }
  out += ')';
  return out;
}
}  // namespace

std::string print_domain(const Domain& d) {
  std::string out = "(defdomain " + d.name + " (\n";
  for (const auto& m : d.methods) {
    out += "  (:method " + to_string(m.head);
    for (const auto& b : m.branches) {
      out += "\n    " + conj(b.precond);
      out += "\n    " + conj(b.subtasks);
    }
    out += ")\n";
  }
  for (const auto& op : d.operators) {
    out += "  (:operator " + to_string(op.head);
    out += "\n    " + conj(op.precond);
    out += "\n    " + conj(op.delete_list);
    out += "\n    " + conj(op.add_list);
    if (op.cost != 1.0) out += "\n    " + format_number(op.cost);
    out += ")\n";
  }
  for (const auto& ax : d.axioms) {
    out += "  (:- " + to_string(ax.head);
    for (const auto& tail : ax.tails) out += "\n    " + conj(tail);
    out += ")\n";
  }
  out += "))\n";
  return out;
}

std::string print_problem(const Problem& p) {
  std::string out = "(defproblem " + p.name + " " + p.domain_name + "\n (\n";
  for (const auto& a : p.initial_state) out += "  " + to_string(a) + "\n";
  out += " )\n " + conj(p.task_list) + "\n)\n";
  return out;
}

std::string print_plan(const Plan& p) {
  std::string out;
  if (p.steps.empty()) {
    out = "()\n";
  } else {
    out = "(\n";
    for (const auto& s : p.steps) out += " " + to_string(s) + "\n";
    out += ")\n";
  }
  out += "; cost " + format_number(p.total_cost) + "\n";
  return out;
}

JsonNode plan_to_json(const Plan& p) {
  JsonNode steps = JsonNode::array();
  for (const auto& s : p.steps) {
    JsonNode step = JsonNode::array();
    step.push_back(JsonNode::string(s.head));
    for (const auto& t : s.args) step.push_back(JsonNode::string(t.text));
    steps.push_back(std::move(step));
  }
  JsonNode out = JsonNode::object();
  out.add("steps", std::move(steps));
  out.add("cost", JsonNode::number(p.total_cost));
  return out;
}

Plan plan_from_json(const JsonNode& j) {
  if (!j.is_object()) throw ShopError("plan JSON must be an object");
  const auto* steps = j.find("steps");
  const auto* cost = j.find("cost");
  if (!steps || !steps->is_array() || !cost || !cost->is_number())
    throw ShopError("plan JSON needs 'steps' (array) and 'cost' (number)");
  Plan p;
  p.total_cost = cost->as_number();
  for (const auto& step : steps->items()) {
    if (!step.is_array() || step.items().empty())
      throw ShopError("each plan step must be a non-empty array of strings");
    PAtom a;
    for (std::size_t i = 0; i < step.items().size(); ++i) {
      const auto& part = step.items()[i];
      if (!part.is_string()) throw ShopError("plan step entries must be strings");
      if (i == 0) a.head = part.as_string();
      else a.args.push_back(Term{part.as_string()});
    }
    if (!a.is_primitive() || !a.is_ground())
      throw ShopError("plan steps must be ground primitive atoms");
    p.steps.push_back(std::move(a));
  }
  return p;
}

}  // namespace iotc
