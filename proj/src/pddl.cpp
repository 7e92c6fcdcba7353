#include "llmdp/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace llmdp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnbalancedParens: return "UnbalancedParens";
    case ErrorKind::UnknownSection: return "UnknownSection";
    case ErrorKind::ArityRedeclaration: return "ArityRedeclaration";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::MalformedExpression: return "MalformedExpression";
    case ErrorKind::UndeclaredObject: return "UndeclaredObject";
    case ErrorKind::UndeclaredPredicate: return "UndeclaredPredicate";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::MalformedBinder: return "MalformedBinder";
    case ErrorKind::GoalUngroundable: return "GoalUngroundable";
    case ErrorKind::InapplicableAction: return "InapplicableAction";
    case ErrorKind::ContradictoryObservation: return "ContradictoryObservation";
    case ErrorKind::IncompleteSample: return "IncompleteSample";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::FixtureMiss: return "FixtureMiss";
    case ErrorKind::EpisodeFinished: return "EpisodeFinished";
    case ErrorKind::OracleDisabled: return "OracleDisabled";
  }
  return "Error";
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// S-expression reader

struct Sexp {
  bool atom = false;
  std::string text;          // for atoms
  std::vector<Sexp> items;   // for lists
  size_t pos = 0;            // byte offset in the source

  bool is_list() const { return !atom; }
  std::string head_lower() const {
    if (atom || items.empty() || !items[0].atom) return {};
    return to_lower_ascii(items[0].text);
  }
};

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  Sexp read_single() {
    skip_trivia();
    if (at_end()) raise(ErrorKind::UnbalancedParens, "empty input at position 0");
    Sexp form = read_form();
    skip_trivia();
    if (!at_end()) {
      raise(ErrorKind::MalformedExpression,
            "trailing content at position " + std::to_string(pos_));
    }
    return form;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }

  void skip_trivia() {
    while (!at_end()) {
      char c = src_[pos_];
      if (c == ';') {
        while (!at_end() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  Sexp read_form() {
    skip_trivia();
    if (at_end()) raise(ErrorKind::UnbalancedParens, "unexpected end of input at position " + std::to_string(pos_));
    size_t start = pos_;
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Sexp list;
      list.pos = start;
      while (true) {
        skip_trivia();
        if (at_end()) {
          raise(ErrorKind::UnbalancedParens,
                "missing ')' for '(' at position " + std::to_string(start));
        }
        if (src_[pos_] == ')') {
          ++pos_;
          return list;
        }
        list.items.push_back(read_form());
      }
    }
    if (c == ')') {
      raise(ErrorKind::UnbalancedParens, "unexpected ')' at position " + std::to_string(start));
    }
    Sexp atom;
    atom.atom = true;
    atom.pos = start;
    while (!at_end()) {
      char a = src_[pos_];
      if (a == '(' || a == ')' || a == ';' || std::isspace(static_cast<unsigned char>(a))) break;
      atom.text.push_back(a);
      ++pos_;
    }
    return atom;
  }

  std::string_view src_;
  size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Shared pieces

const std::string kObjectType = "object";

std::string expect_atom(const Sexp& s, const char* what) {
  if (!s.atom || s.text.empty()) {
    raise(ErrorKind::MalformedExpression,
          std::string("expected ") + what + " at position " + std::to_string(s.pos));
  }
  return s.text;
}

// Parses `?a ?b - t ?c` groups; untyped trailing variables default to object.
std::vector<TypedVar> parse_typed_vars(const std::vector<Sexp>& items, size_t from,
                                       ErrorKind on_error, const std::string& context) {
  std::vector<TypedVar> out;
  std::vector<std::string> pending;
  for (size_t i = from; i < items.size(); ++i) {
    const Sexp& it = items[i];
    if (!it.atom) raise(on_error, std::string("expected name in ") + context);
    if (it.text == "-") {
      if (pending.empty() || i + 1 >= items.size() || !items[i + 1].atom) {
        raise(on_error, std::string("dangling '-' in ") + context);
      }
      const std::string& type_name = items[i + 1].text;
      for (auto& name : pending) out.push_back({std::move(name), type_name});
      pending.clear();
      ++i;
    } else {
      pending.push_back(it.text);
    }
  }
  for (auto& name : pending) out.push_back({std::move(name), kObjectType});
  for (const auto& v : out) {
    if (v.name.empty()) raise(on_error, std::string("empty name in ") + context);
  }
  return out;
}

void require_variables(const std::vector<TypedVar>& vars, ErrorKind on_error,
                       const std::string& context) {
  for (const auto& v : vars) {
    if (v.name[0] != '?') {
      raise(on_error, "'" + v.name + "' in " + context + " is not a variable (missing '?')");
    }
  }
  for (size_t i = 0; i < vars.size(); ++i) {
    for (size_t j = i + 1; j < vars.size(); ++j) {
      if (vars[i].name == vars[j].name) {
        raise(on_error, "duplicate variable " + vars[i].name + " in " + context);
      }
    }
  }
}

LiteralTemplate parse_literal_atom(const Sexp& s, bool positive) {
  if (!s.is_list() || s.items.empty() || !s.items[0].atom) {
    raise(ErrorKind::MalformedExpression,
          "expected (predicate args...) at position " + std::to_string(s.pos));
  }
  LiteralTemplate lit;
  lit.positive = positive;
  lit.predicate = s.items[0].text;
  for (size_t i = 1; i < s.items.size(); ++i) {
    std::string t = expect_atom(s.items[i], "term");
    lit.args.push_back(t[0] == '?' ? var(t) : constant(t));
  }
  return lit;
}

// expr := atom-form | (and expr*) | (not atom-form)
void parse_condition(const Sexp& s, bool negated, std::vector<LiteralTemplate>& out,
                     bool allow_negated_predicates) {
  if (!s.is_list() || s.items.empty()) {
    raise(ErrorKind::MalformedExpression,
          "expected condition at position " + std::to_string(s.pos));
  }
  std::string head = s.head_lower();
  if (head == "and") {
    if (negated) raise(ErrorKind::MalformedExpression, "(not (and ...)) is not supported");
    for (size_t i = 1; i < s.items.size(); ++i) {
      parse_condition(s.items[i], false, out, allow_negated_predicates);
    }
    return;
  }
  if (head == "not") {
    if (negated || s.items.size() != 2) {
      raise(ErrorKind::MalformedExpression,
            "malformed (not ...) at position " + std::to_string(s.pos));
    }
    parse_condition(s.items[1], true, out, allow_negated_predicates);
    return;
  }
  if (head == "or" || head == "forall" || head == "exists" || head == "imply" ||
      head == "when") {
    raise(ErrorKind::MalformedExpression,
          "unsupported construct '" + head + "' at position " + std::to_string(s.pos));
  }
  LiteralTemplate lit = parse_literal_atom(s, !negated);
  if (lit.is_equality() && lit.args.size() != 2) {
    raise(ErrorKind::ArityMismatch, "'=' takes exactly two terms");
  }
  if (negated && !lit.is_equality() && !allow_negated_predicates) {
    raise(ErrorKind::MalformedExpression,
          "negation is only allowed on '=' here (predicate " + lit.predicate + ")");
  }
  out.push_back(std::move(lit));
}

void check_literal_against_domain(const LiteralTemplate& lit, const DomainDef& domain) {
  if (lit.is_equality()) return;
  const PredicateDecl* decl = domain.find_predicate(lit.predicate);
  if (decl == nullptr) {
    raise(ErrorKind::UndeclaredPredicate, lit.predicate);
  }
  if (decl->arity() != lit.args.size()) {
    raise(ErrorKind::ArityMismatch,
          lit.predicate + " declared with arity " + std::to_string(decl->arity()) +
              ", used with " + std::to_string(lit.args.size()));
  }
}

void check_variables_bound(const std::vector<LiteralTemplate>& lits,
                           const std::vector<TypedVar>& scope, const std::string& context) {
  for (const auto& lit : lits) {
    for (const auto& t : lit.args) {
      if (!t.is_variable) continue;
      bool bound = std::any_of(scope.begin(), scope.end(),
                               [&](const TypedVar& v) { return v.name == t.text; });
      if (!bound) {
        raise(ErrorKind::MalformedExpression,
              "variable " + t.text + " is unbound in " + context);
      }
    }
  }
}

GoalFormula parse_goal_expr(const Sexp& s, const DomainDef& domain);

}  // namespace

// ---------------------------------------------------------------------------
// DomainDef / ProblemDef helpers

const PredicateDecl* DomainDef::find_predicate(std::string_view pred_name) const {
  for (const auto& p : predicates) {
    if (p.name == pred_name) return &p;
  }
  return nullptr;
}

bool DomainDef::type_known(std::string_view type_name) const {
  if (type_name == kObjectType) return true;
  return std::find(types.begin(), types.end(), type_name) != types.end();
}

const ObjectDecl* ProblemDef::find_object(std::string_view obj_name) const {
  for (const auto& o : objects) {
    if (o.name == obj_name) return &o;
  }
  return nullptr;
}

std::string Atom::to_string() const {
  std::string out = "(" + predicate;
  for (const auto& a : args) {
    out += ' ';
    out += a;
  }
  out += ')';
  return out;
}

// ---------------------------------------------------------------------------
// parse_domain

DomainDef parse_domain(std::string_view text) {
  Sexp root = Reader(text).read_single();
  if (root.head_lower() != "define") {
    raise(ErrorKind::MalformedExpression, "domain must start with (define ...)");
  }
  DomainDef domain;
  bool saw_name = false;
  for (size_t i = 1; i < root.items.size(); ++i) {
    const Sexp& section = root.items[i];
    std::string head = section.head_lower();
    if (head == "domain") {
      if (section.items.size() != 2) raise(ErrorKind::MalformedExpression, "(domain name)");
      domain.name = expect_atom(section.items[1], "domain name");
      saw_name = true;
    } else if (head == ":requirements") {
      // accepted and ignored
    } else if (head == ":types") {
      std::vector<TypedVar> entries =
          parse_typed_vars(section.items, 1, ErrorKind::MalformedExpression, ":types");
      for (const auto& e : entries) {
        if (e.type_name != kObjectType) {
          raise(ErrorKind::MalformedExpression,
                "only flat subtypes of object are supported, got parent " + e.type_name);
        }
        if (e.name == kObjectType) continue;
        if (!domain.type_known(e.name)) domain.types.push_back(e.name);
      }
    } else if (head == ":predicates") {
      for (size_t j = 1; j < section.items.size(); ++j) {
        const Sexp& p = section.items[j];
        if (!p.is_list() || p.items.empty()) {
          raise(ErrorKind::MalformedExpression, "predicate declaration must be a list");
        }
        PredicateDecl decl;
        decl.name = expect_atom(p.items[0], "predicate name");
        decl.params = parse_typed_vars(p.items, 1, ErrorKind::MalformedExpression,
                                       "predicate " + decl.name + " parameters");
        require_variables(decl.params, ErrorKind::MalformedExpression, "predicate " + decl.name);
        if (domain.find_predicate(decl.name) != nullptr) {
          raise(ErrorKind::ArityRedeclaration, decl.name);
        }
        domain.predicates.push_back(std::move(decl));
      }
    } else if (head == ":action") {
      if (section.items.size() < 2 || !section.items[1].atom) {
        raise(ErrorKind::MalformedExpression, "(:action name ...)");
      }
      ActionSchema action;
      action.name = section.items[1].text;
      for (size_t j = 2; j + 1 < section.items.size(); j += 2) {
        std::string key = to_lower_ascii(expect_atom(section.items[j], "action keyword"));
        const Sexp& value = section.items[j + 1];
        if (key == ":parameters") {
          if (!value.is_list()) raise(ErrorKind::MalformedExpression, ":parameters takes a list");
          action.params = parse_typed_vars(value.items, 0, ErrorKind::MalformedExpression,
                                           "action " + action.name + " parameters");
          require_variables(action.params, ErrorKind::MalformedExpression,
                            "action " + action.name);
        } else if (key == ":precondition") {
          parse_condition(value, false, action.preconditions, true);
        } else if (key == ":effect") {
          std::vector<LiteralTemplate> effects;
          parse_condition(value, false, effects, true);
          for (auto& e : effects) {
            if (e.is_equality()) {
              raise(ErrorKind::MalformedExpression, "'=' is not allowed in effects");
            }
            bool positive = e.positive;
            e.positive = true;
            (positive ? action.add_effects : action.del_effects).push_back(std::move(e));
          }
        } else {
          raise(ErrorKind::UnknownSection, key + " in action " + action.name);
        }
      }
      for (const auto& existing : domain.actions) {
        if (existing.name == action.name) {
          raise(ErrorKind::MalformedExpression, "duplicate action " + action.name);
        }
      }
      domain.actions.push_back(std::move(action));
    } else {
      raise(ErrorKind::UnknownSection, head.empty() ? "<non-list>" : head);
    }
  }
  if (!saw_name) raise(ErrorKind::MalformedExpression, "missing (domain name)");

  // cross checks: predicates referenced by actions exist, effect/pre variables bound
  for (const auto& action : domain.actions) {
    for (const auto& lit : action.preconditions) check_literal_against_domain(lit, domain);
    for (const auto& lit : action.add_effects) check_literal_against_domain(lit, domain);
    for (const auto& lit : action.del_effects) check_literal_against_domain(lit, domain);
    check_variables_bound(action.preconditions, action.params,
                          "preconditions of " + action.name);
    check_variables_bound(action.add_effects, action.params, "effects of " + action.name);
    check_variables_bound(action.del_effects, action.params, "effects of " + action.name);
  }
  return domain;
}

// ---------------------------------------------------------------------------
// parse_problem

ProblemDef parse_problem(std::string_view text, const DomainDef& domain) {
  Sexp root = Reader(text).read_single();
  if (root.head_lower() != "define") {
    raise(ErrorKind::MalformedExpression, "problem must start with (define ...)");
  }
  ProblemDef problem;
  bool saw_goal = false;
  for (size_t i = 1; i < root.items.size(); ++i) {
    const Sexp& section = root.items[i];
    std::string head = section.head_lower();
    if (head == "problem") {
      if (section.items.size() != 2) raise(ErrorKind::MalformedExpression, "(problem name)");
      problem.name = expect_atom(section.items[1], "problem name");
    } else if (head == ":domain") {
      if (section.items.size() != 2) raise(ErrorKind::MalformedExpression, "(:domain name)");
      problem.domain_name = expect_atom(section.items[1], "domain name");
    } else if (head == ":requirements") {
      // ignored
    } else if (head == ":objects") {
      std::vector<TypedVar> entries =
          parse_typed_vars(section.items, 1, ErrorKind::MalformedExpression, ":objects");
      for (const auto& e : entries) {
        if (e.name[0] == '?') {
          raise(ErrorKind::MalformedExpression, "object name " + e.name + " cannot be a variable");
        }
        if (problem.find_object(e.name) != nullptr) {
          raise(ErrorKind::MalformedExpression, "duplicate object " + e.name);
        }
        problem.objects.push_back({e.name, e.type_name});
      }
    } else if (head == ":init") {
      for (size_t j = 1; j < section.items.size(); ++j) {
        LiteralTemplate lit = parse_literal_atom(section.items[j], true);
        if (lit.is_equality()) {
          raise(ErrorKind::MalformedExpression, "'=' is not allowed in :init");
        }
        Atom atom;
        atom.predicate = lit.predicate;
        for (const auto& t : lit.args) {
          if (t.is_variable) {
            raise(ErrorKind::MalformedExpression,
                  ":init atoms must be ground, got " + t.text);
          }
          atom.args.push_back(t.text);
        }
        problem.init.insert(std::move(atom));
      }
    } else if (head == ":goal") {
      if (section.items.size() != 2) raise(ErrorKind::MalformedExpression, "(:goal expr)");
      problem.goal = parse_goal_expr(section.items[1], domain);
      saw_goal = true;
    } else {
      raise(ErrorKind::UnknownSection, head.empty() ? "<non-list>" : head);
    }
  }

  std::sort(problem.objects.begin(), problem.objects.end(),
            [](const ObjectDecl& a, const ObjectDecl& b) { return a.name < b.name; });

  // validate init atoms against domain and object declarations
  for (const auto& atom : problem.init) {
    const PredicateDecl* decl = domain.find_predicate(atom.predicate);
    if (decl == nullptr) raise(ErrorKind::UndeclaredPredicate, atom.predicate);
    if (decl->arity() != atom.args.size()) {
      raise(ErrorKind::ArityMismatch,
            atom.predicate + " used with arity " + std::to_string(atom.args.size()));
    }
    for (size_t k = 0; k < atom.args.size(); ++k) {
      const ObjectDecl* obj = problem.find_object(atom.args[k]);
      if (obj == nullptr) raise(ErrorKind::UndeclaredObject, atom.args[k]);
      const std::string& want = decl->params[k].type_name;
      if (want != kObjectType && want != obj->type_name) {
        raise(ErrorKind::TypeMismatch,
              atom.to_string() + ": argument " + obj->name + " has type " + obj->type_name +
                  ", predicate wants " + want);
      }
    }
  }
  if (!saw_goal) problem.goal = GoalFormula{};
  return problem;
}

// ---------------------------------------------------------------------------
// Goals

namespace {

GoalFormula parse_goal_expr(const Sexp& s, const DomainDef& domain) {
  GoalFormula goal;
  const Sexp* body = &s;
  if (s.head_lower() == "exists") {
    if (s.items.size() != 3 || !s.items[1].is_list()) {
      raise(ErrorKind::MalformedBinder, "expected (exists (vars...) body)");
    }
    goal.binder =
        parse_typed_vars(s.items[1].items, 0, ErrorKind::MalformedBinder, "exists binder");
    require_variables(goal.binder, ErrorKind::MalformedBinder, "exists binder");
    body = &s.items[2];
  }
  parse_condition(*body, false, goal.literals, false);
  for (const auto& lit : goal.literals) check_literal_against_domain(lit, domain);
  check_variables_bound(goal.literals, goal.binder, "goal");
  return goal;
}

}  // namespace

GoalFormula parse_goal(std::string_view text, const DomainDef& domain) {
  Sexp root = Reader(text).read_single();
  const Sexp* expr = &root;
  if (root.head_lower() == ":goal") {
    if (root.items.size() != 2) raise(ErrorKind::MalformedExpression, "(:goal expr)");
    expr = &root.items[1];
  }
  return parse_goal_expr(*expr, domain);
}

std::vector<std::string> validate_goal(const GoalFormula& goal, const DomainDef& domain) {
  std::vector<std::string> violations;
  for (const auto& v : goal.binder) {
    if (v.name.empty() || v.name[0] != '?') {
      violations.push_back("binder name '" + v.name + "' is not a variable");
    }
    if (v.type_name.empty()) violations.push_back("binder " + v.name + " has an empty type");
  }
  for (const auto& lit : goal.literals) {
    if (lit.is_equality()) {
      if (lit.args.size() != 2) violations.push_back("'=' takes exactly two terms");
      continue;
    }
    if (!lit.positive) {
      violations.push_back("negation on predicate " + lit.predicate + " is not supported");
    }
    const PredicateDecl* decl = domain.find_predicate(lit.predicate);
    if (decl == nullptr) {
      violations.push_back("UndeclaredPredicate: " + lit.predicate);
      continue;
    }
    if (decl->arity() != lit.args.size()) {
      violations.push_back("ArityMismatch: " + lit.predicate + " wants " +
                           std::to_string(decl->arity()) + " arguments, got " +
                           std::to_string(lit.args.size()));
    }
  }
  for (const auto& lit : goal.literals) {
    for (const auto& t : lit.args) {
      if (!t.is_variable) continue;
      bool bound = std::any_of(goal.binder.begin(), goal.binder.end(),
                               [&](const TypedVar& v) { return v.name == t.text; });
      if (!bound) violations.push_back("unbound variable " + t.text);
    }
  }
  return violations;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_typed_vars(std::ostream& os, const std::vector<TypedVar>& vars) {
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i > 0) os << ' ';
    os << vars[i].name << " - " << vars[i].type_name;
  }
}

void print_literal(std::ostream& os, const LiteralTemplate& lit) {
  if (!lit.positive) os << "(not ";
  os << '(' << lit.predicate;
  for (const auto& t : lit.args) os << ' ' << t.text;
  os << ')';
  if (!lit.positive) os << ')';
}

void print_conjunction(std::ostream& os, const std::vector<LiteralTemplate>& lits) {
  os << "(and";
  for (const auto& lit : lits) {
    os << ' ';
    print_literal(os, lit);
  }
  os << ')';
}

}  // namespace

std::string print_goal(const GoalFormula& goal) {
  std::ostringstream os;
  os << "(:goal ";
  if (!goal.binder.empty()) {
    os << "(exists (";
    print_typed_vars(os, goal.binder);
    os << ") ";
  }
  print_conjunction(os, goal.literals);
  if (!goal.binder.empty()) os << ')';
  os << ')';
  return os.str();
}

std::string print_domain(const DomainDef& domain) {
  std::ostringstream os;
  os << "(define (domain " << domain.name << ")\n";
  if (!domain.types.empty()) {
    os << "(:types";
    for (const auto& t : domain.types) os << ' ' << t;
    os << " - object)\n";
  }
  os << "(:predicates\n";
  for (const auto& p : domain.predicates) {
    os << "    (" << p.name;
    if (!p.params.empty()) {
      os << ' ';
      print_typed_vars(os, p.params);
    }
    os << ")\n";
  }
  os << ")\n";
  for (const auto& a : domain.actions) {
    os << "(:action " << a.name << "\n :parameters (";
    print_typed_vars(os, a.params);
    os << ")\n :precondition ";
    print_conjunction(os, a.preconditions);
    os << "\n :effect (and";
    for (const auto& e : a.add_effects) {
      os << ' ';
      print_literal(os, e);
    }
    for (const auto& e : a.del_effects) {
      os << " (not ";
      print_literal(os, e);
      os << ')';
    }
    os << ")\n)\n";
  }
  os << ")\n";
  return os.str();
}

std::string print_problem(const ProblemDef& problem) {
  std::ostringstream os;
  os << "(define (problem " << problem.name << ")\n";
  os << "(:domain " << problem.domain_name << ")\n";
  os << "(:objects\n";
  for (const auto& o : problem.objects) {
    os << "    " << o.name << " - " << o.type_name << "\n";
  }
  os << ")\n(:init\n";
  for (const auto& atom : problem.init) {
    os << "    " << atom.to_string() << "\n";
  }
  os << ")\n" << print_goal(problem.goal) << "\n)\n";
  return os.str();
}

}  // namespace llmdp
