// Abstract syntax, parser, and canonical printer for the STRIPS subset of PDDL
// used throughout the lab: typing (flat, one level under `object`) and
// negative preconditions. Everything else is rejected, never guessed at.
#pragma once

#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace planlab::pddl {

enum class Errc {
  syntax,             // malformed s-expression, unknown section, bad identifier
  arity,              // argument count does not match predicate declaration
  unknown_type,       // type referenced but not declared
  unsupported,        // legal PDDL outside our subset (or, forall, functions, ...)
  undeclared_object,  // ground atom names an object the problem never declares
  type_mismatch,      // argument type incompatible with predicate signature
};

const char* errc_name(Errc c);

class ParseError : public std::runtime_error {
 public:
  ParseError(Errc code, const std::string& msg, int line = 0, int col = 0);
  Errc code;
  int line;
  int col;
};

struct Term {
  enum class Kind { variable, constant };
  Kind kind = Kind::constant;
  std::string name;  // variables stored without the leading '?'

  static Term var(std::string n) { return {Kind::variable, std::move(n)}; }
  static Term constant(std::string n) { return {Kind::constant, std::move(n)}; }

  bool is_var() const { return kind == Kind::variable; }
  bool operator==(const Term&) const = default;
  bool operator<(const Term& o) const {
    return std::tie(kind, name) < std::tie(o.kind, o.name);
  }
};

struct Atom {
  std::string pred;
  std::vector<Term> args;

  bool is_ground() const {
    for (const auto& t : args)
      if (t.is_var()) return false;
    return true;
  }
  bool operator==(const Atom&) const = default;
  bool operator<(const Atom& o) const {
    return std::tie(pred, args) < std::tie(o.pred, o.args);
  }
};

struct Literal {
  bool positive = true;
  Atom atom;

  bool operator==(const Literal&) const = default;
  bool operator<(const Literal& o) const {
    return std::tie(atom, positive) < std::tie(o.atom, o.positive);
  }
};

struct Predicate {
  std::string name;
  std::vector<std::string> param_types;  // length == arity

  size_t arity() const { return param_types.size(); }
  bool operator==(const Predicate&) const = default;
};

struct Parameter {
  std::string name;  // without '?'
  std::string type;
  bool operator==(const Parameter&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<Parameter> parameters;   // order is semantic (plan rendering)
  std::vector<Literal> precondition;   // canonical: sorted, deduped
  std::vector<Literal> effect;

  bool operator==(const ActionSchema&) const = default;
};

struct Domain {
  std::string name;
  std::vector<std::string> types;      // declared types, `object` implicit
  std::vector<Predicate> predicates;   // sorted by name
  std::vector<ActionSchema> actions;   // sorted by name

  const Predicate* find_predicate(const std::string& n) const;
  const ActionSchema* find_action(const std::string& n) const;
  bool operator==(const Domain&) const = default;
};

struct TypedName {
  std::string name;
  std::string type;
  bool operator==(const TypedName&) const = default;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;  // sorted by name
  std::vector<Atom> init;          // ground, sorted, deduped
  std::vector<Literal> goal;       // ground, sorted, deduped

  const TypedName* find_object(const std::string& n) const;
  bool operator==(const Problem&) const = default;
};

// In the flat hierarchy every declared type is a direct child of `object`.
inline bool type_compatible(const std::string& have, const std::string& want) {
  return want == "object" || have == want;
}

// Parsing. Identifiers are case-insensitive and stored lowercased; `;`
// comments are stripped by the lexer. Both throw ParseError.
Domain parse_domain(const std::string& text);
Problem parse_problem(const std::string& text);
// Parse and type-check against the companion domain in one go.
Problem parse_problem(const std::string& text, const Domain& d);

// Checks a parsed problem against a domain: predicates exist, arities match,
// argument types compatible. Throws ParseError on violation.
void link(const Problem& p, const Domain& d);

// Sorts and dedups the set-like fields so that equality is structural and
// render output is canonical. parse_* returns normalized values already.
void normalize(Domain& d);
void normalize(Problem& p);

// Canonical printer: fixed section order, conjuncts sorted lexicographically,
// one fact per line (so that line-oriented edit scripts are well defined).
std::string render_term(const Term& t);
std::string render_atom(const Atom& a);
std::string render_literal(const Literal& l);
std::string render(const Domain& d);
std::string render(const Problem& p);

// Convenience for tests and tools.
Atom make_atom(const std::string& pred, const std::vector<std::string>& const_args);

// Mini-parsers for fragments: a single ground atom "(at agent kitchen)" and a
// goal conjunction "(and (at agent pantry) (not (visited cellar)))".
Atom parse_ground_atom(const std::string& text);
std::vector<Literal> parse_goal_conjunction(const std::string& text);

}  // namespace planlab::pddl
