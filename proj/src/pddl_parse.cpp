// S-expression lexer plus recursive-descent walkers for domain/problem files.
#include "planlab/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>

#include "planlab/util.hpp"

namespace planlab::pddl {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::syntax: return "SyntaxError";
    case Errc::arity: return "ArityError";
    case Errc::unknown_type: return "UnknownType";
    case Errc::unsupported: return "UnsupportedFeature";
    case Errc::undeclared_object: return "UndeclaredObject";
    case Errc::type_mismatch: return "TypeMismatch";
  }
  return "ParseError";
}

ParseError::ParseError(Errc code_, const std::string& msg, int line_, int col_)
    : std::runtime_error(std::string(errc_name(code_)) + " at " +
                         std::to_string(line_) + ":" + std::to_string(col_) +
                         ": " + msg),
      code(code_),
      line(line_),
      col(col_) {}

namespace {

// ---------------------------------------------------------------- s-expr ---

struct Node {
  bool is_list = false;
  std::string symbol;           // when !is_list
  std::vector<Node> children;   // when is_list
  int line = 0;
  int col = 0;
};

struct Lexer {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  explicit Lexer(const std::string& t) : text(t) {}

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws_and_comments() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ';') {
        while (pos < text.size() && text[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  bool symbol_char(char c) const {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' &&
           c != ')' && c != ';';
  }

  Node parse_node() {
    skip_ws_and_comments();
    if (pos >= text.size())
      throw ParseError(Errc::syntax, "unexpected end of input", line, col);
    int l = line, c = col;
    if (text[pos] == '(') {
      advance();
      Node n;
      n.is_list = true;
      n.line = l;
      n.col = c;
      while (true) {
        skip_ws_and_comments();
        if (pos >= text.size())
          throw ParseError(Errc::syntax, "missing ')'", l, c);
        if (text[pos] == ')') {
          advance();
          return n;
        }
        n.children.push_back(parse_node());
      }
    }
    if (text[pos] == ')')
      throw ParseError(Errc::syntax, "unmatched ')'", l, c);
    Node n;
    n.line = l;
    n.col = c;
    while (pos < text.size() && symbol_char(text[pos])) {
      n.symbol.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(text[pos]))));
      advance();
    }
    return n;
  }

  Node parse_top() {
    Node n = parse_node();
    skip_ws_and_comments();
    if (pos < text.size())
      throw ParseError(Errc::syntax, "trailing content after top-level form",
                       line, col);
    if (!n.is_list)
      throw ParseError(Errc::syntax, "expected '(define ...)'", n.line, n.col);
    return n;
  }
};

[[noreturn]] void fail(Errc code, const std::string& msg, const Node& at) {
  throw ParseError(code, msg, at.line, at.col);
}

const std::string& expect_symbol(const Node& n, const char* what) {
  if (n.is_list) fail(Errc::syntax, std::string("expected ") + what, n);
  return n.symbol;
}

bool valid_name(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::islower(c) || std::isdigit(c) || c == '_' || c == '-';
  });
}

std::string expect_name(const Node& n, const char* what) {
  const std::string& s = expect_symbol(n, what);
  if (!valid_name(s))
    fail(Errc::syntax, std::string("invalid ") + what + " '" + s + "'", n);
  return s;
}

// `?a ?b - room ?c` ... untyped names default to `object`.
std::vector<TypedName> parse_typed_list(const std::vector<Node>& nodes,
                                        size_t begin, bool variables,
                                        const Node& ctx) {
  std::vector<TypedName> out;
  std::vector<std::string> pending;
  for (size_t i = begin; i < nodes.size(); ++i) {
    const std::string& s = expect_symbol(nodes[i], "name in typed list");
    if (s == "-") {
      if (pending.empty())
        fail(Errc::syntax, "dangling '-' in typed list", nodes[i]);
      if (i + 1 >= nodes.size())
        fail(Errc::syntax, "missing type after '-'", nodes[i]);
      std::string ty = expect_name(nodes[i + 1], "type name");
      for (auto& p : pending) out.push_back({p, ty});
      pending.clear();
      ++i;
      continue;
    }
    std::string name = s;
    if (variables) {
      if (name.empty() || name[0] != '?')
        fail(Errc::syntax, "expected '?variable', got '" + name + "'", nodes[i]);
      name = name.substr(1);
    }
    if (!valid_name(name))
      fail(Errc::syntax, "invalid name '" + s + "'", nodes[i]);
    pending.push_back(name);
  }
  for (auto& p : pending) out.push_back({p, "object"});
  (void)ctx;
  return out;
}

const std::set<std::string> kSupportedRequirements = {
    ":strips", ":typing", ":negative-preconditions"};

// PDDL constructs we recognize and deliberately refuse.
const std::set<std::string> kUnsupportedSections = {
    ":constants", ":functions", ":durative-action", ":derived",
    ":axiom",     ":constraints"};

const std::set<std::string> kUnsupportedConnectives = {
    "or", "imply", "exists", "forall", "when", "=",
    "increase", "decrease", "assign"};

Term parse_term(const Node& n) {
  const std::string& s = expect_symbol(n, "term");
  if (!s.empty() && s[0] == '?') {
    std::string v = s.substr(1);
    if (!valid_name(v)) fail(Errc::syntax, "invalid variable '" + s + "'", n);
    return Term::var(v);
  }
  if (!valid_name(s)) fail(Errc::syntax, "invalid constant '" + s + "'", n);
  return Term::constant(s);
}

Atom parse_atom(const Node& n) {
  if (!n.is_list || n.children.empty())
    fail(Errc::syntax, "expected '(predicate args...)'", n);
  const std::string& head = expect_symbol(n.children[0], "predicate name");
  if (kUnsupportedConnectives.count(head))
    fail(Errc::unsupported, "'" + head + "' is outside the supported subset",
         n);
  Atom a;
  a.pred = expect_name(n.children[0], "predicate name");
  for (size_t i = 1; i < n.children.size(); ++i) {
    if (n.children[i].is_list)
      fail(Errc::syntax, "predicate arguments must be atomic terms",
           n.children[i]);
    a.args.push_back(parse_term(n.children[i]));
  }
  return a;
}

Literal parse_literal(const Node& n) {
  if (n.is_list && !n.children.empty() && !n.children[0].is_list &&
      n.children[0].symbol == "not") {
    if (n.children.size() != 2 || !n.children[1].is_list)
      fail(Errc::syntax, "(not ...) takes exactly one atom", n);
    return {false, parse_atom(n.children[1])};
  }
  return {true, parse_atom(n)};
}

// A conjunction: `(and lit*)`, a bare literal, or nested ands (flattened).
void parse_conjunction(const Node& n, std::vector<Literal>& out) {
  if (n.is_list && !n.children.empty() && !n.children[0].is_list &&
      n.children[0].symbol == "and") {
    for (size_t i = 1; i < n.children.size(); ++i)
      parse_conjunction(n.children[i], out);
    return;
  }
  if (n.is_list && !n.children.empty() && !n.children[0].is_list &&
      kUnsupportedConnectives.count(n.children[0].symbol))
    fail(Errc::unsupported,
         "'" + n.children[0].symbol + "' is outside the supported subset", n);
  out.push_back(parse_literal(n));
}

void sort_dedup(std::vector<Literal>& ls) {
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
}

void sort_dedup(std::vector<Atom>& as) {
  std::sort(as.begin(), as.end());
  as.erase(std::unique(as.begin(), as.end()), as.end());
}

// ---------------------------------------------------------------- domain ---

ActionSchema parse_action(const Node& sec) {
  if (sec.children.size() < 2)
    fail(Errc::syntax, "(:action name ...) expected", sec);
  ActionSchema a;
  a.name = expect_name(sec.children[1], "action name");
  size_t i = 2;
  while (i < sec.children.size()) {
    const std::string& key = expect_symbol(sec.children[i], "action keyword");
    if (i + 1 >= sec.children.size())
      fail(Errc::syntax, "missing value after '" + key + "'", sec.children[i]);
    const Node& val = sec.children[i + 1];
    if (key == ":parameters") {
      if (!val.is_list) fail(Errc::syntax, ":parameters expects a list", val);
      for (auto& tn : parse_typed_list(val.children, 0, true, val))
        a.parameters.push_back({tn.name, tn.type});
    } else if (key == ":precondition") {
      parse_conjunction(val, a.precondition);
    } else if (key == ":effect") {
      parse_conjunction(val, a.effect);
    } else {
      fail(Errc::syntax, "unknown action keyword '" + key + "'",
           sec.children[i]);
    }
    i += 2;
  }
  sort_dedup(a.precondition);
  sort_dedup(a.effect);
  return a;
}

void check_schema_vars(const ActionSchema& a, const Node& at) {
  std::set<std::string> declared;
  for (const auto& p : a.parameters) {
    if (!declared.insert(p.name).second)
      fail(Errc::syntax, "duplicate parameter ?" + p.name + " in " + a.name, at);
  }
  auto check = [&](const std::vector<Literal>& ls, const char* where) {
    for (const auto& l : ls)
      for (const auto& t : l.atom.args) {
        if (!t.is_var())
          fail(Errc::unsupported,
               "constant '" + t.name + "' in " + where + " of " + a.name +
                   " (no :constants support)",
               at);
        if (!declared.count(t.name))
          fail(Errc::syntax,
               "undeclared variable ?" + t.name + " in " + where + " of " +
                   a.name,
               at);
      }
  };
  check(a.precondition, "precondition");
  check(a.effect, "effect");
  for (const auto& l : a.effect) {
    Literal neg = l;
    neg.positive = !l.positive;
    if (std::binary_search(a.effect.begin(), a.effect.end(), neg))
      fail(Errc::syntax,
           "effect of " + a.name + " contains " + render_literal(l) +
               " and its negation",
           at);
  }
}

void check_literals_against_header(const Domain& d,
                                   const std::vector<Literal>& ls,
                                   const std::map<std::string, std::string>& var_types,
                                   const std::string& ctx, const Node& at) {
  for (const auto& l : ls) {
    const Predicate* pr = d.find_predicate(l.atom.pred);
    if (!pr)
      fail(Errc::syntax, "unknown predicate '" + l.atom.pred + "' in " + ctx,
           at);
    if (pr->arity() != l.atom.args.size())
      fail(Errc::arity,
           "predicate '" + l.atom.pred + "' expects " +
               std::to_string(pr->arity()) + " arguments, got " +
               std::to_string(l.atom.args.size()) + " in " + ctx,
           at);
    for (size_t i = 0; i < l.atom.args.size(); ++i) {
      auto it = var_types.find(l.atom.args[i].name);
      if (it == var_types.end()) continue;  // checked elsewhere
      if (!type_compatible(it->second, pr->param_types[i]))
        fail(Errc::type_mismatch,
             "?" + l.atom.args[i].name + " : " + it->second +
                 " where '" + l.atom.pred + "' wants " + pr->param_types[i] +
                 " in " + ctx,
             at);
    }
  }
}

}  // namespace

const Predicate* Domain::find_predicate(const std::string& n) const {
  for (const auto& p : predicates)
    if (p.name == n) return &p;
  return nullptr;
}

const ActionSchema* Domain::find_action(const std::string& n) const {
  for (const auto& a : actions)
    if (a.name == n) return &a;
  return nullptr;
}

const TypedName* Problem::find_object(const std::string& n) const {
  for (const auto& o : objects)
    if (o.name == n) return &o;
  return nullptr;
}

Domain parse_domain(const std::string& text) {
  Lexer lex(text);
  Node top = lex.parse_top();
  if (top.children.size() < 2 || top.children[0].is_list ||
      top.children[0].symbol != "define")
    fail(Errc::syntax, "expected (define (domain ...) ...)", top);
  const Node& head = top.children[1];
  if (!head.is_list || head.children.size() != 2 ||
      expect_symbol(head.children[0], "header") != "domain")
    fail(Errc::syntax, "expected (domain <name>)", head);

  Domain d;
  d.name = expect_name(head.children[1], "domain name");

  for (size_t s = 2; s < top.children.size(); ++s) {
    const Node& sec = top.children[s];
    if (!sec.is_list || sec.children.empty())
      fail(Errc::syntax, "expected a (:section ...)", sec);
    const std::string& key = expect_symbol(sec.children[0], "section keyword");
    if (key == ":requirements") {
      for (size_t i = 1; i < sec.children.size(); ++i) {
        const std::string& req = expect_symbol(sec.children[i], "requirement");
        if (!kSupportedRequirements.count(req))
          fail(Errc::unsupported, "requirement '" + req + "'", sec.children[i]);
      }
    } else if (key == ":types") {
      for (auto& tn : parse_typed_list(sec.children, 1, false, sec)) {
        if (tn.type != "object")
          fail(Errc::unsupported,
               "type hierarchy deeper than one level ('" + tn.name + " - " +
                   tn.type + "')",
               sec);
        if (tn.name != "object") d.types.push_back(tn.name);
      }
    } else if (key == ":predicates") {
      for (size_t i = 1; i < sec.children.size(); ++i) {
        const Node& pn = sec.children[i];
        if (!pn.is_list || pn.children.empty())
          fail(Errc::syntax, "expected (name ?params...)", pn);
        Predicate p;
        p.name = expect_name(pn.children[0], "predicate name");
        for (auto& tn : parse_typed_list(pn.children, 1, true, pn))
          p.param_types.push_back(tn.type);
        d.predicates.push_back(p);
      }
    } else if (key == ":action") {
      d.actions.push_back(parse_action(sec));
      check_schema_vars(d.actions.back(), sec);
    } else if (kUnsupportedSections.count(key)) {
      fail(Errc::unsupported, "section '" + key + "'", sec);
    } else {
      fail(Errc::syntax, "unknown section '" + key + "'", sec);
    }
  }

  normalize(d);

  std::set<std::string> seen;
  for (const auto& p : d.predicates)
    if (!seen.insert(p.name).second)
      fail(Errc::syntax, "duplicate predicate '" + p.name + "'", top);
  seen.clear();
  for (const auto& a : d.actions)
    if (!seen.insert(a.name).second)
      fail(Errc::syntax, "duplicate action '" + a.name + "'", top);

  std::set<std::string> types(d.types.begin(), d.types.end());
  types.insert("object");
  for (const auto& p : d.predicates)
    for (const auto& t : p.param_types)
      if (!types.count(t))
        fail(Errc::unknown_type, "type '" + t + "' in predicate " + p.name, top);
  for (const auto& a : d.actions) {
    std::map<std::string, std::string> var_types;
    for (const auto& par : a.parameters) {
      if (!types.count(par.type))
        fail(Errc::unknown_type,
             "type '" + par.type + "' in parameters of " + a.name, top);
      var_types[par.name] = par.type;
    }
    check_literals_against_header(d, a.precondition, var_types,
                                  "precondition of " + a.name, top);
    check_literals_against_header(d, a.effect, var_types, "effect of " + a.name,
                                  top);
  }
  return d;
}

Problem parse_problem(const std::string& text) {
  Lexer lex(text);
  Node top = lex.parse_top();
  if (top.children.size() < 2 || top.children[0].is_list ||
      top.children[0].symbol != "define")
    fail(Errc::syntax, "expected (define (problem ...) ...)", top);
  const Node& head = top.children[1];
  if (!head.is_list || head.children.size() != 2 ||
      expect_symbol(head.children[0], "header") != "problem")
    fail(Errc::syntax, "expected (problem <name>)", head);

  Problem p;
  p.name = expect_name(head.children[1], "problem name");

  for (size_t s = 2; s < top.children.size(); ++s) {
    const Node& sec = top.children[s];
    if (!sec.is_list || sec.children.empty())
      fail(Errc::syntax, "expected a (:section ...)", sec);
    const std::string& key = expect_symbol(sec.children[0], "section keyword");
    if (key == ":domain") {
      if (sec.children.size() != 2)
        fail(Errc::syntax, "(:domain <name>) expected", sec);
      p.domain_name = expect_name(sec.children[1], "domain name");
    } else if (key == ":objects") {
      for (auto& tn : parse_typed_list(sec.children, 1, false, sec))
        p.objects.push_back(tn);
    } else if (key == ":init") {
      for (size_t i = 1; i < sec.children.size(); ++i) {
        const Node& n = sec.children[i];
        if (n.is_list && !n.children.empty() && !n.children[0].is_list &&
            n.children[0].symbol == "not")
          fail(Errc::unsupported, "negated init facts (closed world)", n);
        Atom a = parse_atom(n);
        if (!a.is_ground())
          fail(Errc::syntax, "init atom " + render_atom(a) + " is not ground",
               n);
        p.init.push_back(a);
      }
    } else if (key == ":goal") {
      if (sec.children.size() != 2)
        fail(Errc::syntax, "(:goal <conjunction>) expected", sec);
      parse_conjunction(sec.children[1], p.goal);
      for (const auto& l : p.goal)
        if (!l.atom.is_ground())
          fail(Errc::syntax,
               "goal literal " + render_literal(l) + " is not ground",
               sec.children[1]);
    } else if (kUnsupportedSections.count(key) || key == ":metric") {
      fail(Errc::unsupported, "section '" + key + "'", sec);
    } else {
      fail(Errc::syntax, "unknown section '" + key + "'", sec);
    }
  }

  normalize(p);

  std::set<std::string> names;
  for (const auto& o : p.objects)
    if (!names.insert(o.name).second)
      fail(Errc::syntax, "duplicate object '" + o.name + "'", top);

  auto check_declared = [&](const Atom& a) {
    for (const auto& t : a.args)
      if (!names.count(t.name))
        throw ParseError(Errc::undeclared_object,
                         "'" + t.name + "' in " + render_atom(a), top.line,
                         top.col);
  };
  for (const auto& a : p.init) check_declared(a);
  for (const auto& l : p.goal) check_declared(l.atom);
  return p;
}

Problem parse_problem(const std::string& text, const Domain& d) {
  Problem p = parse_problem(text);
  link(p, d);
  return p;
}

void link(const Problem& p, const Domain& d) {
  std::set<std::string> types(d.types.begin(), d.types.end());
  types.insert("object");
  std::map<std::string, std::string> obj_type;
  for (const auto& o : p.objects) {
    if (!types.count(o.type))
      throw ParseError(Errc::unknown_type,
                       "object '" + o.name + "' has unknown type " + o.type);
    obj_type[o.name] = o.type;
  }
  auto check = [&](const Atom& a, const std::string& ctx) {
    const Predicate* pr = d.find_predicate(a.pred);
    if (!pr)
      throw ParseError(Errc::type_mismatch,
                       "unknown predicate '" + a.pred + "' in " + ctx);
    if (pr->arity() != a.args.size())
      throw ParseError(Errc::arity, "predicate '" + a.pred + "' expects " +
                                        std::to_string(pr->arity()) +
                                        " arguments in " + ctx);
    for (size_t i = 0; i < a.args.size(); ++i)
      if (!type_compatible(obj_type[a.args[i].name], pr->param_types[i]))
        throw ParseError(Errc::type_mismatch,
                         "'" + a.args[i].name + "' : " +
                             obj_type[a.args[i].name] + " where '" + a.pred +
                             "' wants " + pr->param_types[i] + " in " + ctx);
  };
  for (const auto& a : p.init) check(a, "init");
  for (const auto& l : p.goal) check(l.atom, "goal");
}

void normalize(Domain& d) {
  std::sort(d.types.begin(), d.types.end());
  d.types.erase(std::unique(d.types.begin(), d.types.end()), d.types.end());
  std::sort(d.predicates.begin(), d.predicates.end(),
            [](const Predicate& a, const Predicate& b) { return a.name < b.name; });
  std::sort(d.actions.begin(), d.actions.end(),
            [](const ActionSchema& a, const ActionSchema& b) { return a.name < b.name; });
  for (auto& a : d.actions) {
    sort_dedup(a.precondition);
    sort_dedup(a.effect);
  }
}

void normalize(Problem& p) {
  std::sort(p.objects.begin(), p.objects.end(),
            [](const TypedName& a, const TypedName& b) { return a.name < b.name; });
  sort_dedup(p.init);
  sort_dedup(p.goal);
}

Atom make_atom(const std::string& pred, const std::vector<std::string>& const_args) {
  Atom a;
  a.pred = pred;
  for (const auto& c : const_args) a.args.push_back(Term::constant(c));
  return a;
}

Atom parse_ground_atom(const std::string& text) {
  Lexer lex(text);
  Node n = lex.parse_top();
  Atom a = parse_atom(n);
  if (!a.is_ground())
    fail(Errc::syntax, "atom " + render_atom(a) + " is not ground", n);
  return a;
}

std::vector<Literal> parse_goal_conjunction(const std::string& text) {
  Lexer lex(text);
  Node n = lex.parse_top();
  std::vector<Literal> out;
  parse_conjunction(n, out);
  sort_dedup(out);
  for (const auto& l : out)
    if (!l.atom.is_ground())
      fail(Errc::syntax, "goal literal " + render_literal(l) + " is not ground",
           n);
  return out;
}

}  // namespace planlab::pddl
