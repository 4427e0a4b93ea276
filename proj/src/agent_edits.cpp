// Templated problem-file deltas: parse, render, apply.
#include <algorithm>

#include "planlab/agent.hpp"
#include "planlab/util.hpp"

namespace planlab::agent {

using pddl::Atom;
using pddl::Literal;
using pddl::Problem;

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::action_gen: return "action-gen";
    case Strategy::pddl_gen: return "pddl-gen";
    case Strategy::pddl_edit: return "pddl-edit";
  }
  return "?";
}

std::optional<Strategy> strategy_from_name(const std::string& s) {
  if (s == "action-gen") return Strategy::action_gen;
  if (s == "pddl-gen") return Strategy::pddl_gen;
  if (s == "pddl-edit") return Strategy::pddl_edit;
  return std::nullopt;
}

EditError::EditError(Kind k, const std::string& msg)
    : std::runtime_error(msg), kind(k) {}

namespace {

// splits "(a b) (c d)" into balanced-paren chunks
std::vector<std::string> sexp_chunks(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (depth > 0) cur.push_back(c);
    if (c == ')') {
      --depth;
      if (depth == 0) {
        out.push_back(cur);
        cur.clear();
      }
    }
  }
  if (depth != 0)
    throw EditError(EditError::Kind::malformed, "unbalanced parens in: " + s);
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

EditScript parse_edit_script(const std::string& text) {
  EditScript script;
  for (const auto& raw : split_lines(text)) {
    std::string line = trim(raw.substr(0, raw.find(';')));
    if (line.empty()) continue;
    size_t sp = line.find(' ');
    std::string op = lowercased(sp == std::string::npos ? line : line.substr(0, sp));
    std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
    EditOp e;
    try {
      if (op == "add-fact" || op == "add") {
        e.kind = EditOp::Kind::add_fact;
        e.fact = pddl::parse_ground_atom(rest);
      } else if (op == "delete-fact" || op == "delete") {
        e.kind = EditOp::Kind::delete_fact;
        e.fact = pddl::parse_ground_atom(rest);
      } else if (op == "replace-fact" || op == "replace") {
        e.kind = EditOp::Kind::replace_fact;
        auto chunks = sexp_chunks(rest);
        if (chunks.size() != 2)
          throw EditError(EditError::Kind::malformed,
                          "replace-fact wants two atoms: " + line);
        e.fact = pddl::parse_ground_atom(chunks[0]);
        e.replacement = pddl::parse_ground_atom(chunks[1]);
      } else if (op == "add-object") {
        e.kind = EditOp::Kind::add_object;
        size_t sp2 = rest.find(' ');
        if (sp2 == std::string::npos)
          throw EditError(EditError::Kind::malformed,
                          "add-object wants <name> <type>: " + line);
        e.name = lowercased(trim(rest.substr(0, sp2)));
        e.type = lowercased(trim(rest.substr(sp2 + 1)));
      } else if (op == "delete-object") {
        e.kind = EditOp::Kind::delete_object;
        e.name = lowercased(rest);
      } else if (op == "set-goal") {
        e.kind = EditOp::Kind::set_goal;
        e.goal = pddl::parse_goal_conjunction(rest);
      } else {
        throw EditError(EditError::Kind::malformed, "unknown edit op: " + line);
      }
    } catch (const pddl::ParseError& pe) {
      throw EditError(EditError::Kind::malformed,
                      "bad edit line '" + line + "': " + pe.what());
    }
    script.push_back(std::move(e));
  }
  return script;
}

std::string render_edit_script(const EditScript& script) {
  std::string out;
  for (const auto& e : script) {
    switch (e.kind) {
      case EditOp::Kind::add_fact:
        out += "add-fact " + render_atom(e.fact) + "\n";
        break;
      case EditOp::Kind::delete_fact:
        out += "delete-fact " + render_atom(e.fact) + "\n";
        break;
      case EditOp::Kind::replace_fact:
        out += "replace-fact " + render_atom(e.fact) + " " +
               render_atom(e.replacement) + "\n";
        break;
      case EditOp::Kind::add_object:
        out += "add-object " + e.name + " " + e.type + "\n";
        break;
      case EditOp::Kind::delete_object:
        out += "delete-object " + e.name + "\n";
        break;
      case EditOp::Kind::set_goal: {
        out += "set-goal (and";
        for (const auto& l : e.goal) out += " " + render_literal(l);
        out += ")\n";
        break;
      }
    }
  }
  return out;
}

pddl::Problem apply_edits(const pddl::Problem& p, const EditScript& script) {
  Problem out = p;
  auto declared = [&](const std::string& name) {
    return out.find_object(name) != nullptr;
  };
  auto check_atom_objects = [&](const Atom& a, const char* what) {
    for (const auto& t : a.args)
      if (!declared(t.name))
        throw EditError(EditError::Kind::dangling_reference,
                        std::string(what) + " " + render_atom(a) +
                            " names undeclared object '" + t.name + "'");
  };
  auto find_fact = [&](const Atom& a) {
    return std::find(out.init.begin(), out.init.end(), a);
  };

  for (const auto& e : script) {
    switch (e.kind) {
      case EditOp::Kind::add_fact: {
        check_atom_objects(e.fact, "add-fact");
        if (find_fact(e.fact) == out.init.end()) out.init.push_back(e.fact);
        break;
      }
      case EditOp::Kind::delete_fact: {
        auto it = find_fact(e.fact);
        if (it == out.init.end())
          throw EditError(EditError::Kind::dangling_reference,
                          "delete-fact: " + render_atom(e.fact) +
                              " is not in the init set");
        out.init.erase(it);
        break;
      }
      case EditOp::Kind::replace_fact: {
        auto it = find_fact(e.fact);
        if (it == out.init.end())
          throw EditError(EditError::Kind::dangling_reference,
                          "replace-fact: " + render_atom(e.fact) +
                              " is not in the init set");
        out.init.erase(it);
        check_atom_objects(e.replacement, "replace-fact");
        if (find_fact(e.replacement) == out.init.end())
          out.init.push_back(e.replacement);
        break;
      }
      case EditOp::Kind::add_object: {
        if (declared(e.name))
          throw EditError(EditError::Kind::duplicate_object,
                          "add-object: '" + e.name + "' already declared");
        out.objects.push_back({e.name, e.type.empty() ? "object" : e.type});
        break;
      }
      case EditOp::Kind::delete_object: {
        if (!declared(e.name))
          throw EditError(EditError::Kind::dangling_reference,
                          "delete-object: '" + e.name + "' is not declared");
        auto mentions = [&](const Atom& a) {
          for (const auto& t : a.args)
            if (t.name == e.name) return true;
          return false;
        };
        for (const auto& a : out.init)
          if (mentions(a))
            throw EditError(EditError::Kind::dangling_reference,
                            "delete-object: '" + e.name + "' still used by " +
                                render_atom(a));
        for (const auto& l : out.goal)
          if (mentions(l.atom))
            throw EditError(EditError::Kind::dangling_reference,
                            "delete-object: '" + e.name + "' still used by " +
                                pddl::render_literal(l));
        std::erase_if(out.objects,
                      [&](const pddl::TypedName& o) { return o.name == e.name; });
        break;
      }
      case EditOp::Kind::set_goal: {
        for (const auto& l : e.goal) check_atom_objects(l.atom, "set-goal");
        out.goal = e.goal;
        break;
      }
    }
  }
  pddl::normalize(out);
  return out;
}

}  // namespace planlab::agent
