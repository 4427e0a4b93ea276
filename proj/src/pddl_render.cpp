// Canonical printer. Output is a pure function of the (normalized) value:
// fixed section order, lexicographically sorted conjuncts, one fact per line.
#include <sstream>

#include "planlab/pddl.hpp"

namespace planlab::pddl {

std::string render_term(const Term& t) {
  return t.is_var() ? "?" + t.name : t.name;
}

std::string render_atom(const Atom& a) {
  std::string out = "(" + a.pred;
  for (const auto& t : a.args) out += " " + render_term(t);
  return out + ")";
}

std::string render_literal(const Literal& l) {
  return l.positive ? render_atom(l.atom) : "(not " + render_atom(l.atom) + ")";
}

namespace {

void render_conjunction(std::ostringstream& os, const std::vector<Literal>& ls,
                        const std::string& indent) {
  if (ls.empty()) {
    os << "(and)";
    return;
  }
  os << "(and\n";
  for (const auto& l : ls) os << indent << "  " << render_literal(l) << "\n";
  os << indent << ")";
}

}  // namespace

std::string render(const Domain& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  os << "  (:requirements :strips :typing :negative-preconditions)\n";
  if (!d.types.empty()) {
    os << "  (:types";
    for (const auto& t : d.types) os << " " << t;
    os << ")\n";
  }
  os << "  (:predicates";
  if (d.predicates.empty()) {
    os << ")\n";
  } else {
    os << "\n";
    for (const auto& p : d.predicates) {
      os << "    (" << p.name;
      for (size_t i = 0; i < p.param_types.size(); ++i)
        os << " ?v" << i << " - " << p.param_types[i];
      os << ")\n";
    }
    os << "  )\n";
  }
  for (const auto& a : d.actions) {
    os << "  (:action " << a.name << "\n";
    os << "    :parameters (";
    for (size_t i = 0; i < a.parameters.size(); ++i) {
      if (i) os << " ";
      os << "?" << a.parameters[i].name << " - " << a.parameters[i].type;
    }
    os << ")\n";
    os << "    :precondition ";
    render_conjunction(os, a.precondition, "    ");
    os << "\n    :effect ";
    render_conjunction(os, a.effect, "    ");
    os << "\n  )\n";
  }
  os << ")\n";
  return os.str();
}

std::string render(const Problem& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n";
  os << "  (:domain " << p.domain_name << ")\n";
  os << "  (:objects";
  if (p.objects.empty()) {
    os << ")\n";
  } else {
    os << "\n";
    for (const auto& o : p.objects)
      os << "    " << o.name << " - " << o.type << "\n";
    os << "  )\n";
  }
  os << "  (:init";
  if (p.init.empty()) {
    os << ")\n";
  } else {
    os << "\n";
    for (const auto& a : p.init) os << "    " << render_atom(a) << "\n";
    os << "  )\n";
  }
  os << "  (:goal (and\n";
  for (const auto& l : p.goal) os << "    " << render_literal(l) << "\n";
  os << "  ))\n";
  os << ")\n";
  return os.str();
}

}  // namespace planlab::pddl
