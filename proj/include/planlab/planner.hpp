// Grounding, breadth-first forward search with wall-clock and expansion caps,
// and plan validation for the PDDL subset.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "planlab/pddl.hpp"

namespace planlab::planner {

struct GroundAction {
  std::string schema;
  std::vector<std::string> args;       // bound constants, in parameter order
  std::vector<pddl::Literal> pre;      // ground, sorted
  std::vector<pddl::Literal> eff;      // ground, sorted
  std::string label;                   // "(schema arg...)" — the tie-break key

  bool operator==(const GroundAction&) const = default;
};

// Closed-world state: sorted, duplicate-free set of ground atoms.
using State = std::vector<pddl::Atom>;

State initial_state(const pddl::Problem& p);
bool holds(const State& s, const pddl::Atom& a);
bool satisfied(const State& s, const std::vector<pddl::Literal>& conj);
// First literal of `conj` violated in `s`, if any (order = canonical order).
std::optional<pddl::Literal> first_unsatisfied(const State& s,
                                               const std::vector<pddl::Literal>& conj);

class PlanError : public std::runtime_error {
 public:
  enum class Kind { unknown_action, unknown_object, type_mismatch, not_applicable };
  PlanError(Kind k, const std::string& msg);
  Kind kind;
};

// All type-consistent instantiations of every schema over the problem's
// objects, sorted by label. Throws pddl::ParseError on type-check failure.
std::vector<GroundAction> ground(const pddl::Domain& d, const pddl::Problem& p);

// Delete-before-add successor. Throws PlanError{not_applicable} naming the
// first violated precondition literal.
State apply(const State& s, const GroundAction& a);

struct SearchLimits {
  double wall_clock_cap = 30.0;          // seconds
  uint64_t max_expanded_states = 1000000;
};

struct PlanResult {
  enum class Status { plan, no_solution, timeout, format_error };
  Status status = Status::format_error;
  std::vector<GroundAction> steps;  // when status == plan
  std::string detail;               // when status == format_error
  uint64_t expanded = 0;

  bool has_plan() const { return status == Status::plan; }
};

const char* status_name(PlanResult::Status s);

// BFS over ground actions in lexicographic label order; returns a shortest
// plan, deterministically. NoSolution only after exhausting reachable states.
PlanResult solve(const pddl::Domain& d, const pddl::Problem& p,
                 const SearchLimits& lim = {});

struct PlanStep {
  std::string schema;
  std::vector<std::string> args;
  bool operator==(const PlanStep&) const = default;
};

struct ValidationReport {
  bool accepted = false;
  // 0-based index of the first inapplicable step; -1 when the failure is a
  // goal literal (or when accepted).
  int failing_step = -1;
  std::string diagnostic;
};

// Throws PlanError on unknown action names / undeclared objects.
ValidationReport validate_plan(const pddl::Domain& d, const pddl::Problem& p,
                               const std::vector<PlanStep>& plan);

// One "(name arg...)" per line; ';' comments and blank lines skipped.
std::vector<PlanStep> parse_plan(const std::string& text);
std::string render_plan(const std::vector<GroundAction>& steps);

}  // namespace planlab::planner
