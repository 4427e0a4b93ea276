// Semantic comparison of predicted vs. gold action definitions (invariant to
// parameter naming and conjunct order) and extrinsic solve-rate scoring with
// failure classification.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planlab/pddl.hpp"
#include "planlab/planner.hpp"

namespace planlab::acteval {

// Canonical representative of an action under parameter renaming: two schemas
// are alpha-equivalent iff their canonical forms are equal.
struct ActionCanonicalForm {
  std::string name;
  std::vector<std::string> param_type_multiset;  // sorted
  std::vector<pddl::Literal> precondition;       // canonically renamed, sorted
  std::vector<pddl::Literal> effect;

  bool operator==(const ActionCanonicalForm&) const = default;
};

ActionCanonicalForm canonical_form(const pddl::ActionSchema& a);

// True iff a type-respecting parameter bijection maps a's precondition and
// effect literal sets onto b's. Heuristic first-occurrence canonicalization
// with exhaustive fallback (arity is small in practice).
bool actions_equivalent(const pddl::ActionSchema& a, const pddl::ActionSchema& b);

struct ActionMarginals {
  bool matched = false;       // a predicted action with this name exists
  bool parameters = false;    // parameter type multisets equal
  bool precondition = false;  // precondition sets equal under some bijection
  bool effect = false;        // effect sets equal under some bijection
  bool equivalent = false;    // both equal under one common bijection
};

struct IntrinsicScores {
  double action_accuracy = 0.0;  // fraction of gold actions with an equivalent
  double parameter = 0.0;        // marginals, each over gold actions
  double precondition = 0.0;
  double effect = 0.0;
  std::map<std::string, ActionMarginals> per_action;  // by gold action name
  std::vector<std::string> unmatched_predicted;       // names not in gold
};

// Actions are paired by name; gold actions without a prediction score zero.
IntrinsicScores intrinsic_score(const pddl::Domain& pred,
                                const pddl::Domain& gold);

struct PfOutcome {
  std::string name;
  enum class Kind { solved, no_plan, timeout, solver_error } kind =
      Kind::solver_error;
  bool exact_match = false;   // canonical plan text equals the gold plan
  bool valid_on_gold = false; // predicted plan passes validation on the gold DF
  std::string plan_text;      // canonical rendering when solved
  std::string detail;         // classification detail / solver error text
  std::string category;       // review label: Syntax Error | Bad/Good Action |
                              // Bad/Good Plan (needs review) | Good Plan
};

struct ExtrinsicReport {
  std::vector<PfOutcome> outcomes;
  double solve_rate = 0.0;
  double exact_rate = 0.0;  // over PFs with a gold plan supplied
};

struct NamedProblem {
  std::string name;
  std::string text;  // raw PF source; parsed against the predicted domain
};

// Runs the solver (30 s default cap) on every PF with the predicted domain
// and classifies failures as the three unsolved causes. Gold plans, when
// given, drive exact-match; the gold domain, when given, drives plan-validity.
// Domain-name mismatches are tolerated by default (annotator drift) and only
// noted in the outcome detail; strict rejects them as solver errors.
ExtrinsicReport extrinsic_score(
    const pddl::Domain& pred, const std::vector<NamedProblem>& pfs,
    const std::map<std::string, std::string>& gold_plans = {},
    const pddl::Domain* gold = nullptr,
    const planner::SearchLimits& lim = {30.0, 1000000},
    bool strict_domain_name = false);

}  // namespace planlab::acteval
