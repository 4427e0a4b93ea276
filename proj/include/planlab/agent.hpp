// The iterative agent loop: integrate observations into an evolving problem
// file (full regeneration or templated edits), plan against the fixed domain
// with sub-goal fallback, execute, repeat.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "planlab/envs.hpp"
#include "planlab/pddl.hpp"
#include "planlab/planner.hpp"

namespace planlab::agent {

enum class Strategy { action_gen, pddl_gen, pddl_edit };
const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(const std::string& s);

// ------------------------------------------------------------ edit script --

struct EditOp {
  enum class Kind {
    add_fact,
    delete_fact,
    replace_fact,
    add_object,
    delete_object,
    set_goal
  };
  Kind kind = Kind::add_fact;
  pddl::Atom fact;                 // add/delete, and the old fact of replace
  pddl::Atom replacement;          // replace only
  std::string name, type;          // add/delete object
  std::vector<pddl::Literal> goal; // set_goal

  bool operator==(const EditOp&) const = default;
};

using EditScript = std::vector<EditOp>;

class EditError : public std::runtime_error {
 public:
  enum class Kind { dangling_reference, duplicate_object, malformed };
  EditError(Kind k, const std::string& msg);
  Kind kind;
};

// Line-oriented text format (what PDDL-edit policies emit):
//   add-object corridor room
//   add-fact (at agent corridor)
//   replace-fact (connected kitchen unk-kitchen-west west) (connected kitchen corridor west)
//   delete-fact (door-closed kitchen corridor)
//   delete-object unk-kitchen-west
//   set-goal (and (at agent pantry))
EditScript parse_edit_script(const std::string& text);
std::string render_edit_script(const EditScript& e);

// Ops applied in order; adding an existing fact is a no-op; dangling
// references (deleting absent facts, deleting referenced objects, facts over
// undeclared objects) raise EditError rather than being dropped.
pddl::Problem apply_edits(const pddl::Problem& p, const EditScript& e);

// -------------------------------------------------------------- policies ---

struct PromptContext {
  Strategy strategy = Strategy::pddl_edit;
  std::string domain_text;                // PDDL strategies
  std::string problem_text;               // current PF (PDDL strategies)
  std::vector<std::string> observations;  // window, most recent last
  std::vector<std::string> permitted_actions;
  std::string demonstration;              // 1-shot output format demo
  int history_window = 4;

  std::string render_prompt() const;  // deterministic function of the fields
};

struct PolicyOutput {
  enum class Type { action, full_problem, edit_script } type = Type::action;
  std::string text;
  std::string transcript;  // raw exchange, for logging
};

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // Oracle and random policies hook episode start; `world` is non-null only
  // inside simulated episodes and must be ignored by remote policies.
  virtual void begin_episode(const envs::WorldState* world, uint64_t seed) {
    (void)world;
    (void)seed;
  }
  virtual PolicyOutput propose(const PromptContext& ctx) = 0;
};

// ----------------------------------------------------------- agent state ---

struct FrontierExit {
  std::string room;        // visited room the exit leaves from
  envs::Dir dir;
  std::string placeholder; // unk-<room>-<dir>
};

struct AgentState {
  envs::Kind kind = envs::Kind::coin;
  pddl::Problem problem;                   // the evolving PF
  std::vector<pddl::Literal> final_goal;   // G, kept in problem.goal
  std::set<std::string> visited;           // derived from PF visited atoms
  std::vector<FrontierExit> frontier;      // derived from PF unk-* objects
  std::optional<envs::Recipe> recipe;      // cooking: parsed from the cookbook
  int policy_faults = 0;

  void refresh_derived();                  // recompute visited/frontier
};

// Initial PF: just the agent and the four directions, goal = final goal.
AgentState initial_agent_state(envs::Kind kind, const pddl::Domain& d);

// --------------------------------------------------------------- subgoals --

struct GoalCandidate {
  std::vector<pddl::Literal> goal;
};

struct GoalGenerator {
  std::string name;
  std::function<std::vector<GoalCandidate>(const AgentState&)> generate;
};

struct SubgoalHierarchy {
  std::vector<GoalGenerator> generators;  // most preferred first
};

SubgoalHierarchy coin_hierarchy();
SubgoalHierarchy cooking_hierarchy();
SubgoalHierarchy hierarchy_for(envs::Kind kind);

class AgentStuck : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GoalChoice {
  std::vector<pddl::Literal> goal;
  std::vector<planner::GroundAction> plan;
  std::string generator;
};

// Tries generators in order; first one with >= 1 solvable candidate wins and
// the shortest plan (tie-break: lexicographic rendered plan) is returned.
// Throws AgentStuck when nothing is solvable.
GoalChoice select_goal(const AgentState& a, const SubgoalHierarchy& h,
                       const pddl::Domain& d,
                       const planner::SearchLimits& lim = {5.0, 200000});

// Policy-driven PF update. On parse/apply failure retries the policy once,
// then keeps the previous PF and counts the fault. ActionGen never touches
// the PF (strategy isolation).
struct IntegrateResult {
  bool pf_changed = false;
  bool faulted = false;
  std::string fault_detail;
};

IntegrateResult integrate_observation(AgentState& a, const std::string& obs,
                                      Strategy s, Policy& policy,
                                      const pddl::Domain& d,
                                      const std::string& domain_text,
                                      const std::vector<std::string>& history,
                                      const std::vector<std::string>& permitted);

// ------------------------------------------------------------ episode log --

struct StepRecord {
  int step = 0;
  std::string action;       // env action text
  std::string outcome;      // ok|invalid|won|lost
  std::string reason;       // invalid/lost reason
  std::string observation;
  std::string pf_hash;      // FNV of the rendered PF after integration
  std::string pf;           // rendered PF, present only when it changed
  std::string source;       // plan|inspect|policy
};

struct EpisodeLog {
  envs::EnvConfig cfg;
  Strategy strategy = Strategy::pddl_edit;
  std::string policy_name;
  std::vector<StepRecord> steps;
  std::vector<std::string> faults;
  std::vector<std::string> plans;  // rendered plans, in order
  bool success = false;
  int steps_taken = 0;
  int invalid_steps = 0;
  std::string failure_reason;  // empty on success
  std::string final_pf;        // rendered, for human diffing
};

// PDDL ground action -> env action text, e.g. (move agent r1 r2 west) ->
// "move west". Placeholders {i} are 0-based parameter indices; dashes in
// thing names become spaces.
std::map<std::string, std::string> builtin_action_map(envs::Kind kind);
std::string translate_action(const planner::GroundAction& g,
                             const std::map<std::string, std::string>& map);

struct RunOptions {
  planner::SearchLimits limits{5.0, 200000};
  std::map<std::string, std::string> action_map;  // empty = builtin
  bool replan_mid_plan = true;  // abort plans early on new information
};

// The full loop of the iterative methodology. Never throws past the log.
EpisodeLog run_episode(const envs::EnvConfig& cfg, Strategy s, Policy& policy,
                       const pddl::Domain& d, const RunOptions& opt = {});

}  // namespace planlab::agent
