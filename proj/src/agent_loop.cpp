// Subgoal selection and the closed-loop episode runner.
#include <algorithm>
#include <regex>

#include "planlab/agent.hpp"
#include "planlab/util.hpp"

namespace planlab::agent {

using pddl::Atom;
using pddl::Literal;
using pddl::Problem;

namespace {

std::string kind_name(envs::Kind k) {
  return k == envs::Kind::coin ? "coin" : "cooking";
}

Literal pos(const std::string& pred, const std::vector<std::string>& args) {
  return {true, pddl::make_atom(pred, args)};
}

bool has_init_atom(const Problem& p, const Atom& a) {
  return std::binary_search(p.init.begin(), p.init.end(), a);
}

}  // namespace

void AgentState::refresh_derived() {
  visited.clear();
  for (const auto& a : problem.init)
    if (a.pred == "visited" && a.args.size() == 1)
      visited.insert(a.args[0].name);
  frontier.clear();
  for (const auto& o : problem.objects) {
    if (o.name.rfind("unk-", 0) != 0) continue;
    // unk-<room>-<dir>
    size_t last = o.name.rfind('-');
    if (last == std::string::npos || last < 4) continue;
    auto dir = envs::dir_from_name(o.name.substr(last + 1));
    if (!dir) continue;
    frontier.push_back({o.name.substr(4, last - 4), *dir, o.name});
  }
}

AgentState initial_agent_state(envs::Kind kind, const pddl::Domain& d) {
  (void)d;
  AgentState a;
  a.kind = kind;
  a.problem.name = "episode";
  a.problem.domain_name = kind_name(kind);
  a.problem.objects.push_back({"agent", "agent"});
  for (const char* dir : {"north", "east", "south", "west"})
    a.problem.objects.push_back({dir, "direction"});
  a.final_goal = kind == envs::Kind::coin
                     ? std::vector<Literal>{pos("has-coin", {"agent"})}
                     : std::vector<Literal>{pos("meal-eaten", {})};
  a.problem.goal = a.final_goal;
  pddl::normalize(a.problem);
  return a;
}

namespace {

std::vector<GoalCandidate> explore_candidates(const AgentState& a) {
  std::vector<GoalCandidate> out;
  for (const auto& o : a.problem.objects)
    if (o.type == "room" && !a.visited.count(o.name))
      out.push_back({{pos("at", {"agent", o.name})}});
  return out;
}

std::vector<GoalCandidate> coin_take(const AgentState& a) {
  for (const auto& atom : a.problem.init)
    if (atom.pred == "coin-at")
      return {{{pos("has-coin", {"agent"})}}};
  return {};
}

// Once everything is gathered: one candidate per missing processing
// requirement (short plans keep the search space small), then the meal.
std::vector<GoalCandidate> cooking_prepare(const AgentState& a) {
  if (has_init_atom(a.problem, pddl::make_atom("has-meal", {"agent"})))
    return {{{pos("meal-eaten", {})}}};
  if (!a.recipe) return {};
  for (const auto& e : a.recipe->entries) {
    std::string obj = spaces_to_dashes(e.ingredient);
    if (!has_init_atom(a.problem, pddl::make_atom("carrying", {"agent", obj})))
      return {};
  }
  std::vector<GoalCandidate> out;
  for (const auto& e : a.recipe->entries) {
    std::string obj = spaces_to_dashes(e.ingredient);
    if (e.cut_req != envs::CutState::none) {
      Atom need = pddl::make_atom(envs::cut_name(e.cut_req), {obj});
      if (!has_init_atom(a.problem, need)) {
        out.push_back({{Literal{true, need}}});
        continue;  // cut before cook
      }
    }
    if (e.cook_req != envs::CookState::none) {
      Atom need = pddl::make_atom(envs::cook_name(e.cook_req), {obj});
      if (!has_init_atom(a.problem, need)) out.push_back({{Literal{true, need}}});
    }
  }
  if (out.empty()) out.push_back({{pos("meal-eaten", {})}});
  return out;
}

std::vector<GoalCandidate> cooking_gather(const AgentState& a) {
  if (!a.recipe) return {};
  std::vector<GoalCandidate> out;
  for (const auto& e : a.recipe->entries) {
    std::string obj = spaces_to_dashes(e.ingredient);
    if (has_init_atom(a.problem, pddl::make_atom("carrying", {"agent", obj})))
      continue;
    for (const auto& atom : a.problem.init)
      if (atom.pred == "in-room" && atom.args.size() == 2 &&
          atom.args[0].name == obj) {
        out.push_back({{pos("carrying", {"agent", obj})}});
        break;
      }
  }
  return out;
}

}  // namespace

SubgoalHierarchy coin_hierarchy() {
  return {{
      {"take-coin", coin_take},
      {"reach-unvisited-room", explore_candidates},
  }};
}

SubgoalHierarchy cooking_hierarchy() {
  return {{
      {"prepare-meal", cooking_prepare},
      {"gather-ingredient", cooking_gather},
      {"reach-unvisited-room", explore_candidates},
  }};
}

SubgoalHierarchy hierarchy_for(envs::Kind kind) {
  return kind == envs::Kind::coin ? coin_hierarchy() : cooking_hierarchy();
}

GoalChoice select_goal(const AgentState& a, const SubgoalHierarchy& h,
                       const pddl::Domain& d, const planner::SearchLimits& lim) {
  for (const auto& gen : h.generators) {
    auto candidates = gen.generate(a);
    if (candidates.empty()) continue;
    std::optional<GoalChoice> best;
    std::string best_key;
    for (const auto& c : candidates) {
      Problem p = a.problem;
      p.goal = c.goal;
      pddl::normalize(p);
      planner::PlanResult r = planner::solve(d, p, lim);
      if (r.status != planner::PlanResult::Status::plan) continue;
      std::string key = planner::render_plan(r.steps);
      if (!best || r.steps.size() < best->plan.size() ||
          (r.steps.size() == best->plan.size() && key < best_key)) {
        best = GoalChoice{c.goal, r.steps, gen.name};
        best_key = key;
      }
    }
    if (best) return *best;
  }
  throw AgentStuck("no generator yields a solvable goal (visited " +
                   std::to_string(a.visited.size()) + " rooms, " +
                   std::to_string(a.frontier.size()) + " frontier exits)");
}

namespace {

const char* kEditDemo =
    "add-object livingroom room\n"
    "add-fact (connected kitchen livingroom west)\n"
    "add-fact (at agent livingroom)\n"
    "delete-fact (at agent kitchen)\n"
    "replace-fact (connected kitchen unk-kitchen-west west) (connected kitchen livingroom west)\n"
    "delete-object unk-kitchen-west\n";

const char* kGenDemo =
    "(define (problem episode)\n"
    "  (:domain coin)\n"
    "  (:objects\n"
    "    agent - agent\n"
    "    kitchen - room\n"
    "    north east south west - direction\n"
    "  )\n"
    "  (:init\n"
    "    (at agent kitchen)\n"
    "    (visited kitchen)\n"
    "  )\n"
    "  (:goal (and\n"
    "    (has-coin agent)\n"
    "  ))\n"
    ")\n";

const char* kActionDemo = "move west\n";

}  // namespace

std::string PromptContext::render_prompt() const {
  std::string out;
  out += "You are an agent in a text game. Respond with exactly one fenced "
         "code block in the demonstrated format and nothing else.\n";
  if (strategy != Strategy::action_gen) {
    out += "\n## Domain file (fixed)\n```\n" + domain_text + "```\n";
    out += "\n## Current problem file\n```\n" + problem_text + "```\n";
  }
  out += "\n## Recent observations\n";
  size_t begin = observations.size() > (size_t)history_window
                     ? observations.size() - history_window
                     : 0;
  for (size_t i = begin; i < observations.size(); ++i)
    out += "> " + observations[i] + "\n";
  if (!permitted_actions.empty()) {
    out += "\n## Permitted actions\n";
    for (const auto& a : permitted_actions) out += "- " + a + "\n";
  }
  switch (strategy) {
    case Strategy::action_gen:
      out += "\n## Task\nEmit the single next action to take.\n";
      break;
    case Strategy::pddl_gen:
      out += "\n## Task\nEmit the complete updated problem file reflecting "
             "everything observed so far. Use objects named unk-<room>-<dir> "
             "for rooms behind closed doors you have not entered.\n";
      break;
    case Strategy::pddl_edit:
      out += "\n## Task\nEmit templated edits (add-fact / delete-fact / "
             "replace-fact / add-object / delete-object lines) that update "
             "the problem file with the new observations. Use objects named "
             "unk-<room>-<dir> for rooms behind closed doors you have not "
             "entered.\n";
      break;
  }
  out += "\n## Output format demonstration\n```\n";
  out += strategy == Strategy::action_gen
             ? kActionDemo
             : strategy == Strategy::pddl_gen ? kGenDemo : kEditDemo;
  out += "```\n";
  return out;
}

IntegrateResult integrate_observation(AgentState& a, const std::string& obs,
                                      Strategy s, Policy& policy,
                                      const pddl::Domain& d,
                                      const std::string& domain_text,
                                      const std::vector<std::string>& history,
                                      const std::vector<std::string>& permitted) {
  IntegrateResult result;
  if (s == Strategy::action_gen) return result;  // strategy isolation

  PromptContext ctx;
  ctx.strategy = s;
  ctx.domain_text = domain_text;
  ctx.problem_text = render(a.problem);
  ctx.observations = history;
  ctx.observations.push_back(obs);
  ctx.permitted_actions = permitted;

  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      PolicyOutput out = policy.propose(ctx);
      Problem next;
      if (s == Strategy::pddl_gen) {
        if (out.type != PolicyOutput::Type::full_problem)
          throw PolicyError("expected a full problem file");
        next = pddl::parse_problem(out.text);
      } else {
        if (out.type != PolicyOutput::Type::edit_script)
          throw PolicyError("expected an edit script");
        EditScript script = parse_edit_script(out.text);
        next = apply_edits(a.problem, script);
      }
      next.name = a.problem.name;
      next.domain_name = a.problem.domain_name;
      next.goal = a.final_goal;  // G is pinned by the agent
      pddl::normalize(next);
      link(next, d);
      result.pf_changed = !(next == a.problem);
      a.problem = std::move(next);
      a.refresh_derived();
      return result;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  result.faulted = true;
  result.fault_detail = last_error;
  ++a.policy_faults;
  return result;
}

std::map<std::string, std::string> builtin_action_map(envs::Kind kind) {
  if (kind == envs::Kind::coin)
    return {{"move", "move {3}"},
            {"open-door", "open door to {3}"},
            {"take-coin", "take coin"}};
  return {{"move", "move {3}"},
          {"open-door", "open door to {3}"},
          {"take", "take {1}"},
          {"slice", "slice {1}"},
          {"dice", "dice {1}"},
          {"chop", "chop {1}"},
          {"fry", "cook {1} in {2}"},
          {"roast", "cook {1} in {2}"},
          {"grill", "cook {1} in {2}"},
          {"prepare-meal", "prepare meal"},
          {"eat-meal", "eat meal"}};
}

std::string translate_action(const planner::GroundAction& g,
                             const std::map<std::string, std::string>& map) {
  auto it = map.find(g.schema);
  if (it == map.end())
    throw std::runtime_error("no action-map entry for schema '" + g.schema +
                             "'");
  std::string out;
  const std::string& tpl = it->second;
  for (size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i] == '{') {
      size_t close = tpl.find('}', i);
      size_t idx = std::stoul(tpl.substr(i + 1, close - i - 1));
      if (idx >= g.args.size())
        throw std::runtime_error("action-map index out of range for " +
                                 g.label);
      out += dashes_to_spaces(g.args[idx]);
      i = close;
    } else {
      out += tpl[i];
    }
  }
  return out;
}

namespace {

// Deterministic template knowledge of the game's cookbook text.
std::optional<envs::Recipe> parse_recipe(const std::string& obs) {
  if (obs.find("Gather all following ingredients") == std::string::npos)
    return std::nullopt;
  envs::Recipe r;
  auto section = [&](const std::string& header) -> std::string {
    size_t at = obs.find(header);
    if (at == std::string::npos) return "";
    size_t start = obs.find("\n  ", at);
    if (start == std::string::npos) return "";
    start += 3;
    size_t end = obs.find('\n', start);
    return obs.substr(start, end == std::string::npos ? std::string::npos
                                                      : end - start);
  };
  std::string names = section("Ingredients:");
  size_t pos = 0;
  while (pos < names.size()) {
    size_t comma = names.find(", ", pos);
    std::string name = names.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!name.empty()) r.entries.push_back({name, {}, {}});
    if (comma == std::string::npos) break;
    pos = comma + 2;
  }
  std::string directions = section("Directions:");
  pos = 0;
  while (pos < directions.size()) {
    size_t comma = directions.find(", ", pos);
    std::string dir = directions.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    size_t the = dir.find(" the ");
    if (the != std::string::npos) {
      std::string verb = dir.substr(0, the);
      std::string name = dir.substr(the + 5);
      for (auto& e : r.entries) {
        if (e.ingredient != name) continue;
        if (verb == "slice") e.cut_req = envs::CutState::sliced;
        if (verb == "dice") e.cut_req = envs::CutState::diced;
        if (verb == "chop") e.cut_req = envs::CutState::chopped;
        if (verb == "fry") e.cook_req = envs::CookState::fried;
        if (verb == "roast") e.cook_req = envs::CookState::roasted;
        if (verb == "grill") e.cook_req = envs::CookState::grilled;
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 2;
  }
  return r;
}

// Inspection actions a room description calls for: read the cookbook if the
// recipe is unknown, open every closed container mentioned.
std::vector<std::string> pending_inspections(const std::string& obs,
                                             bool cooking, bool recipe_known) {
  std::vector<std::string> out;
  if (!cooking) return out;
  if (obs.rfind("You are in the ", 0) != 0) return out;
  if (!recipe_known && obs.find("cookbook") != std::string::npos)
    out.push_back("examine cookbook");
  static const std::regex closed("a ([a-z ]+?) that is closed");
  for (auto it = std::sregex_iterator(obs.begin(), obs.end(), closed);
       it != std::sregex_iterator(); ++it)
    out.push_back("open " + (*it)[1].str());
  return out;
}

std::set<std::string> room_objects(const Problem& p) {
  std::set<std::string> out;
  for (const auto& o : p.objects)
    if (o.type == "room") out.insert(o.name);
  return out;
}

}  // namespace

EpisodeLog run_episode(const envs::EnvConfig& cfg, Strategy s, Policy& policy,
                       const pddl::Domain& d, const RunOptions& opt) {
  EpisodeLog log;
  log.strategy = s;
  log.policy_name = policy.name();

  envs::WorldState w;
  envs::Observation obs;
  try {
    auto [w0, obs0] = envs::new_episode(cfg);
    w = std::move(w0);
    obs = std::move(obs0);
  } catch (const envs::ConfigError& e) {
    log.cfg = cfg;
    log.failure_reason = std::string("config-error: ") + e.what();
    return log;
  }
  log.cfg = w.cfg;
  policy.begin_episode(&w, w.cfg.seed);

  AgentState a = initial_agent_state(w.cfg.kind, d);
  const std::string domain_text = envs::domain_text(w.cfg.kind);
  auto action_map =
      opt.action_map.empty() ? builtin_action_map(w.cfg.kind) : opt.action_map;
  SubgoalHierarchy hierarchy = hierarchy_for(w.cfg.kind);
  bool cooking = w.cfg.kind == envs::Kind::cooking;

  std::vector<std::string> history;  // observation texts

  auto finalize = [&] {
    log.success = w.status == envs::EpisodeStatus::won;
    log.steps_taken = w.steps;
    log.final_pf = render(a.problem);
    if (!log.success && log.failure_reason.empty()) {
      if (w.status == envs::EpisodeStatus::lost)
        log.failure_reason = w.end_reason == "max-steps"
                                 ? "max-steps"
                                 : "lost: " + w.end_reason;
      else
        log.failure_reason = "incomplete";
    }
    if (!log.success && a.policy_faults > 0)
      log.failure_reason += " (after " + std::to_string(a.policy_faults) +
                            " policy faults)";
    return log;
  };

  std::string last_pf_hash;
  auto record = [&](const std::string& action, const envs::StepOutcome& oc,
                    const std::string& text, const std::string& source) {
    StepRecord r;
    r.step = w.steps;
    r.action = action;
    r.outcome = envs::outcome_name(oc.kind);
    r.reason = oc.reason;
    r.observation = text;
    std::string pf_text = render(a.problem);
    r.pf_hash = to_hex(fnv1a(pf_text));
    if (r.pf_hash != last_pf_hash) {
      r.pf = pf_text;  // snapshot kept only on change, for human diffing
      last_pf_hash = r.pf_hash;
    }
    r.source = source;
    log.steps.push_back(std::move(r));
    if (oc.kind == envs::StepOutcome::Kind::invalid) ++log.invalid_steps;
  };

  auto integrate = [&](const std::string& text) {
    auto res = integrate_observation(a, text, s, policy, d, domain_text,
                                     history, obs.permitted_actions);
    if (res.faulted) log.faults.push_back(res.fault_detail);
    history.push_back(text);
    if (cooking && !a.recipe)
      if (auto r = parse_recipe(text)) a.recipe = r;
    return res;
  };

  if (w.status != envs::EpisodeStatus::running) {
    log.failure_reason = "budget-exhausted";
    return finalize();
  }

  // observe -> integrate -> inspect -> plan -> execute, until terminal
  integrate(obs.text);
  auto run_inspections = [&](const std::string& room_obs) {
    bool any = false;
    for (const auto& action :
         pending_inspections(room_obs, cooking, a.recipe.has_value())) {
      if (w.status != envs::EpisodeStatus::running) break;
      auto r = envs::step(w, action);
      integrate(r.obs.text);
      record(action, r.outcome, r.obs.text, "inspect");
      obs = r.obs;
      any = true;
    }
    return any;
  };
  run_inspections(history.empty() ? "" : history.front());

  int stale_rounds = 0;
  while (w.status == envs::EpisodeStatus::running) {
    if (s == Strategy::action_gen) {
      PromptContext ctx;
      ctx.strategy = s;
      ctx.observations = history;
      ctx.permitted_actions = obs.permitted_actions;
      std::string action;
      try {
        PolicyOutput out = policy.propose(ctx);
        action = out.text;
        // single line
        if (auto nl = action.find('\n'); nl != std::string::npos)
          action = action.substr(0, nl);
      } catch (const std::exception& e) {
        log.faults.push_back(e.what());
        log.failure_reason = "policy-fault";
        return finalize();
      }
      auto r = envs::step(w, action);
      history.push_back(r.obs.text);
      obs = r.obs;
      record(action, r.outcome, r.obs.text, "policy");
      if (w.status == envs::EpisodeStatus::running)
        run_inspections(r.obs.text);
      continue;
    }

    GoalChoice choice;
    try {
      choice = select_goal(a, hierarchy, d, opt.limits);
    } catch (const AgentStuck& e) {
      log.failure_reason = std::string("stuck: ") + e.what();
      return finalize();
    }
    log.plans.push_back(planner::render_plan(choice.plan));
    if (choice.plan.empty()) {
      if (++stale_rounds >= 2) {
        log.failure_reason = "stuck: empty plan twice";
        return finalize();
      }
      continue;
    }
    stale_rounds = 0;

    for (const auto& g : choice.plan) {
      std::string action;
      try {
        action = translate_action(g, action_map);
      } catch (const std::exception& e) {
        log.failure_reason = std::string("action-map: ") + e.what();
        return finalize();
      }
      auto before_rooms = room_objects(a.problem);
      auto r = envs::step(w, action);
      integrate(r.obs.text);
      record(action, r.outcome, r.obs.text, "plan");
      obs = r.obs;
      if (w.status != envs::EpisodeStatus::running) break;
      bool replan = false;
      if (r.outcome.kind == envs::StepOutcome::Kind::invalid) replan = true;
      if (run_inspections(r.obs.text)) replan = true;
      if (opt.replan_mid_plan && room_objects(a.problem) != before_rooms)
        replan = true;
      if (replan) break;
    }
  }
  return finalize();
}

}  // namespace planlab::agent
