#include <doctest.h>

#include <map>
#include <regex>
#include <set>

#include "planlab/agent.hpp"
#include "planlab/envs.hpp"
#include "planlab/policy.hpp"

using namespace planlab;
using namespace planlab::agent;

TEST_CASE("prompt rendering is deterministic") {
  PromptContext ctx;
  ctx.strategy = Strategy::pddl_edit;
  ctx.domain_text = envs::coin_domain_text();
  ctx.problem_text = "(define (problem p) (:domain coin))";
  ctx.observations = {"You are in the kitchen.", "You can't go that way."};
  ctx.permitted_actions = {"move west", "open door to south"};
  std::string a = ctx.render_prompt();
  std::string b = ctx.render_prompt();
  CHECK(a == b);
  CHECK(a.find("add-object") != std::string::npos);  // edit demo included
  // action-gen prompts never include the PF (strategy isolation)
  ctx.strategy = Strategy::action_gen;
  std::string c = ctx.render_prompt();
  CHECK(c.find("problem file") == std::string::npos);
  CHECK(c.find(ctx.problem_text) == std::string::npos);
}

TEST_CASE("random policy: single option, determinism, rough uniformity") {
  policy::RandomPolicy r;
  r.begin_episode(nullptr, 42);
  PromptContext ctx;
  ctx.strategy = Strategy::action_gen;
  ctx.permitted_actions = {"only choice"};
  CHECK(r.propose(ctx).text == "only choice");

  ctx.permitted_actions = {"a", "b", "c"};
  std::vector<std::string> first;
  r.begin_episode(nullptr, 7);
  for (int i = 0; i < 20; ++i) first.push_back(r.propose(ctx).text);
  r.begin_episode(nullptr, 7);
  for (int i = 0; i < 20; ++i) CHECK(r.propose(ctx).text == first[i]);

  std::map<std::string, int> counts;
  r.begin_episode(nullptr, 11);
  for (int i = 0; i < 3000; ++i) ++counts[r.propose(ctx).text];
  for (auto& [k, v] : counts) CHECK(std::abs(v - 1000) < 150);

  ctx.permitted_actions = {};
  CHECK_THROWS_AS(r.propose(ctx), PolicyError);
}

namespace {

// Extracts, from raw observation texts, what an honest reader could know:
// visited rooms, glimpsed neighbour names, and mentioned item names.
struct ObservedKnowledge {
  std::set<std::string> rooms;   // visited or named in an exit/reveal line
  std::string all_text;          // concatenated observations

  void feed(const std::string& obs) {
    all_text += obs + "\n";
    static const std::regex in_room("You are in the ([a-z]+)\\.");
    static const std::regex see_room("you see the ([a-z]+)\\.");
    static const std::regex reveal("revealing the ([a-z]+)\\.");
    for (auto re : {in_room, see_room, reveal})
      for (auto it = std::sregex_iterator(obs.begin(), obs.end(), re);
           it != std::sregex_iterator(); ++it)
        rooms.insert((*it)[1].str());
  }
};

}  // namespace

TEST_CASE("oracle emits only observation-derivable facts (no leakage) and stays sound") {
  for (auto [kind, diff, seed] :
       {std::tuple{envs::Kind::coin, envs::Difficulty::none, (uint64_t)5},
        std::tuple{envs::Kind::cooking, envs::Difficulty::hard, (uint64_t)3}}) {
    envs::EnvConfig cfg;
    cfg.kind = kind;
    cfg.difficulty = diff;
    cfg.seed = seed;
    pddl::Domain d = pddl::parse_domain(envs::domain_text(kind));
    auto [w, obs] = envs::new_episode(cfg);

    policy::OraclePolicy oracle;
    oracle.begin_episode(&w, seed);
    AgentState a = initial_agent_state(kind, d);
    ObservedKnowledge seen;
    std::vector<std::string> history;

    auto check_pf = [&] {
      // no leakage: every room object was named by some observation (or is a
      // placeholder); every thing object was mentioned verbatim
      for (const auto& o : a.problem.objects) {
        INFO("object " << o.name << " - " << o.type);
        if (o.type == "room") {
          CHECK((seen.rooms.count(o.name) || o.name.rfind("unk-", 0) == 0));
        } else if (o.type == "thing") {
          CHECK(seen.all_text.find(dashes_to_spaces(o.name)) !=
                std::string::npos);
        }
      }
      // soundness: spot-check location and connectivity atoms against truth
      auto gt = envs::oracle_view(w);
      for (const auto& atom : a.problem.init) {
        if (atom.pred == "at") CHECK(atom.args[1].name == gt.agent_room);
        if (atom.pred == "coin-at") CHECK(atom.args[0].name == gt.coin_room);
        if (atom.pred == "connected" && atom.args[1].name.rfind("unk-", 0) != 0 &&
            atom.args[0].name.rfind("unk-", 0) != 0) {
          bool found = false;
          for (const auto& r : gt.rooms) {
            if (r.name != atom.args[0].name) continue;
            for (const auto& e : r.exits)
              if (e.to == atom.args[1].name &&
                  envs::dir_name(e.dir) == atom.args[2].name)
                found = true;
          }
          CHECK(found);
        }
        if (atom.pred == "carrying") {
          bool held = false;
          for (const auto& it : gt.items)
            if (spaces_to_dashes(it.name) == atom.args[1].name && it.held)
              held = true;
          CHECK(held);
        }
      }
    };

    seen.feed(obs.text);
    integrate_observation(a, obs.text, Strategy::pddl_edit, oracle, d,
                          envs::domain_text(kind), history, obs.permitted_actions);
    history.push_back(obs.text);
    check_pf();

    Rng rng(seed);
    for (int i = 0; i < 30 && w.status == envs::EpisodeStatus::running; ++i) {
      if (obs.permitted_actions.empty()) break;
      std::string action =
          obs.permitted_actions[rng.below((uint32_t)obs.permitted_actions.size())];
      auto r = envs::step(w, action);
      obs = r.obs;
      if (w.status != envs::EpisodeStatus::running) break;
      seen.feed(obs.text);
      integrate_observation(a, obs.text, Strategy::pddl_edit, oracle, d,
                            envs::domain_text(kind), history,
                            obs.permitted_actions);
      history.push_back(obs.text);
      check_pf();
    }
  }
}

TEST_CASE("oracle edit is empty when the observation adds nothing") {
  envs::EnvConfig cfg;
  cfg.kind = envs::Kind::coin;
  cfg.seed = 9;
  pddl::Domain d = pddl::parse_domain(envs::coin_domain_text());
  auto [w, obs] = envs::new_episode(cfg);
  policy::OraclePolicy oracle;
  oracle.begin_episode(&w, 9);
  AgentState a = initial_agent_state(envs::Kind::coin, d);
  std::vector<std::string> history;
  integrate_observation(a, obs.text, Strategy::pddl_edit, oracle, d,
                        envs::coin_domain_text(), history, {});
  history.push_back(obs.text);

  // an invalid action observes nothing new
  auto r = envs::step(w, "move up");
  PromptContext ctx;
  ctx.strategy = Strategy::pddl_edit;
  ctx.problem_text = render(a.problem);
  ctx.observations = history;
  ctx.observations.push_back(r.obs.text);
  auto out = oracle.propose(ctx);
  CHECK(out.type == PolicyOutput::Type::edit_script);
  CHECK(out.text.empty());
}

TEST_CASE("oracle edits on the fixture reveal the cheese only after the fridge opens") {
  envs::EnvConfig cfg;
  cfg.kind = envs::Kind::cooking;
  cfg.difficulty = envs::Difficulty::hard;
  cfg.seed = envs::kCookingFixtureSeed;
  pddl::Domain d = pddl::parse_domain(envs::cooking_domain_text());
  auto [w, obs] = envs::new_episode(cfg);
  policy::OraclePolicy oracle;
  oracle.begin_episode(&w, cfg.seed);
  AgentState a = initial_agent_state(envs::Kind::cooking, d);
  std::vector<std::string> history;
  integrate_observation(a, obs.text, Strategy::pddl_edit, oracle, d,
                        envs::cooking_domain_text(), history, {});
  history.push_back(obs.text);
  CHECK(render(a.problem).find("block-of-cheese") == std::string::npos);

  auto r = envs::step(w, "open fridge");
  integrate_observation(a, r.obs.text, Strategy::pddl_edit, oracle, d,
                        envs::cooking_domain_text(), history, {});
  std::string pf = render(a.problem);
  CHECK(pf.find("(in-room block-of-cheese kitchen)") != std::string::npos);
  CHECK(pf.find("(uncut block-of-cheese)") != std::string::npos);
}
