// Acceptance suite: every criterion prints one PASS/FAIL line; the exit code
// is the number of failures. Runs fully offline.
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "brute_oracle.hpp"
#include "planlab/acteval.hpp"
#include "planlab/agent.hpp"
#include "planlab/envs.hpp"
#include "planlab/harness.hpp"
#include "planlab/llm_client.hpp"
#include "planlab/pddl.hpp"
#include "planlab/planner.hpp"
#include "planlab/policy.hpp"

using namespace planlab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
  std::printf("%s: %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
              detail.empty() ? "" : " — ", detail.c_str());
  if (!ok) ++failures;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

envs::EnvConfig env_cfg(envs::Kind kind, envs::Difficulty diff, uint64_t seed,
                        int rooms = 0) {
  envs::EnvConfig cfg;
  cfg.kind = kind;
  cfg.difficulty = diff;
  cfg.seed = seed;
  cfg.num_rooms = rooms;
  return cfg;
}

// ---------------------------------------------------------------------------

void parser_round_trip() {
  auto t0 = std::chrono::steady_clock::now();
  fs::path dir = fs::path(PLANLAB_ASSETS_DIR) / "fixtures";
  int files = 0, ok = 0;
  bool picklock_seen = false;
  std::string first_bad;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.path().extension() != ".pddl") continue;
    ++files;
    std::string text = read_file(entry.path());
    if (text.find("pick-lock") != std::string::npos) picklock_seen = true;
    try {
      if (text.find("(problem") != std::string::npos) {
        pddl::Problem p = pddl::parse_problem(text);
        if (pddl::parse_problem(render(p)) == p) ++ok;
        else if (first_bad.empty()) first_bad = entry.path().string();
      } else {
        pddl::Domain d = pddl::parse_domain(text);
        if (pddl::parse_domain(render(d)) == d) ++ok;
        else if (first_bad.empty()) first_bad = entry.path().string();
      }
    } catch (const std::exception& e) {
      if (first_bad.empty())
        first_bad = entry.path().string() + ": " + e.what();
    }
  }
  double secs = seconds_since(t0);
  bool pass = files >= 20 && ok == files && picklock_seen && secs < 1.0;
  report("parser round-trip on the fixture corpus", pass,
         std::to_string(ok) + "/" + std::to_string(files) + " files, " +
             (picklock_seen ? "pick-lock included" : "pick-lock MISSING") +
             ", " + std::to_string(secs) + " s" +
             (first_bad.empty() ? "" : ", first failure: " + first_bad));
}

void planner_optimality() {
  auto t0 = std::chrono::steady_clock::now();
  pddl::Domain d = pddl::parse_domain(envs::coin_domain_text());
  int instances = 0, optimal = 0, validated = 0;
  std::string detail;
  for (int rooms : {3, 4})
    for (uint64_t seed = 1; seed <= 25; ++seed) {
      auto [w, obs] = envs::new_episode(
          env_cfg(envs::Kind::coin, envs::Difficulty::none, seed, rooms));
      pddl::Problem p = pddl::parse_problem(envs::export_problem(w), d);
      ++instances;
      planner::PlanResult r = planner::solve(d, p);
      int expect = testing::brute_min_plan(d, p, 8);
      if (r.has_plan() && expect >= 0 && (int)r.steps.size() == expect)
        ++optimal;
      else if (detail.empty())
        detail = "rooms " + std::to_string(rooms) + " seed " +
                 std::to_string(seed) + ": solve " +
                 (r.has_plan() ? std::to_string(r.steps.size()) : "none") +
                 " vs oracle " + std::to_string(expect);
      if (r.has_plan()) {
        std::vector<planner::PlanStep> steps;
        for (const auto& s : r.steps) steps.push_back({s.schema, s.args});
        if (planner::validate_plan(d, p, steps).accepted) ++validated;
      }
    }
  double secs = seconds_since(t0);
  bool pass = instances >= 50 && optimal == instances &&
              validated == instances && secs < 60.0;
  report("planner optimality vs brute-force oracle", pass,
         std::to_string(optimal) + "/" + std::to_string(instances) +
             " optimal, " + std::to_string(validated) + " validated, " +
             std::to_string(secs) + " s" +
             (detail.empty() ? "" : ", " + detail));
}

void failure_taxonomy() {
  fs::path gold = fs::path(PLANLAB_ASSETS_DIR) / "fixtures" / "gold";
  pddl::Domain blocks = pddl::parse_domain(read_file(gold / "blocks" / "domain.pddl"));
  pddl::Domain gripper = pddl::parse_domain(read_file(gold / "gripper" / "domain.pddl"));

  pddl::Problem unreachable = pddl::parse_problem(
      "(define (problem self) (:domain blocks) (:objects a - block) "
      "(:init (on-table a) (clear a) (arm-empty)) (:goal (on a a)))",
      blocks);
  bool no_solution = planner::solve(blocks, unreachable).status ==
                     planner::PlanResult::Status::no_solution;

  pddl::Problem big = pddl::parse_problem(
      "(define (problem big) (:domain gripper) "
      "(:objects r1 r2 r3 r4 r5 - room b1 b2 b3 b4 b5 b6 - ball g1 g2 - gripper) "
      "(:init (at-robby r1) (at b1 r1) (at b2 r1) (at b3 r2) (at b4 r2) "
      "(at b5 r3) (at b6 r3) (free g1) (free g2)) "
      "(:goal (and (at b1 r5) (at b2 r5) (at b3 r5) (at b4 r5) (at b5 r5) "
      "(at b6 r5))))",
      gripper);
  bool timeout_clock =
      planner::solve(gripper, big, {0.1, 100000000}).status ==
      planner::PlanResult::Status::timeout;
  bool timeout_states = planner::solve(gripper, big, {30.0, 100}).status ==
                        planner::PlanResult::Status::timeout;

  pddl::Problem mistyped = pddl::parse_problem(
      "(define (problem odd) (:domain blocks) (:objects a - block) "
      "(:init (levitating a)) (:goal (on-table a)))");
  bool format_error = planner::solve(blocks, mistyped).status ==
                      planner::PlanResult::Status::format_error;

  report("failure taxonomy (NoSolution / Timeout / FormatError)",
         no_solution && timeout_clock && timeout_states && format_error,
         std::string("no-solution=") + (no_solution ? "ok" : "BAD") +
             " timeout-clock=" + (timeout_clock ? "ok" : "BAD") +
             " timeout-states=" + (timeout_states ? "ok" : "BAD") +
             " format-error=" + (format_error ? "ok" : "BAD"));
}

struct BatteryResult {
  int episodes = 0;
  int wins = 0;
  int invalid_steps = 0;
  int worst_steps = 0;
  std::string first_failure;
};

BatteryResult oracle_battery(envs::Kind kind, envs::Difficulty diff, int seeds,
                             agent::Strategy strategy,
                             std::vector<agent::EpisodeLog>* sink = nullptr) {
  pddl::Domain d = pddl::parse_domain(envs::domain_text(kind));
  BatteryResult r;
  for (int seed = 1; seed <= seeds; ++seed) {
    policy::OraclePolicy oracle;
    agent::EpisodeLog log =
        agent::run_episode(env_cfg(kind, diff, seed), strategy, oracle, d);
    ++r.episodes;
    r.wins += log.success;
    r.invalid_steps += log.invalid_steps;
    if (log.success) r.worst_steps = std::max(r.worst_steps, log.steps_taken);
    if (!log.success && r.first_failure.empty())
      r.first_failure =
          "seed " + std::to_string(seed) + ": " + log.failure_reason;
    if (sink) sink->push_back(std::move(log));
  }
  return r;
}

void oracle_closed_loop() {
  BatteryResult coin = oracle_battery(envs::Kind::coin, envs::Difficulty::none,
                                      50, agent::Strategy::pddl_edit);
  BatteryResult easy = oracle_battery(envs::Kind::cooking, envs::Difficulty::easy,
                                      50, agent::Strategy::pddl_edit);
  BatteryResult hard = oracle_battery(envs::Kind::cooking, envs::Difficulty::hard,
                                      20, agent::Strategy::pddl_edit);
  bool pass = coin.wins == 50 && easy.wins == 50 && hard.wins == 20 &&
              coin.invalid_steps == 0 && easy.invalid_steps == 0 &&
              hard.invalid_steps == 0;
  report("oracle closed loop (pddl-edit): coin 50, easy 50, hard 20", pass,
         "coin " + std::to_string(coin.wins) + "/50, easy " +
             std::to_string(easy.wins) + "/50, hard " +
             std::to_string(hard.wins) + "/20, invalid steps " +
             std::to_string(coin.invalid_steps + easy.invalid_steps +
                            hard.invalid_steps) +
             (coin.first_failure.empty() ? "" : ", coin: " + coin.first_failure) +
             (easy.first_failure.empty() ? "" : ", easy: " + easy.first_failure) +
             (hard.first_failure.empty() ? "" : ", hard: " + hard.first_failure));
}

void cross_strategy_equivalence() {
  int compared = 0, mismatches = 0;
  std::string detail;
  auto battery = [&](envs::Kind kind, envs::Difficulty diff, int seeds) {
    pddl::Domain d = pddl::parse_domain(envs::domain_text(kind));
    for (int seed = 1; seed <= seeds; ++seed) {
      policy::OraclePolicy o1, o2;
      agent::EpisodeLog gen = agent::run_episode(
          env_cfg(kind, diff, seed), agent::Strategy::pddl_gen, o1, d);
      agent::EpisodeLog edit = agent::run_episode(
          env_cfg(kind, diff, seed), agent::Strategy::pddl_edit, o2, d);
      ++compared;
      bool same = gen.steps.size() == edit.steps.size() &&
                  gen.final_pf == edit.final_pf && gen.success && edit.success;
      if (same)
        for (size_t i = 0; i < gen.steps.size(); ++i)
          if (gen.steps[i].pf_hash != edit.steps[i].pf_hash ||
              gen.steps[i].action != edit.steps[i].action)
            same = false;
      if (!same) {
        ++mismatches;
        if (detail.empty())
          detail = std::string(kind == envs::Kind::coin ? "coin" : "cooking") +
                   " seed " + std::to_string(seed);
      }
    }
  };
  battery(envs::Kind::coin, envs::Difficulty::none, 50);
  battery(envs::Kind::cooking, envs::Difficulty::easy, 50);
  battery(envs::Kind::cooking, envs::Difficulty::hard, 20);
  report("oracle pddl-gen and pddl-edit build identical PFs at every step",
         mismatches == 0,
         std::to_string(compared - mismatches) + "/" + std::to_string(compared) +
             " episodes in lockstep" + (detail.empty() ? "" : ", first: " + detail));
}

void random_baseline() {
  pddl::Domain d = pddl::parse_domain(envs::coin_domain_text());
  int wins = 0, episodes = 200;
  for (int seed = 1; seed <= episodes; ++seed) {
    policy::RandomPolicy random;
    agent::EpisodeLog log =
        agent::run_episode(env_cfg(envs::Kind::coin, envs::Difficulty::none, seed),
                           agent::Strategy::action_gen, random, d);
    wins += log.success;
  }
  double rate = (double)wins / episodes;
  report("random baseline on coin stays below 15%", rate < 0.15,
         std::to_string(wins) + "/" + std::to_string(episodes) + " = " +
             std::to_string(rate * 100) + "%");
}

void efficiency_accounting() {
  // hand-built logs with means 13.6 (action-gen) and 7.8 (pddl-edit)
  std::vector<agent::EpisodeLog> logs;
  auto add = [&](const char* strategy, uint64_t seed, int steps) {
    agent::EpisodeLog log;
    log.cfg.kind = envs::Kind::coin;
    log.cfg.seed = seed;
    log.strategy = *agent::strategy_from_name(strategy);
    log.policy_name = "fixture";
    log.success = true;
    log.steps_taken = steps;
    logs.push_back(log);
  };
  int i = 0;
  for (int s : {10, 12, 14, 16, 16}) add("action-gen", ++i, s);  // mean 13.6
  for (int s : {6, 7, 8, 9, 9}) add("pddl-edit", ++i, s);        // mean 7.8
  harness::Metrics m = harness::compute_metrics(logs);
  bool found = false;
  double pct = 0;
  for (const auto& imp : m.improvements)
    if (imp.baseline_strategy == "action-gen" &&
        imp.improved_strategy == "pddl-edit") {
      found = true;
      pct = imp.ratio * 100.0;
    }
  bool pass = found && std::abs(pct - 43.0) <= 0.5;
  report("efficiency improvement report reproduces ~43%", pass,
         found ? std::to_string(pct) + "% vs 43% +/- 0.5" : "pair not found");
}

// small generator for schema pairs, mirroring the unit-test generator
pddl::ActionSchema random_schema(Rng& rng) {
  using namespace pddl;
  ActionSchema s;
  s.name = "gen";
  const char* types[] = {"ta", "tb"};
  int arity = 2 + rng.below(3);
  for (int i = 0; i < arity; ++i)
    s.parameters.push_back({"v" + std::to_string(i), types[rng.below(2)]});
  auto random_literals = [&](std::vector<Literal>& out) {
    int n = 1 + rng.below(3);
    for (int k = 0; k < n; ++k) {
      Atom atom;
      atom.pred = std::string("p") + (char)('0' + rng.below(3));
      int args = 1 + rng.below(2);
      for (int j = 0; j < args; ++j)
        atom.args.push_back(
            Term::var(s.parameters[rng.below((uint32_t)arity)].name));
      Literal lit{!rng.chance(0.4), atom};
      Literal neg{!lit.positive, lit.atom};
      if (std::count(out.begin(), out.end(), neg)) continue;
      out.push_back(lit);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  };
  random_literals(s.precondition);
  random_literals(s.effect);
  return s;
}

pddl::ActionSchema alpha_variant(const pddl::ActionSchema& s, Rng& rng) {
  pddl::ActionSchema out = s;
  std::map<std::string, std::string> sigma;
  for (size_t i = 0; i < out.parameters.size(); ++i) {
    sigma[out.parameters[i].name] = "w" + std::to_string(i);
    out.parameters[i].name = "w" + std::to_string(i);
  }
  auto rename = [&](std::vector<pddl::Literal>& ls) {
    for (auto& l : ls)
      for (auto& t : l.atom.args) t.name = sigma.at(t.name);
    std::sort(ls.begin(), ls.end());
  };
  rename(out.precondition);
  rename(out.effect);
  rng.shuffle(out.parameters);
  return out;
}

void action_equivalence_properties() {
  Rng rng(424242);
  int positive_ok = 0, positive_total = 0;
  int negative_ok = 0, negative_total = 0;
  int law_violations = 0;
  while (positive_total + negative_total < 1000) {
    pddl::ActionSchema s = random_schema(rng);
    if ((positive_total + negative_total) % 2 == 0) {
      pddl::ActionSchema variant = alpha_variant(s, rng);
      ++positive_total;
      positive_ok += acteval::actions_equivalent(s, variant);
    } else {
      pddl::ActionSchema mutant = s;
      auto& target = rng.chance(0.5) && !mutant.precondition.empty()
                         ? mutant.precondition
                         : mutant.effect;
      if (target.empty()) continue;
      size_t at = rng.below((uint32_t)target.size());
      target[at].positive = !target[at].positive;
      std::sort(target.begin(), target.end());
      ++negative_total;
      negative_ok += !acteval::actions_equivalent(s, mutant);
    }
  }
  // relation laws on alpha chains
  Rng rng2(515151);
  for (int i = 0; i < 200; ++i) {
    pddl::ActionSchema a = random_schema(rng2);
    pddl::ActionSchema b = alpha_variant(a, rng2);
    pddl::ActionSchema c = alpha_variant(b, rng2);
    if (!acteval::actions_equivalent(a, a)) ++law_violations;
    if (acteval::actions_equivalent(a, b) != acteval::actions_equivalent(b, a))
      ++law_violations;
    if (acteval::actions_equivalent(a, b) && acteval::actions_equivalent(b, c) &&
        !acteval::actions_equivalent(a, c))
      ++law_violations;
  }
  bool pass = positive_ok == positive_total && negative_ok == negative_total &&
              law_violations == 0;
  report("action equivalence: 1000 generated pairs + relation laws", pass,
         std::to_string(positive_ok) + "/" + std::to_string(positive_total) +
             " positives, " + std::to_string(negative_ok) + "/" +
             std::to_string(negative_total) + " negatives, " +
             std::to_string(law_violations) + " law violations");
}

void extrinsic_gold_row() {
  fs::path gold_root = fs::path(PLANLAB_ASSETS_DIR) / "fixtures" / "gold";
  int sets = 0;
  bool all_solved = true, all_exact = true;
  std::string detail;
  for (const auto& dir : fs::directory_iterator(gold_root)) {
    if (!dir.is_directory()) continue;
    ++sets;
    pddl::Domain gold = pddl::parse_domain(read_file(dir.path() / "domain.pddl"));
    std::vector<acteval::NamedProblem> pfs;
    for (const auto& f : fs::directory_iterator(dir.path()))
      if (f.path().filename().string().rfind("p0", 0) == 0)
        pfs.push_back({f.path().stem().string(), read_file(f.path())});
    std::map<std::string, std::string> gold_plans;
    for (const auto& pf : pfs) {
      auto r = planner::solve(gold, pddl::parse_problem(pf.text, gold));
      if (r.has_plan()) gold_plans[pf.name] = planner::render_plan(r.steps);
    }
    acteval::ExtrinsicReport rep =
        acteval::extrinsic_score(gold, pfs, gold_plans, &gold);
    if (rep.solve_rate != 1.0) {
      all_solved = false;
      if (detail.empty()) detail = dir.path().filename().string() + " solve";
    }
    if (rep.exact_rate != 1.0) {
      all_exact = false;
      if (detail.empty()) detail = dir.path().filename().string() + " exact";
    }
  }
  report("extrinsic gold row: solve 100% and exact-plan 100%",
         sets >= 5 && all_solved && all_exact,
         std::to_string(sets) + " gold DF+PF sets" +
             (detail.empty() ? "" : ", first failure: " + detail));
}

const std::vector<std::string>& fixture_script() {
  static const std::vector<std::string> script = {
      "examine cookbook", "look around", "open fridge", "take block of cheese",
      "take knife", "take red apple", "take yellow potato",
      "open kitchen cupboard", "move west", "open shoe cabinet",
      "open door to north", "move north", "open chest of drawers",
      "open wardrobe", "move south", "open door to west", "move west",
      "move east", "move east", "open door to south", "move south",
      "take black pepper", "take salt", "dice red apple",
      "slice block of cheese", "chop yellow potato", "move north", "move west",
      "move west", "cook yellow potato in barbeque", "move east", "move east",
      "prepare meal", "eat meal"};
  return script;
}

void cooking_correctness() {
  auto cfg = env_cfg(envs::Kind::cooking, envs::Difficulty::hard,
                     envs::kCookingFixtureSeed);
  bool won = false, grill_text = false;
  {
    auto [w, obs] = envs::new_episode(cfg);
    envs::StepOutcome last;
    for (const auto& a : fixture_script()) {
      auto r = envs::step(w, a);
      last = r.outcome;
      if (a == "cook yellow potato in barbeque")
        grill_text =
            r.obs.text == "You grill the yellow potato with the barbeque.";
      if (last.kind == envs::StepOutcome::Kind::invalid) break;
    }
    won = last.kind == envs::StepOutcome::Kind::won;
  }
  bool lost = false;
  std::string lost_reason;
  {
    auto [w, obs] = envs::new_episode(cfg);
    for (const auto& a : fixture_script()) {
      if (a == "cook yellow potato in barbeque") {
        envs::step(w, "move east");
        envs::step(w, "move east");
        auto r = envs::step(w, "cook yellow potato in stove");
        lost = r.outcome.kind == envs::StepOutcome::Kind::lost;
        lost_reason = r.outcome.reason;
        break;
      }
      envs::step(w, a);
    }
  }
  report("cooking correctness: walkthrough wins; wrong appliance loses",
         won && grill_text && lost && lost_reason == "fried instead of grilled",
         std::string("walkthrough ") + (won ? "won" : "DID NOT WIN") +
             ", grill text " + (grill_text ? "exact" : "WRONG") +
             ", stove variant " + (lost ? "lost (" + lost_reason + ")" : "DID NOT LOSE"));
}

void llm_client_contract() {
  std::atomic<int> hits{0}, rl_hits{0};
  httplib::Server server;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                          httplib::Response& res) {
    ++hits;
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    std::string text =
        body.is_discarded() ? "" : body["messages"].back()["content"];
    if (text.find("ratelimit") != std::string::npos && ++rl_hits <= 2) {
      res.status = 429;
      res.set_content("slow down", "text/plain");
      return;
    }
    std::string content = text.find("prose") != std::string::npos
                              ? "No fences here, just advice."
                              : "```\nadd-fact (at agent kitchen)\n```";
    nlohmann::json reply = {
        {"choices", {{{"message", {{"content", content}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  llm::LlmConfig cfg;
  cfg.endpoint_url =
      "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  cfg.backoff_base_s = 0.01;
  cfg.backoff_ceiling_s = 0.02;
  auto audit = fs::temp_directory_path() / "planlab_acceptance_audit.jsonl";
  fs::remove(audit);
  cfg.audit_log_path = audit.string();

  bool pass_through = false, retried = false, audit_ok = false,
       malformed = false;
  try {
    llm::LlmClient client(cfg);
    pass_through = llm::extract_fenced_block(client.complete(
                       {{"user", "hello"}})) == "add-fact (at agent kitchen)\n";
    int before = hits.load();
    client.complete({{"user", "ratelimit please"}});
    retried = hits.load() - before == 3;  // two 429s then success
    std::ifstream in(audit);
    int lines = 0;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) ++lines;
    audit_ok = lines == 4;  // 1 + 3 attempts
    try {
      llm::extract_fenced_block(client.complete({{"user", "prose only"}}));
    } catch (const llm::LlmError& e) {
      malformed = e.kind == llm::LlmError::Kind::malformed;
    }
  } catch (const std::exception&) {
  }
  server.stop();
  thread.join();
  report("llm client contract against the offline stub",
         pass_through && retried && audit_ok && malformed,
         std::string("pass-through=") + (pass_through ? "ok" : "BAD") +
             " retry=" + (retried ? "ok" : "BAD") +
             " audit=" + (audit_ok ? "ok" : "BAD") +
             " malformed=" + (malformed ? "ok" : "BAD"));
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  parser_round_trip();
  planner_optimality();
  failure_taxonomy();
  oracle_closed_loop();
  cross_strategy_equivalence();
  random_baseline();
  efficiency_accounting();
  action_equivalence_properties();
  extrinsic_gold_row();
  cooking_correctness();
  llm_client_contract();
  std::printf("%s — %d criteria failed (%.1f s total)\n",
              failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              failures, seconds_since(t0));
  return failures;
}
