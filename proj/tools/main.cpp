// planlab: parse/solve/validate PDDL, play/export the text games, run the
// iterative agent, batch experiments, and score predicted domains.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "planlab/acteval.hpp"
#include "planlab/agent.hpp"
#include "planlab/envs.hpp"
#include "planlab/harness.hpp"
#include "planlab/llm_client.hpp"
#include "planlab/pddl.hpp"
#include "planlab/planner.hpp"
#include "planlab/policy.hpp"

using namespace planlab;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out.good()) throw std::runtime_error("cannot write " + path);
  out << text;
}

envs::Kind parse_kind(const std::string& s) {
  if (s == "coin") return envs::Kind::coin;
  if (s == "cooking") return envs::Kind::cooking;
  throw CLI::ValidationError("--kind", "must be coin or cooking");
}

envs::Difficulty parse_difficulty(const std::string& s) {
  if (s.empty() || s == "-") return envs::Difficulty::none;
  if (s == "easy") return envs::Difficulty::easy;
  if (s == "hard") return envs::Difficulty::hard;
  throw CLI::ValidationError("--difficulty", "must be easy or hard");
}

struct GlobalOpts {
  bool json_output = false;
  int verbosity = 0;
  std::string config_path;
  std::string llm_url, llm_key, llm_model, llm_audit;

  // precedence: flags > environment > config file > defaults
  llm::LlmConfig llm_config() const {
    llm::LlmConfig cfg;  // defaults
    if (!config_path.empty()) {
      json j = json::parse(read_file(config_path), nullptr, false);
      if (j.is_discarded())
        throw std::runtime_error("config file is not valid JSON: " + config_path);
      cfg.endpoint_url = j.value("llm_url", cfg.endpoint_url);
      cfg.api_key = j.value("llm_key", cfg.api_key);
      cfg.model = j.value("llm_model", cfg.model);
      cfg.audit_log_path = j.value("llm_audit", cfg.audit_log_path);
      cfg.temperature = j.value("llm_temperature", cfg.temperature);
    }
    llm::LlmConfig env = llm::LlmConfig::from_env();
    if (!env.endpoint_url.empty()) cfg.endpoint_url = env.endpoint_url;
    if (!env.api_key.empty()) cfg.api_key = env.api_key;
    if (env.model != "gpt-4") cfg.model = env.model;
    if (!env.audit_log_path.empty()) cfg.audit_log_path = env.audit_log_path;
    if (!llm_url.empty()) cfg.endpoint_url = llm_url;
    if (!llm_key.empty()) cfg.api_key = llm_key;
    if (!llm_model.empty()) cfg.model = llm_model;
    if (!llm_audit.empty()) cfg.audit_log_path = llm_audit;
    return cfg;
  }
};

std::map<std::string, std::string> load_action_map(const std::string& path) {
  json j = json::parse(read_file(path));
  std::map<std::string, std::string> map;
  for (auto& [k, v] : j.items()) map[k] = v.get<std::string>();
  return map;
}

// ----------------------------------------------------------- subcommands ---

int cmd_parse(const std::string& domain_path, const std::string& problem_path,
              const GlobalOpts& g) {
  try {
    if (!domain_path.empty() && problem_path.empty()) {
      pddl::Domain d = pddl::parse_domain(read_file(domain_path));
      std::cout << render(d);
      return 0;
    }
    pddl::Problem p;
    if (!domain_path.empty()) {
      pddl::Domain d = pddl::parse_domain(read_file(domain_path));
      p = pddl::parse_problem(read_file(problem_path), d);
    } else {
      p = pddl::parse_problem(read_file(problem_path));
    }
    std::cout << render(p);
    return 0;
  } catch (const pddl::ParseError& e) {
    if (g.json_output)
      std::cout << json({{"error", e.what()},
                         {"kind", pddl::errc_name(e.code)},
                         {"line", e.line},
                         {"col", e.col}})
                       .dump()
                << "\n";
    else
      std::cerr << e.what() << "\n";
    return 1;
  }
}

int cmd_solve(const std::string& domain_path, const std::string& problem_path,
              double timeout, uint64_t max_states, const GlobalOpts& g) {
  pddl::Domain d;
  pddl::Problem p;
  try {
    d = pddl::parse_domain(read_file(domain_path));
    p = pddl::parse_problem(read_file(problem_path), d);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;  // FormatError
  }
  planner::PlanResult r = planner::solve(d, p, {timeout, max_states});
  if (g.json_output) {
    json out = {{"status", planner::status_name(r.status)},
                {"expanded", r.expanded}};
    if (r.has_plan()) {
      json steps = json::array();
      for (const auto& s : r.steps) steps.push_back(s.label);
      out["plan"] = steps;
      out["length"] = r.steps.size();
    }
    if (!r.detail.empty()) out["detail"] = r.detail;
    std::cout << out.dump() << "\n";
  }
  switch (r.status) {
    case planner::PlanResult::Status::plan:
      if (!g.json_output) std::cout << planner::render_plan(r.steps);
      return 0;
    case planner::PlanResult::Status::no_solution:
      if (!g.json_output) std::cout << ";NO-SOLUTION\n";
      return 1;
    case planner::PlanResult::Status::timeout:
      if (!g.json_output) std::cout << ";TIMEOUT\n";
      return 2;
    case planner::PlanResult::Status::format_error:
      std::cerr << r.detail << "\n";
      return 3;
  }
  return 3;
}

int cmd_validate(const std::string& domain_path, const std::string& problem_path,
                 const std::string& plan_path, const GlobalOpts& g) {
  try {
    pddl::Domain d = pddl::parse_domain(read_file(domain_path));
    pddl::Problem p = pddl::parse_problem(read_file(problem_path), d);
    auto steps = planner::parse_plan(read_file(plan_path));
    planner::ValidationReport rep = planner::validate_plan(d, p, steps);
    if (g.json_output)
      std::cout << json({{"accepted", rep.accepted},
                         {"failing_step", rep.failing_step},
                         {"diagnostic", rep.diagnostic}})
                       .dump()
                << "\n";
    else if (rep.accepted)
      std::cout << "Accept: " << steps.size() << " steps\n";
    else
      std::cout << "Reject: " << rep.diagnostic << "\n";
    return rep.accepted ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}

int cmd_env_play(const envs::EnvConfig& cfg, bool show_permitted) {
  auto [w, obs] = envs::new_episode(cfg);
  std::cout << "> " << obs.text << "\n";
  if (show_permitted)
    for (const auto& a : obs.permitted_actions) std::cerr << "  * " << a << "\n";
  std::string line;
  while (w.status == envs::EpisodeStatus::running) {
    std::cout << "< " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line.empty()) continue;
    if (line == "quit" || line == "exit") break;
    auto r = envs::step(w, line);
    std::cout << "> " << r.obs.text << "\n";
    if (show_permitted)
      for (const auto& a : r.obs.permitted_actions)
        std::cerr << "  * " << a << "\n";
  }
  if (w.status == envs::EpisodeStatus::won) {
    std::cout << "*** You won in " << w.steps << " steps. ***\n";
    return 0;
  }
  std::cout << "*** Episode over (" << (w.end_reason.empty() ? "quit" : w.end_reason)
            << ") after " << w.steps << " steps. ***\n";
  return 1;
}

int cmd_env_export(const envs::EnvConfig& cfg, const std::string& domain_out,
                   const std::string& problem_out) {
  auto [w, obs] = envs::new_episode(cfg);
  std::string df = envs::domain_text(cfg.kind);
  std::string pf = envs::export_problem(w);
  if (!domain_out.empty()) write_file(domain_out, df);
  if (!problem_out.empty()) write_file(problem_out, pf);
  if (domain_out.empty() && problem_out.empty()) {
    std::cout << df << "\n" << pf;
  }
  return 0;
}

int cmd_agent_run(const envs::EnvConfig& cfg, const std::string& strategy_name,
                  const std::string& policy_spec, const std::string& log_path,
                  const std::string& domain_path, const std::string& map_path,
                  const GlobalOpts& g) {
  auto strategy = agent::strategy_from_name(strategy_name);
  if (!strategy) {
    std::cerr << "unknown strategy '" << strategy_name << "'\n";
    return 2;
  }
  pddl::Domain d = domain_path.empty()
                       ? pddl::parse_domain(envs::domain_text(cfg.kind))
                       : pddl::parse_domain(read_file(domain_path));
  agent::RunOptions opt;
  if (!map_path.empty()) opt.action_map = load_action_map(map_path);

  std::unique_ptr<agent::Policy> policy;
  if (policy_spec.rfind("llm", 0) == 0) {
    policy = std::make_unique<policy::LlmPolicy>(g.llm_config());
  } else {
    policy = harness::default_policy_factory()(policy_spec);
  }
  agent::EpisodeLog log = agent::run_episode(cfg, *strategy, *policy, d, opt);
  if (!log_path.empty()) harness::write_episode_log(log_path, log);
  if (g.json_output) {
    std::cout << json({{"success", log.success},
                       {"steps", log.steps_taken},
                       {"invalid_steps", log.invalid_steps},
                       {"failure_reason", log.failure_reason}})
                     .dump()
              << "\n";
  } else {
    std::cout << (log.success ? "WON" : "FAILED") << " steps=" << log.steps_taken
              << " invalid=" << log.invalid_steps;
    if (!log.failure_reason.empty()) std::cout << " reason=" << log.failure_reason;
    std::cout << "\n";
  }
  return log.success ? 0 : 1;
}

int cmd_eval_run(const std::string& suite_path, int jobs_override,
                 const GlobalOpts& g) {
  (void)g;
  harness::SuiteConfig suite = harness::parse_suite_toml(read_file(suite_path));
  if (jobs_override > 0) suite.jobs = jobs_override;
  harness::BatchSummary s = harness::run_batch(suite);
  std::cerr << "executed " << s.executed << ", reused " << s.skipped
            << " episode logs in " << suite.log_dir << "\n";
  return 0;
}

int cmd_eval_report(const std::string& logs_dir, const std::string& format,
                    const std::string& out_path, const GlobalOpts& g) {
  auto logs = harness::load_logs(logs_dir);
  harness::Metrics m;
  try {
    m = harness::compute_metrics(logs);
  } catch (const harness::EmptyInput&) {
    std::cerr << "no episode logs under " << logs_dir << "\n";
    return 1;
  }
  std::string text;
  if (g.json_output) {
    json cells = json::array();
    for (const auto& c : m.cells) {
      json jc = {{"kind", c.kind},
                 {"difficulty", c.difficulty},
                 {"strategy", c.strategy},
                 {"policy", c.policy},
                 {"episodes", c.episodes},
                 {"success_rate", c.success_rate},
                 {"mean_invalid_all", c.mean_invalid_all}};
      if (c.mean_steps) jc["mean_steps"] = *c.mean_steps;
      if (c.sd_steps) jc["sd_steps"] = *c.sd_steps;
      if (c.mean_invalid_success)
        jc["mean_invalid_success"] = *c.mean_invalid_success;
      cells.push_back(jc);
    }
    json imps = json::array();
    for (const auto& i : m.improvements)
      imps.push_back({{"kind", i.kind},
                      {"difficulty", i.difficulty},
                      {"policy", i.policy},
                      {"baseline", i.baseline_strategy},
                      {"improved", i.improved_strategy},
                      {"ratio", i.ratio}});
    text = json({{"cells", cells}, {"improvements", imps}}).dump(2) + "\n";
  } else {
    text = format == "csv" ? harness::metrics_csv(m) : harness::metrics_markdown(m);
  }
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return 0;
}

int cmd_action_eval(const std::string& pred_path, const std::string& gold_path,
                    const std::string& pf_dir, const std::string& plans_dir,
                    const std::string& report_path, double timeout,
                    bool strict_domain, const GlobalOpts& g) {
  pddl::Domain pred = pddl::parse_domain(read_file(pred_path));
  pddl::Domain gold = pddl::parse_domain(read_file(gold_path));
  acteval::IntrinsicScores intr = acteval::intrinsic_score(pred, gold);

  json report;
  report["intrinsic"] = {{"action_accuracy", intr.action_accuracy},
                         {"parameter", intr.parameter},
                         {"precondition", intr.precondition},
                         {"effect", intr.effect}};
  json per = json::object();
  for (const auto& [name, m] : intr.per_action)
    per[name] = {{"matched", m.matched},
                 {"parameters", m.parameters},
                 {"precondition", m.precondition},
                 {"effect", m.effect},
                 {"equivalent", m.equivalent}};
  report["intrinsic"]["per_action"] = per;
  report["intrinsic"]["unmatched_predicted"] = intr.unmatched_predicted;

  if (!pf_dir.empty()) {
    std::vector<acteval::NamedProblem> pfs;
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(pf_dir))
      if (entry.path().extension() == ".pddl") paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
      std::string text = read_file(p.string());
      if (text.find("(problem") == std::string::npos) continue;  // a DF
      pfs.push_back({p.stem().string(), text});
    }
    std::map<std::string, std::string> gold_plans;
    if (!plans_dir.empty())
      for (const auto& entry : std::filesystem::directory_iterator(plans_dir))
        if (entry.path().extension() == ".plan")
          gold_plans[entry.path().stem().string()] =
              read_file(entry.path().string());
    acteval::ExtrinsicReport ext = acteval::extrinsic_score(
        pred, pfs, gold_plans, &gold, {timeout, 1000000}, strict_domain);
    json outcomes = json::array();
    for (const auto& o : ext.outcomes) {
      const char* kind = o.kind == acteval::PfOutcome::Kind::solved ? "solved"
                         : o.kind == acteval::PfOutcome::Kind::no_plan
                             ? "no-plan"
                         : o.kind == acteval::PfOutcome::Kind::timeout
                             ? "timeout"
                             : "solver-error";
      outcomes.push_back({{"pf", o.name},
                          {"outcome", kind},
                          {"exact_match", o.exact_match},
                          {"valid_on_gold", o.valid_on_gold},
                          {"category", o.category},
                          {"plan", o.plan_text},
                          {"detail", o.detail}});
    }
    report["extrinsic"] = {{"solve_rate", ext.solve_rate},
                           {"exact_rate", ext.exact_rate},
                           {"outcomes", outcomes}};
  }

  std::string text = report.dump(2) + "\n";
  if (report_path.empty())
    std::cout << text;
  else
    write_file(report_path, text);
  if (!g.json_output) {
    std::cerr << "action accuracy " << intr.action_accuracy << ", marginals p/pre/eff "
              << intr.parameter << "/" << intr.precondition << "/" << intr.effect
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planlab: a PDDL planning laboratory around two text games"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_flag("--json", g.json_output, "machine-readable output everywhere");
  app.add_flag("-v,--verbose", g.verbosity, "more diagnostics on stderr");
  app.add_option("--config", g.config_path, "JSON config file (llm_* keys)");
  app.add_option("--llm-url", g.llm_url, "chat-completions endpoint URL");
  app.add_option("--llm-key", g.llm_key, "API key");
  app.add_option("--llm-model", g.llm_model, "model name");
  app.add_option("--llm-audit", g.llm_audit, "append-only audit JSONL path");

  // parse
  std::string domain_path, problem_path, plan_path;
  auto* parse_cmd = app.add_subcommand("parse", "parse and canonically print");
  parse_cmd->add_option("-d,--domain", domain_path, "domain file");
  parse_cmd->add_option("-p,--problem", problem_path, "problem file");

  // solve
  double timeout = 30.0;
  uint64_t max_states = 1000000;
  auto* solve_cmd = app.add_subcommand("solve", "BFS planner");
  solve_cmd->add_option("-d,--domain", domain_path)->required();
  solve_cmd->add_option("-p,--problem", problem_path)->required();
  solve_cmd->add_option("--timeout", timeout, "wall clock cap in seconds");
  solve_cmd->add_option("--max-states", max_states, "expansion cap");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "check a plan");
  validate_cmd->add_option("-d,--domain", domain_path)->required();
  validate_cmd->add_option("-p,--problem", problem_path)->required();
  validate_cmd->add_option("--plan", plan_path)->required();

  // env
  std::string kind_str = "coin", difficulty_str, domain_out, problem_out;
  uint64_t seed = 1;
  int rooms = 0, ingredients = 0, max_steps = 50;
  bool show_permitted = false;
  auto* env_cmd = app.add_subcommand("env", "text-game environments");
  auto* play_cmd = env_cmd->add_subcommand("play", "interactive transcript");
  auto* export_cmd = env_cmd->add_subcommand("export-pddl", "gold DF+PF dump");
  for (auto* c : {play_cmd, export_cmd}) {
    c->add_option("--kind", kind_str, "coin|cooking");
    c->add_option("--difficulty", difficulty_str, "easy|hard (cooking)");
    c->add_option("--seed", seed);
    c->add_option("--rooms", rooms, "0 = default");
    c->add_option("--ingredients", ingredients, "0 = default");
    c->add_option("--max-steps", max_steps);
  }
  play_cmd->add_flag("--show-permitted", show_permitted,
                     "list permitted actions on stderr");
  export_cmd->add_option("--domain-out", domain_out);
  export_cmd->add_option("--problem-out", problem_out);

  // agent
  std::string strategy_str = "pddl-edit", policy_spec = "oracle", log_path,
              map_path;
  auto* agent_cmd = app.add_subcommand("agent", "iterative agent loop");
  auto* run_cmd = agent_cmd->add_subcommand("run", "one episode");
  run_cmd->add_option("--kind", kind_str, "coin|cooking");
  run_cmd->add_option("--difficulty", difficulty_str, "easy|hard (cooking)");
  run_cmd->add_option("--seed", seed);
  run_cmd->add_option("--rooms", rooms);
  run_cmd->add_option("--ingredients", ingredients);
  run_cmd->add_option("--max-steps", max_steps);
  run_cmd->add_option("--strategy", strategy_str, "action-gen|pddl-gen|pddl-edit");
  run_cmd->add_option("--policy", policy_spec, "oracle|random|llm[:model]");
  run_cmd->add_option("--log", log_path, "episode log JSONL path");
  run_cmd->add_option("--domain", domain_path, "override the bundled DF");
  run_cmd->add_option("--action-map", map_path, "override the action map JSON");

  // eval
  std::string suite_path, logs_dir, format = "md", out_path;
  int jobs = 0;
  auto* eval_cmd = app.add_subcommand("eval", "batch experiments");
  auto* eval_run = eval_cmd->add_subcommand("run", "run a suite");
  eval_run->add_option("--suite", suite_path)->required();
  eval_run->add_option("--jobs", jobs, "parallel episodes");
  auto* eval_report = eval_cmd->add_subcommand("report", "aggregate logs");
  eval_report->add_option("--logs", logs_dir)->required();
  eval_report->add_option("--format", format, "csv|md");
  eval_report->add_option("--out", out_path, "write to file instead of stdout");

  // action-eval
  std::string pred_path, gold_path, pf_dir, plans_dir, report_path;
  double ae_timeout = 30.0;
  bool ae_strict = false;
  auto* ae_cmd = app.add_subcommand("action-eval", "score predicted domains");
  ae_cmd->add_option("--pred", pred_path)->required();
  ae_cmd->add_option("--gold", gold_path)->required();
  ae_cmd->add_option("--pf", pf_dir, "directory of problem files");
  ae_cmd->add_option("--plans", plans_dir, "directory of gold .plan files");
  ae_cmd->add_option("--report", report_path, "output JSON path");
  ae_cmd->add_option("--timeout", ae_timeout, "solver cap per PF");
  ae_cmd->add_flag("--strict-domain-name", ae_strict,
                   "reject PFs naming a different domain");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  try {
    if (parse_cmd->parsed()) {
      if (domain_path.empty() && problem_path.empty()) {
        std::cerr << "parse: need --domain and/or --problem\n";
        return 2;
      }
      return cmd_parse(domain_path, problem_path, g);
    }
    if (solve_cmd->parsed())
      return cmd_solve(domain_path, problem_path, timeout, max_states, g);
    if (validate_cmd->parsed())
      return cmd_validate(domain_path, problem_path, plan_path, g);
    if (env_cmd->parsed()) {
      envs::EnvConfig cfg;
      cfg.kind = parse_kind(kind_str);
      cfg.difficulty = parse_difficulty(difficulty_str);
      cfg.seed = seed;
      cfg.num_rooms = rooms;
      cfg.num_ingredients = ingredients;
      cfg.max_steps = max_steps;
      if (play_cmd->parsed()) return cmd_env_play(cfg, show_permitted);
      if (export_cmd->parsed())
        return cmd_env_export(cfg, domain_out, problem_out);
      std::cerr << "env: need a subcommand (play | export-pddl)\n";
      return 2;
    }
    if (agent_cmd->parsed()) {
      if (!run_cmd->parsed()) {
        std::cerr << "agent: need a subcommand (run)\n";
        return 2;
      }
      envs::EnvConfig cfg;
      cfg.kind = parse_kind(kind_str);
      cfg.difficulty = parse_difficulty(difficulty_str);
      cfg.seed = seed;
      cfg.num_rooms = rooms;
      cfg.num_ingredients = ingredients;
      cfg.max_steps = max_steps;
      return cmd_agent_run(cfg, strategy_str, policy_spec, log_path,
                           domain_path, map_path, g);
    }
    if (eval_cmd->parsed()) {
      if (eval_run->parsed()) return cmd_eval_run(suite_path, jobs, g);
      if (eval_report->parsed())
        return cmd_eval_report(logs_dir, format, out_path, g);
      std::cerr << "eval: need a subcommand (run | report)\n";
      return 2;
    }
    if (ae_cmd->parsed())
      return cmd_action_eval(pred_path, gold_path, pf_dir, plans_dir,
                             report_path, ae_timeout, ae_strict, g);
  } catch (const envs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pddl::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
