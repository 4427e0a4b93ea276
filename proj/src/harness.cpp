#include "planlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "planlab/llm_client.hpp"
#include "planlab/policy.hpp"

namespace planlab::harness {

using agent::EpisodeLog;
using nlohmann::json;

namespace {

std::string kind_str(envs::Kind k) {
  return k == envs::Kind::coin ? "coin" : "cooking";
}

std::string diff_str(envs::Difficulty d) {
  switch (d) {
    case envs::Difficulty::none: return "-";
    case envs::Difficulty::easy: return "easy";
    case envs::Difficulty::hard: return "hard";
  }
  return "?";
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

SuiteConfig parse_suite_toml(const std::string& text) {
  SuiteConfig cfg;
  Cell* cell = nullptr;
  bool in_suite = false;
  int lineno = 0;
  for (const auto& raw : split_lines(text)) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line == "[suite]") {
      in_suite = true;
      cell = nullptr;
      continue;
    }
    if (line == "[[cell]]") {
      in_suite = false;
      cfg.cells.push_back({});
      cell = &cfg.cells.back();
      continue;
    }
    if (line.front() == '[')
      throw SuiteError("line " + std::to_string(lineno) + ": unknown table " +
                       line);
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw SuiteError("line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto as_string = [&] {
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        return value.substr(1, value.size() - 2);
      return value;
    };
    auto as_int = [&] { return std::stoll(as_string()); };
    auto as_int_array = [&]() {
      std::vector<int64_t> out;
      std::string v = value;
      if (v.empty() || v.front() != '[' || v.back() != ']')
        throw SuiteError("line " + std::to_string(lineno) +
                         ": expected [int, ...]");
      v = v.substr(1, v.size() - 2);
      std::istringstream ss(v);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stoll(tok));
      }
      return out;
    };

    if (in_suite) {
      if (key == "log_dir") cfg.log_dir = as_string();
      else if (key == "jobs") cfg.jobs = (int)as_int();
      else if (key == "timeout") cfg.limits.wall_clock_cap = (double)as_int();
      else if (key == "max_states") cfg.limits.max_expanded_states = (uint64_t)as_int();
      else
        throw SuiteError("line " + std::to_string(lineno) +
                         ": unknown [suite] key " + key);
      continue;
    }
    if (!cell)
      throw SuiteError("line " + std::to_string(lineno) +
                       ": key outside [suite]/[[cell]]");
    if (key == "kind") {
      std::string v = as_string();
      if (v == "coin") cell->env.kind = envs::Kind::coin;
      else if (v == "cooking") cell->env.kind = envs::Kind::cooking;
      else throw SuiteError("unknown kind " + v);
    } else if (key == "difficulty") {
      std::string v = as_string();
      if (v == "easy") cell->env.difficulty = envs::Difficulty::easy;
      else if (v == "hard") cell->env.difficulty = envs::Difficulty::hard;
      else if (v.empty() || v == "-") cell->env.difficulty = envs::Difficulty::none;
      else throw SuiteError("unknown difficulty " + v);
    } else if (key == "strategy") {
      auto s = agent::strategy_from_name(as_string());
      if (!s) throw SuiteError("unknown strategy " + as_string());
      cell->strategy = *s;
    } else if (key == "policy") {
      cell->policy = as_string();
    } else if (key == "seeds") {
      for (auto v : as_int_array()) cell->seeds.push_back((uint64_t)v);
    } else if (key == "seed_range") {
      auto r = as_int_array();
      if (r.size() != 2 || r[0] > r[1])
        throw SuiteError("seed_range wants [lo, hi]");
      for (int64_t v = r[0]; v <= r[1]; ++v) cell->seeds.push_back((uint64_t)v);
    } else if (key == "num_rooms") {
      cell->env.num_rooms = (int)as_int();
    } else if (key == "num_ingredients") {
      cell->env.num_ingredients = (int)as_int();
    } else if (key == "max_steps") {
      cell->env.max_steps = (int)as_int();
    } else {
      throw SuiteError("line " + std::to_string(lineno) +
                       ": unknown [[cell]] key " + key);
    }
  }
  for (const auto& c : cfg.cells)
    if (c.seeds.empty()) throw SuiteError("every cell needs >= 1 seed");
  return cfg;
}

std::string log_filename(const Cell& cell, uint64_t seed) {
  std::string policy = cell.policy.substr(0, cell.policy.find(':'));
  return kind_str(cell.env.kind) + "-" + diff_str(cell.env.difficulty) + "-" +
         agent::strategy_name(cell.strategy) + "-" + policy + "-s" +
         std::to_string(seed) + ".jsonl";
}

void write_episode_log(const std::string& path, const EpisodeLog& log) {
  std::ofstream out(path, std::ios::trunc);
  json meta = {
      {"type", "meta"},
      {"kind", kind_str(log.cfg.kind)},
      {"difficulty", diff_str(log.cfg.difficulty)},
      {"strategy", agent::strategy_name(log.strategy)},
      {"policy", log.policy_name},
      {"seed", log.cfg.seed},
      {"num_rooms", log.cfg.num_rooms},
      {"num_ingredients", log.cfg.num_ingredients},
      {"max_steps", log.cfg.max_steps},
  };
  out << meta.dump() << "\n";
  for (const auto& s : log.steps) {
    json step = {
        {"type", "step"},     {"step", s.step},
        {"action", s.action}, {"outcome", s.outcome},
        {"reason", s.reason}, {"observation", s.observation},
        {"pf_hash", s.pf_hash}, {"source", s.source},
    };
    if (!s.pf.empty()) step["pf"] = s.pf;
    out << step.dump() << "\n";
  }
  for (const auto& p : log.plans)
    out << json({{"type", "plan"}, {"text", p}}).dump() << "\n";
  for (const auto& f : log.faults)
    out << json({{"type", "fault"}, {"detail", f}}).dump() << "\n";
  json result = {
      {"type", "result"},
      {"success", log.success},
      {"steps", log.steps_taken},
      {"invalid_steps", log.invalid_steps},
      {"failure_reason", log.failure_reason},
      {"final_pf", log.final_pf},
  };
  out << result.dump() << "\n";
}

std::optional<EpisodeLog> read_episode_log(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) return std::nullopt;
  EpisodeLog log;
  bool saw_meta = false, saw_result = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    std::string type = j.value("type", "");
    if (type == "meta") {
      saw_meta = true;
      log.cfg.kind = j.value("kind", "coin") == "coin" ? envs::Kind::coin
                                                       : envs::Kind::cooking;
      std::string diff = j.value("difficulty", "-");
      log.cfg.difficulty = diff == "easy" ? envs::Difficulty::easy
                           : diff == "hard" ? envs::Difficulty::hard
                                            : envs::Difficulty::none;
      if (auto s = agent::strategy_from_name(j.value("strategy", "")))
        log.strategy = *s;
      log.policy_name = j.value("policy", "");
      log.cfg.seed = j.value("seed", (uint64_t)0);
      log.cfg.num_rooms = j.value("num_rooms", 0);
      log.cfg.num_ingredients = j.value("num_ingredients", 0);
      log.cfg.max_steps = j.value("max_steps", 0);
    } else if (type == "step") {
      agent::StepRecord s;
      s.step = j.value("step", 0);
      s.action = j.value("action", "");
      s.outcome = j.value("outcome", "");
      s.reason = j.value("reason", "");
      s.observation = j.value("observation", "");
      s.pf_hash = j.value("pf_hash", "");
      s.pf = j.value("pf", "");
      s.source = j.value("source", "");
      log.steps.push_back(std::move(s));
    } else if (type == "plan") {
      log.plans.push_back(j.value("text", ""));
    } else if (type == "fault") {
      log.faults.push_back(j.value("detail", ""));
    } else if (type == "result") {
      saw_result = true;
      log.success = j.value("success", false);
      log.steps_taken = j.value("steps", 0);
      log.invalid_steps = j.value("invalid_steps", 0);
      log.failure_reason = j.value("failure_reason", "");
      log.final_pf = j.value("final_pf", "");
    }
  }
  if (!saw_meta || !saw_result) return std::nullopt;
  return log;
}

PolicyFactory default_policy_factory() {
  return [](const std::string& spec) -> std::unique_ptr<agent::Policy> {
    std::string head = spec.substr(0, spec.find(':'));
    std::string rest = spec.find(':') == std::string::npos
                           ? ""
                           : spec.substr(spec.find(':') + 1);
    if (head == "oracle") return std::make_unique<policy::OraclePolicy>();
    if (head == "random")
      return std::make_unique<policy::RandomPolicy>(
          rest.empty() ? 0 : std::stoull(rest));
    if (head == "faulty") return std::make_unique<policy::FaultyPolicy>(rest);
    if (head == "llm") {
      llm::LlmConfig cfg = llm::LlmConfig::from_env();
      if (!rest.empty()) cfg.model = rest;
      return std::make_unique<policy::LlmPolicy>(cfg);
    }
    throw SuiteError("unknown policy '" + spec + "'");
  };
}

BatchSummary run_batch(const SuiteConfig& cfg, const PolicyFactory& factory) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.log_dir);

  struct Job {
    const Cell* cell;
    uint64_t seed;
    std::string path;
  };
  std::vector<Job> jobs;
  BatchSummary summary;
  for (const auto& cell : cfg.cells)
    for (uint64_t seed : cell.seeds) {
      std::string path =
          (fs::path(cfg.log_dir) / log_filename(cell, seed)).string();
      if (read_episode_log(path)) {
        ++summary.skipped;
        continue;
      }
      jobs.push_back({&cell, seed, path});
    }

  std::mutex mu;
  size_t next = 0;
  int workers = std::max(1, cfg.jobs);
  auto worker = [&] {
    while (true) {
      size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= jobs.size()) return;
        i = next++;
      }
      const Job& job = jobs[i];
      envs::EnvConfig env = job.cell->env;
      env.seed = job.seed;
      EpisodeLog log;
      try {
        auto policy = factory(job.cell->policy);
        pddl::Domain d = pddl::parse_domain(envs::domain_text(env.kind));
        agent::RunOptions opt;
        opt.limits = cfg.limits;
        log = agent::run_episode(env, job.cell->strategy, *policy, d, opt);
      } catch (const std::exception& e) {
        log.cfg = env;
        log.strategy = job.cell->strategy;
        log.policy_name = job.cell->policy;
        log.failure_reason = std::string("runner-error: ") + e.what();
      }
      write_episode_log(job.path, log);
      {
        std::lock_guard<std::mutex> lock(mu);
        ++summary.executed;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return summary;
}

std::vector<EpisodeLog> load_logs(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<EpisodeLog> logs;
  if (!fs::exists(dir)) return logs;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".jsonl") paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths)
    if (auto log = read_episode_log(p.string())) logs.push_back(std::move(*log));
  return logs;
}

Metrics compute_metrics(std::vector<agent::EpisodeLog> logs) {
  if (logs.empty()) throw EmptyInput();
  // order independence: sort by identity
  std::sort(logs.begin(), logs.end(), [](const EpisodeLog& a, const EpisodeLog& b) {
    auto key = [](const EpisodeLog& l) {
      return std::tuple(kind_str(l.cfg.kind), diff_str(l.cfg.difficulty),
                        std::string(agent::strategy_name(l.strategy)),
                        l.policy_name, l.cfg.seed);
    };
    return key(a) < key(b);
  });

  Metrics m;
  std::map<std::tuple<std::string, std::string, std::string, std::string>,
           std::vector<const EpisodeLog*>>
      groups;
  for (const auto& log : logs) {
    SeedRow row;
    row.kind = kind_str(log.cfg.kind);
    row.difficulty = diff_str(log.cfg.difficulty);
    row.strategy = agent::strategy_name(log.strategy);
    row.policy = log.policy_name;
    row.seed = log.cfg.seed;
    row.success = log.success;
    row.steps = log.steps_taken;
    row.invalid_steps = log.invalid_steps;
    row.failure_reason = log.failure_reason;
    m.rows.push_back(row);
    groups[{row.kind, row.difficulty, row.strategy, row.policy}].push_back(&log);
  }

  for (const auto& [key, cell_logs] : groups) {
    CellMetrics c;
    std::tie(c.kind, c.difficulty, c.strategy, c.policy) = key;
    c.episodes = (int)cell_logs.size();
    std::vector<double> steps;
    double invalid_all = 0, invalid_success = 0;
    for (const auto* log : cell_logs) {
      invalid_all += log->invalid_steps;
      if (log->success) {
        ++c.successes;
        steps.push_back(log->steps_taken);
        invalid_success += log->invalid_steps;
      }
    }
    c.success_rate = (double)c.successes / c.episodes;
    c.mean_invalid_all = invalid_all / c.episodes;
    if (c.successes > 0) {
      double mean = 0;
      for (double s : steps) mean += s;
      mean /= steps.size();
      c.mean_steps = mean;
      c.mean_invalid_success = invalid_success / c.successes;
      if (steps.size() >= 2) {
        double ss = 0;
        for (double s : steps) ss += (s - mean) * (s - mean);
        c.sd_steps = std::sqrt(ss / (steps.size() - 1));  // sample sd
      }
    }
    m.cells.push_back(c);
  }

  // efficiency improvement between strategies in the same environment+policy
  for (const auto& base : m.cells) {
    if (!base.mean_steps) continue;
    for (const auto& other : m.cells) {
      if (!other.mean_steps) continue;
      if (base.kind != other.kind || base.difficulty != other.difficulty ||
          base.policy != other.policy || base.strategy == other.strategy)
        continue;
      if (*other.mean_steps >= *base.mean_steps) continue;
      Improvement imp;
      imp.kind = base.kind;
      imp.difficulty = base.difficulty;
      imp.policy = base.policy;
      imp.baseline_strategy = base.strategy;
      imp.improved_strategy = other.strategy;
      imp.ratio = (*base.mean_steps - *other.mean_steps) / *base.mean_steps;
      m.improvements.push_back(imp);
    }
  }
  return m;
}

std::string metrics_csv(const Metrics& m) {
  std::string out =
      "kind,difficulty,strategy,policy,seed,success,steps,invalid_steps,"
      "failure_reason\n";
  for (const auto& r : m.rows) {
    std::string reason = r.failure_reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    out += r.kind + "," + r.difficulty + "," + r.strategy + "," + r.policy +
           "," + std::to_string(r.seed) + "," + (r.success ? "1" : "0") + "," +
           std::to_string(r.steps) + "," + std::to_string(r.invalid_steps) +
           "," + reason + "\n";
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string metrics_markdown(const Metrics& m) {
  std::string out =
      "| kind | difficulty | strategy | policy | episodes | success rate | "
      "mean steps | sd steps | invalid/ep (all) | invalid/ep (succ) |\n"
      "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& c : m.cells) {
    out += "| " + c.kind + " | " + c.difficulty + " | " + c.strategy + " | " +
           c.policy + " | " + std::to_string(c.episodes) + " | " +
           fmt(c.success_rate) + " | " +
           (c.mean_steps ? fmt(*c.mean_steps) : "-") + " | " +
           (c.sd_steps ? fmt(*c.sd_steps) : "-") + " | " +
           fmt(c.mean_invalid_all) + " | " +
           (c.mean_invalid_success ? fmt(*c.mean_invalid_success) : "-") +
           " |\n";
  }
  if (!m.improvements.empty()) {
    out += "\n| kind | difficulty | policy | baseline | improved | efficiency gain |\n"
           "|---|---|---|---|---|---|\n";
    for (const auto& i : m.improvements)
      out += "| " + i.kind + " | " + i.difficulty + " | " + i.policy + " | " +
             i.baseline_strategy + " | " + i.improved_strategy + " | " +
             fmt(i.ratio * 100) + "% |\n";
  }
  return out;
}

}  // namespace planlab::harness
