// Batch experiment runner and metric computation: one episode log per
// (cell, seed), resumable, aggregated into success/steps/invalid-step tables.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planlab/agent.hpp"
#include "planlab/envs.hpp"

namespace planlab::harness {

struct Cell {
  envs::EnvConfig env;          // seed field unused; seeds listed below
  agent::Strategy strategy = agent::Strategy::pddl_edit;
  std::string policy = "oracle";  // oracle | random | llm | faulty:<text>
  std::vector<uint64_t> seeds;
};

struct SuiteConfig {
  std::vector<Cell> cells;
  std::string log_dir = "runs";
  int jobs = 1;
  planner::SearchLimits limits{5.0, 200000};
};

class SuiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Minimal TOML subset: [suite] scalars, [[cell]] tables, string / int /
// int-array values, '#' comments. Enough for suite files; documented in
// docs/cli.md.
SuiteConfig parse_suite_toml(const std::string& text);

std::string log_filename(const Cell& cell, uint64_t seed);
void write_episode_log(const std::string& path, const agent::EpisodeLog& log);
// Returns nothing if the file is missing or incomplete (no result line).
std::optional<agent::EpisodeLog> read_episode_log(const std::string& path);

using PolicyFactory =
    std::function<std::unique_ptr<agent::Policy>(const std::string& spec)>;
PolicyFactory default_policy_factory();

struct BatchSummary {
  int executed = 0;
  int skipped = 0;  // already-complete logs reused on rerun
};

// One log per (cell, seed). Already-completed pairs are skipped; per-episode
// failures are recorded in their logs and never abort the batch.
BatchSummary run_batch(const SuiteConfig& cfg,
                       const PolicyFactory& factory = default_policy_factory());

// ---------------------------------------------------------------- metrics --

struct SeedRow {
  std::string kind, difficulty, strategy, policy;
  uint64_t seed = 0;
  bool success = false;
  int steps = 0;
  int invalid_steps = 0;
  std::string failure_reason;
};

struct CellMetrics {
  std::string kind, difficulty, strategy, policy;
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::optional<double> mean_steps;  // successes only
  std::optional<double> sd_steps;    // sample (n-1), successes only
  double mean_invalid_all = 0.0;     // over all episodes
  std::optional<double> mean_invalid_success;  // over successes only
};

struct Improvement {
  std::string kind, difficulty, policy;
  std::string baseline_strategy, improved_strategy;
  double ratio = 0.0;  // (mean_base - mean_improved) / mean_base
};

struct Metrics {
  std::vector<SeedRow> rows;
  std::vector<CellMetrics> cells;
  std::vector<Improvement> improvements;
};

class EmptyInput : public std::runtime_error {
 public:
  EmptyInput() : std::runtime_error("no episode logs") {}
};

// Pure function of the log set; input order never matters.
Metrics compute_metrics(std::vector<agent::EpisodeLog> logs);

std::vector<agent::EpisodeLog> load_logs(const std::string& dir);

std::string metrics_csv(const Metrics& m);  // per-seed rows
std::string metrics_markdown(const Metrics& m);  // aggregate tables

}  // namespace planlab::harness
