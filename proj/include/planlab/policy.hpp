// Interchangeable proposal sources: ground-truth oracle, random baseline, and
// the remote chat-completion client (see llm_client.hpp for the transport).
#pragma once

#include <memory>
#include <set>

#include "planlab/agent.hpp"
#include "planlab/envs.hpp"
#include "planlab/util.hpp"

namespace planlab::policy {

using agent::Policy;
using agent::PolicyError;
using agent::PolicyOutput;
using agent::PromptContext;
using agent::Strategy;

// Perfect translator over the simulated environment: emits the minimal
// correct edit script / exact problem file / a shortest-path action, built
// from ground truth restricted to what has been observed so far. It never
// mentions unvisited rooms or the contents of closed containers.
class OraclePolicy : public Policy {
 public:
  OraclePolicy() = default;
  std::string name() const override { return "oracle"; }
  void begin_episode(const envs::WorldState* world, uint64_t seed) override;
  PolicyOutput propose(const PromptContext& ctx) override;

  // The correct problem file for the current observed knowledge (also used
  // by tests to check oracle soundness).
  pddl::Problem ideal_problem() const;

 private:
  const envs::WorldState* world_ = nullptr;
  std::set<std::string> visited_;
  bool recipe_known_ = false;

  std::string propose_action(const PromptContext& ctx);
};

class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(uint64_t base_seed = 0) : base_seed_(base_seed), rng_(0) {}
  std::string name() const override { return "random"; }
  void begin_episode(const envs::WorldState* world, uint64_t seed) override;
  PolicyOutput propose(const PromptContext& ctx) override;

 private:
  uint64_t base_seed_;
  Rng rng_;
};

// A policy that fails in a scripted way; used by fault-injection tests.
class FaultyPolicy : public Policy {
 public:
  explicit FaultyPolicy(std::string text) : text_(std::move(text)) {}
  std::string name() const override { return "faulty"; }
  PolicyOutput propose(const PromptContext& ctx) override;

 private:
  std::string text_;
};

}  // namespace planlab::policy

namespace planlab::llm {
class LlmClient;
struct LlmConfig;
}

namespace planlab::policy {

// Remote chat-completion policy: renders the prompt, extracts the fenced
// block, surfaces malformed responses to the agent's retry logic.
class LlmPolicy : public Policy {
 public:
  explicit LlmPolicy(const llm::LlmConfig& cfg);
  ~LlmPolicy() override;
  std::string name() const override;
  PolicyOutput propose(const PromptContext& ctx) override;

 private:
  std::unique_ptr<llm::LlmClient> client_;
};

}  // namespace planlab::policy
