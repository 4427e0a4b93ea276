#include "planlab/llm_client.hpp"
#include "planlab/policy.hpp"

namespace planlab::policy {

LlmPolicy::LlmPolicy(const llm::LlmConfig& cfg)
    : client_(std::make_unique<llm::LlmClient>(cfg)) {}

LlmPolicy::~LlmPolicy() = default;

std::string LlmPolicy::name() const {
  return "llm:" + client_->config().model;
}

PolicyOutput LlmPolicy::propose(const PromptContext& ctx) {
  std::vector<llm::Message> messages = {
      {"system",
       "You translate text-game observations into the requested format. "
       "Answer with one fenced code block only."},
      {"user", ctx.render_prompt()},
  };
  std::string content;
  try {
    content = client_->complete(messages);
  } catch (const llm::LlmError& e) {
    throw PolicyError(e.what());
  }
  PolicyOutput out;
  out.transcript = content;
  try {
    out.text = llm::extract_fenced_block(content);
  } catch (const llm::LlmError& e) {
    throw PolicyError(e.what());  // MalformedResponse -> agent retry logic
  }
  switch (ctx.strategy) {
    case Strategy::action_gen: {
      out.type = PolicyOutput::Type::action;
      // first non-empty line
      for (auto& line : split_lines(out.text))
        if (!line.empty()) {
          out.text = line;
          break;
        }
      break;
    }
    case Strategy::pddl_gen:
      out.type = PolicyOutput::Type::full_problem;
      break;
    case Strategy::pddl_edit:
      out.type = PolicyOutput::Type::edit_script;
      break;
  }
  return out;
}

}  // namespace planlab::policy
