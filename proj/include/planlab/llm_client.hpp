// Chat-completion HTTP client with retry/backoff, fenced-block extraction,
// an append-only audit log, and a replay mode that re-serves recorded logs.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace planlab::llm {

struct Message {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct LlmConfig {
  std::string endpoint_url;  // e.g. "http://127.0.0.1:8080/v1/chat/completions"
  std::string api_key;
  std::string model = "gpt-4";
  double temperature = 0.0;
  int max_attempts = 4;          // 1 initial + up to 3 retries
  double backoff_base_s = 0.25;  // doubles per retry
  double backoff_ceiling_s = 4.0;
  double request_timeout_s = 60.0;
  std::string audit_log_path;    // append-only JSONL, empty = no audit
  std::string replay_path;       // non-empty: serve from this audit log

  // PLANLAB_LLM_URL / PLANLAB_LLM_KEY / PLANLAB_LLM_MODEL / PLANLAB_LLM_AUDIT
  static LlmConfig from_env();
};

class LlmError : public std::runtime_error {
 public:
  enum class Kind { transport, rate_limited, malformed };
  LlmError(Kind k, const std::string& msg);
  Kind kind;
};

class LlmClient {
 public:
  explicit LlmClient(LlmConfig cfg);
  ~LlmClient();

  // One chat round trip (with retries). Returns the assistant message text.
  std::string complete(const std::vector<Message>& messages);

  const LlmConfig& config() const { return cfg_; }

 private:
  LlmConfig cfg_;
  std::map<std::string, std::string> replay_;  // request hash -> content
  std::string host_;
  int port_ = 0;
  std::string path_;
  bool https_ = false;

  std::string post_once(const std::string& body, int& http_status);
  void audit(const std::string& request_hash, const std::string& body,
             int status, const std::string& response);
};

// The text between the first pair of ``` fences. Throws
// LlmError{malformed} when no complete fenced block exists.
std::string extract_fenced_block(const std::string& text);

// Stable hash of a request body (model+messages), hex string.
std::string request_hash(const std::string& body);

}  // namespace planlab::llm
