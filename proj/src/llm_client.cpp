#include "planlab/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "planlab/util.hpp"

namespace planlab::llm {

using nlohmann::json;

LlmError::LlmError(Kind k, const std::string& msg)
    : std::runtime_error(msg), kind(k) {}

LlmConfig LlmConfig::from_env() {
  LlmConfig cfg;
  if (const char* v = std::getenv("PLANLAB_LLM_URL")) cfg.endpoint_url = v;
  if (const char* v = std::getenv("PLANLAB_LLM_KEY")) cfg.api_key = v;
  if (const char* v = std::getenv("PLANLAB_LLM_MODEL")) cfg.model = v;
  if (const char* v = std::getenv("PLANLAB_LLM_AUDIT")) cfg.audit_log_path = v;
  return cfg;
}

namespace {

void parse_url(const std::string& url, bool& https, std::string& host,
               int& port, std::string& path) {
  std::string rest = url;
  https = false;
  if (rest.rfind("https://", 0) == 0) {
    https = true;
    rest = rest.substr(8);
  } else if (rest.rfind("http://", 0) == 0) {
    rest = rest.substr(7);
  }
  size_t slash = rest.find('/');
  std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
  path = slash == std::string::npos ? "/" : rest.substr(slash);
  size_t colon = hostport.find(':');
  if (colon == std::string::npos) {
    host = hostport;
    port = https ? 443 : 80;
  } else {
    host = hostport.substr(0, colon);
    port = std::stoi(hostport.substr(colon + 1));
  }
}

}  // namespace

std::string request_hash(const std::string& body) {
  return to_hex(fnv1a(body));
}

LlmClient::LlmClient(LlmConfig cfg) : cfg_(std::move(cfg)) {
  if (!cfg_.replay_path.empty()) {
    std::ifstream in(cfg_.replay_path);
    if (!in.good())
      throw LlmError(LlmError::Kind::transport,
                     "replay log not readable: " + cfg_.replay_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json entry = json::parse(line, nullptr, false);
      if (entry.is_discarded()) continue;
      if (entry.contains("request_hash") && entry.contains("response") &&
          entry.value("status", 0) == 200)
        replay_[entry["request_hash"]] = entry["response"];
    }
    return;
  }
  if (cfg_.endpoint_url.empty())
    throw LlmError(LlmError::Kind::transport,
                   "no endpoint configured (set PLANLAB_LLM_URL)");
  parse_url(cfg_.endpoint_url, https_, host_, port_, path_);
}

LlmClient::~LlmClient() = default;

std::string LlmClient::post_once(const std::string& body, int& http_status) {
  httplib::Client cli(host_, port_);
  cli.set_connection_timeout(std::chrono::milliseconds(
      (int64_t)(cfg_.request_timeout_s * 1000)));
  cli.set_read_timeout(
      std::chrono::milliseconds((int64_t)(cfg_.request_timeout_s * 1000)));
  httplib::Headers headers;
  if (!cfg_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + cfg_.api_key);
  auto res = cli.Post(path_, headers, body, "application/json");
  if (!res) {
    http_status = 0;
    return "";
  }
  http_status = res->status;
  return res->body;
}

void LlmClient::audit(const std::string& hash, const std::string& body,
                      int status, const std::string& response) {
  if (cfg_.audit_log_path.empty()) return;
  json entry = {
      {"ts", (int64_t)std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
                 .count()},
      {"request_hash", hash},
      {"request", body},
      {"status", status},
      {"response", response},
  };
  std::ofstream out(cfg_.audit_log_path, std::ios::app);
  out << entry.dump() << "\n";
}

std::string LlmClient::complete(const std::vector<Message>& messages) {
  json msgs = json::array();
  for (const auto& m : messages)
    msgs.push_back({{"role", m.role}, {"content", m.content}});
  json request = {
      {"model", cfg_.model},
      {"temperature", cfg_.temperature},
      {"messages", msgs},
  };
  std::string body = request.dump();
  std::string hash = request_hash(body);

  auto extract_content = [](const std::string& resp) {
    json parsed = json::parse(resp, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") ||
        parsed["choices"].empty() ||
        !parsed["choices"][0].contains("message") ||
        !parsed["choices"][0]["message"].contains("content"))
      throw LlmError(LlmError::Kind::malformed,
                     "response is not a chat completion: " + resp);
    return parsed["choices"][0]["message"]["content"].get<std::string>();
  };

  if (!cfg_.replay_path.empty()) {
    auto it = replay_.find(hash);
    if (it == replay_.end())
      throw LlmError(LlmError::Kind::transport,
                     "replay log has no entry for request " + hash);
    return extract_content(it->second);
  }

  double backoff = cfg_.backoff_base_s;
  int status = 0;
  std::string response;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    response = post_once(body, status);
    audit(hash, body, status, response);
    bool retryable = status == 0 || status == 429 || status >= 500;
    if (!retryable) break;
    if (attempt == cfg_.max_attempts) {
      if (status == 429)
        throw LlmError(LlmError::Kind::rate_limited,
                       "rate limited after " + std::to_string(attempt) +
                           " attempts");
      throw LlmError(LlmError::Kind::transport,
                     "transport failure (status " + std::to_string(status) +
                         ") after " + std::to_string(attempt) + " attempts");
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    backoff = std::min(backoff * 2.0, cfg_.backoff_ceiling_s);
  }
  if (status != 200)
    throw LlmError(LlmError::Kind::transport,
                   "endpoint returned status " + std::to_string(status));
  return extract_content(response);
}

std::string extract_fenced_block(const std::string& text) {
  size_t open = text.find("```");
  if (open == std::string::npos)
    throw LlmError(LlmError::Kind::malformed, "no fenced block in response");
  size_t body_start = text.find('\n', open);
  if (body_start == std::string::npos)
    throw LlmError(LlmError::Kind::malformed, "unterminated fence");
  ++body_start;
  size_t close = text.find("```", body_start);
  if (close == std::string::npos)
    throw LlmError(LlmError::Kind::malformed, "unterminated fenced block");
  return text.substr(body_start, close - body_start);
}

}  // namespace planlab::llm
