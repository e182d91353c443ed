#include <chrono>
#include <cstdlib>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "sfnav/backends.hpp"
#include "sfnav/errors.hpp"

namespace sfnav {

LlmBackend::LlmBackend(LlmConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty())
    throw NavError(ErrorCode::config_error, "llm backend needs a base_url");
  if (config_.model.empty())
    throw NavError(ErrorCode::config_error, "llm backend needs a model id");
  if (config_.api_key_env.empty())
    throw NavError(ErrorCode::config_error,
                   "llm backend needs the name of a credential env var");
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (!key || !*key)
    throw NavError(ErrorCode::config_error,
                   "credential env var " + config_.api_key_env +
                       " is unset or empty");
  api_key_ = key;
}

BackendReply LlmBackend::respond(const PromptRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  body["max_tokens"] = config_.max_tokens;
  body["messages"] = nlohmann::ordered_json::array(
      {{{"role", "system"}, {"content", request.system}},
       {{"role", "user"}, {"content", request.user}}});

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_s, 0);
  client.set_read_timeout(config_.timeout_s, 0);
  client.set_bearer_token_auth(api_key_);

  const auto start = std::chrono::steady_clock::now();
  httplib::Result res =
      client.Post("/v1/chat/completions", body.dump(), "application/json");
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();

  if (!res)
    throw NavError(ErrorCode::backend_error,
                   "llm request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw NavError(ErrorCode::backend_error,
                   "llm endpoint returned status " +
                       std::to_string(res->status) + ": " + res->body);

  nlohmann::json payload = nlohmann::json::parse(res->body, nullptr, false);
  if (payload.is_discarded() || !payload.contains("choices") ||
      !payload["choices"].is_array() || payload["choices"].empty())
    throw NavError(ErrorCode::backend_error,
                   "llm endpoint returned an unexpected payload");

  BackendReply reply;
  try {
    reply.text =
        payload["choices"][0]["message"]["content"].get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw NavError(ErrorCode::backend_error,
                   "llm payload has no message content");
  }
  if (payload.contains("usage") && payload["usage"].is_object()) {
    const auto& usage = payload["usage"];
    if (usage.contains("prompt_tokens") &&
        usage["prompt_tokens"].is_number_integer())
      reply.usage.prompt_tokens = usage["prompt_tokens"].get<long long>();
    if (usage.contains("completion_tokens") &&
        usage["completion_tokens"].is_number_integer())
      reply.usage.completion_tokens =
          usage["completion_tokens"].get<long long>();
  }
  reply.duration_s = elapsed;
  return reply;
}

}  // namespace sfnav
