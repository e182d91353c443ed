#include <algorithm>

#include <json.hpp>

#include "sfnav/backends.hpp"
#include "sfnav/errors.hpp"
#include "sfnav/report.hpp"

namespace sfnav {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  // Field separator: a byte that cannot appear in UTF-8 text.
  h ^= 0xff;
  h *= kFnvPrime;
}

}  // namespace

std::uint64_t request_hash(const PromptRequest& request) {
  // Attempt number is deliberately not hashed: the retry prompt already
  // differs (appended reminder), and identical requests must collide so the
  // replay queues can serve them in recorded order.
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, to_string(request.stage));
  fnv_mix(h, request.episode_id);
  fnv_mix(h, request.system);
  fnv_mix(h, request.user);
  return h;
}

std::vector<FixtureRecord> load_fixtures(const std::string& path) {
  nlohmann::json root =
      nlohmann::json::parse(read_text_file(path), nullptr, false);
  if (root.is_discarded() || !root.is_object() || !root.contains("records") ||
      !root["records"].is_array())
    throw NavError(ErrorCode::io_error,
                   "fixture file is not a record array: " + path);

  std::vector<FixtureRecord> out;
  for (const auto& node : root["records"]) {
    FixtureRecord rec;
    try {
      rec.key = node.at("key").get<std::uint64_t>();
      std::string stage = node.at("stage").get<std::string>();
      if (stage == "goal")
        rec.stage = PromptStage::goal;
      else if (stage == "policy")
        rec.stage = PromptStage::policy;
      else if (stage == "chain")
        rec.stage = PromptStage::chain;
      else
        throw NavError(ErrorCode::io_error,
                       "fixture has unknown stage \"" + stage + "\"");
      rec.episode_id = node.at("episode_id").get<std::string>();
      rec.reply_text = node.at("reply_text").get<std::string>();
      rec.usage.prompt_tokens = node.at("prompt_tokens").get<long long>();
      rec.usage.completion_tokens =
          node.at("completion_tokens").get<long long>();
      rec.duration_s = node.at("duration_s").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw NavError(ErrorCode::io_error,
                     "malformed fixture record in " + path + ": " + e.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void save_fixtures(const std::vector<FixtureRecord>& records,
                   const std::string& path) {
  nlohmann::ordered_json root;
  root["schema_version"] = 1;
  root["records"] = nlohmann::ordered_json::array();
  for (const FixtureRecord& rec : records) {
    nlohmann::ordered_json node;
    node["key"] = rec.key;
    node["stage"] = to_string(rec.stage);
    node["episode_id"] = rec.episode_id;
    node["reply_text"] = rec.reply_text;
    node["prompt_tokens"] = rec.usage.prompt_tokens;
    node["completion_tokens"] = rec.usage.completion_tokens;
    node["duration_s"] = rec.duration_s;
    root["records"].push_back(std::move(node));
  }
  write_text_file(path, root.dump(2) + "\n");
}

RecordingBackend::RecordingBackend(std::shared_ptr<PlannerBackend> inner)
    : inner_(std::move(inner)) {
  if (!inner_)
    throw NavError(ErrorCode::config_error,
                   "recording backend needs an inner backend");
}

BackendReply RecordingBackend::respond(const PromptRequest& request) {
  BackendReply reply = inner_->respond(request);
  FixtureRecord rec;
  rec.key = request_hash(request);
  rec.stage = request.stage;
  rec.episode_id = request.episode_id;
  rec.reply_text = reply.text;
  rec.usage = reply.usage;
  rec.duration_s = reply.duration_s;
  records_.push_back(std::move(rec));
  return reply;
}

ReplayBackend::ReplayBackend(std::vector<FixtureRecord> records)
    : records_(std::move(records)) {
  for (const FixtureRecord& rec : records_) {
    queues_[rec.key].push_back(&rec);
  }
}

BackendReply ReplayBackend::respond(const PromptRequest& request) {
  const std::uint64_t key = request_hash(request);
  auto it = queues_.find(key);
  std::size_t& cursor = cursors_[key];
  if (it == queues_.end() || cursor >= it->second.size()) {
    throw NavError(ErrorCode::replay_miss,
                   "no recorded reply for " +
                       std::string(to_string(request.stage)) +
                       " request of episode \"" + request.episode_id +
                       "\" (attempt " + std::to_string(request.attempt) + ")");
  }
  const FixtureRecord& rec = *it->second[cursor];
  ++cursor;
  BackendReply reply;
  reply.text = rec.reply_text;
  reply.usage = rec.usage;
  reply.duration_s = rec.duration_s;
  return reply;
}

}  // namespace sfnav
