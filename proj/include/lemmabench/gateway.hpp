#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lemmabench {

enum class CacheMode { live, record, replay };

std::string_view to_string(CacheMode mode);
CacheMode parse_cache_mode(std::string_view text);

struct ProviderConfig {
  std::string base_url;     // e.g. https://api.example.com/v1
  std::string model_id;
  std::string api_key_env;  // name of the environment variable; empty = no auth header
  nlohmann::json sampling = nlohmann::json::object();  // overrides; empty = provider defaults
  std::chrono::seconds timeout{120};
  int max_retries = 3;

  void validate() const;
};

enum class ResponseOrigin { live, cache };

struct LlmResponse {
  std::string raw_text;
  std::string request_fingerprint;
  std::chrono::milliseconds latency{0};
  ResponseOrigin origin = ResponseOrigin::live;
};

/// Hex SHA-256 over a canonical JSON encoding of (model_id, prompt,
/// run_index, sampling). Stable across processes and platforms.
std::string request_fingerprint(const ProviderConfig& config, std::string_view prompt, int run_index);

std::string sha256_hex(std::string_view data);

/// One chat-completion round trip. Throws TransportError.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ProviderConfig& config, const std::string& api_key, const std::string& prompt) = 0;
};

/// OpenAI-compatible POST {base_url}/chat/completions.
class HttpChatTransport final : public ChatTransport {
 public:
  std::string complete(const ProviderConfig& config, const std::string& api_key, const std::string& prompt) override;
};

nlohmann::json chat_request_body(const ProviderConfig& config, const std::string& prompt);
/// Extracts choices[0].message.content; throws TransportError on bad shape.
std::string chat_response_text(std::string_view body);

/// Cache directory layout (v1):
///   FORMAT              "lemmabench response cache v1"
///   index.tsv           fingerprint<TAB>model_id<TAB>run_index<TAB>record path, append-only
///   records/<fp>.txt    raw response text
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> lookup(const std::string& fingerprint) const;
  void store(const std::string& fingerprint, const std::string& model_id, int run_index, const std::string& text);
  std::size_t size() const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::filesystem::path> index_;
};

struct GatewayOptions {
  CacheMode mode = CacheMode::replay;
  std::filesystem::path cache_dir;
  std::chrono::milliseconds backoff_base{500};
};

struct BatchItem {
  std::size_t prompt_index = 0;
  int run_index = 0;
  std::optional<LlmResponse> response;
  std::string error;  // set when response is empty
  bool cache_miss = false;
};

struct BatchResult {
  std::vector<std::vector<BatchItem>> runs;  // runs[r][prompt_index]

  std::size_t failures() const;
};

/// live: always call the endpoint. record: serve cache hits, call and
/// persist on a miss. replay: cache only; a miss is a CacheMissError.
class LlmGateway {
 public:
  explicit LlmGateway(GatewayOptions options, std::shared_ptr<ChatTransport> transport = nullptr);

  LlmResponse complete(const ProviderConfig& config, const std::string& prompt, int run_index);

  /// Item failures are collected in the result, never thrown. At most
  /// `parallelism` requests are in flight at once; output keeps input order.
  BatchResult run_batch(const ProviderConfig& config, const std::vector<std::string>& prompts, int runs,
                        int parallelism);

  CacheMode mode() const noexcept { return options_.mode; }
  std::size_t live_calls() const noexcept { return live_calls_.load(); }
  std::size_t max_in_flight() const noexcept { return max_in_flight_.load(); }

 private:
  std::string call_with_retries(const ProviderConfig& config, const std::string& prompt);

  GatewayOptions options_;
  std::shared_ptr<ChatTransport> transport_;
  std::unique_ptr<ResponseCache> cache_;
  std::atomic<std::size_t> live_calls_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
};

}  // namespace lemmabench
