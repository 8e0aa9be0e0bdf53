#include "lemmabench/gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <httplib.h>

#include "lemmabench/errors.hpp"
#include "lemmabench/text.hpp"

namespace lemmabench {

std::string_view to_string(CacheMode mode) {
  switch (mode) {
    case CacheMode::live: return "live";
    case CacheMode::record: return "record";
    case CacheMode::replay: return "replay";
  }
  return "replay";
}

CacheMode parse_cache_mode(std::string_view text) {
  if (text == "live") return CacheMode::live;
  if (text == "record") return CacheMode::record;
  if (text == "replay") return CacheMode::replay;
  throw ConfigError("unknown cache mode '" + std::string(text) + "' (expected live, record or replay)");
}

void ProviderConfig::validate() const {
  if (model_id.empty()) throw ConfigError("provider model_id is empty");
  if (max_retries < 0) throw ConfigError("provider max_retries must be >= 0");
  if (!sampling.is_object()) throw ConfigError("provider sampling overrides must be a JSON object");
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string request_fingerprint(const ProviderConfig& config, std::string_view prompt, int run_index) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  nlohmann::json key = nlohmann::json::array(
      {"lemmabench-request-v1", config.model_id, std::string(prompt), run_index, config.sampling});
  return sha256_hex(key.dump());
}

nlohmann::json chat_request_body(const ProviderConfig& config, const std::string& prompt) {
  nlohmann::json body = {{"model", config.model_id},
                         {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  for (const auto& [k, v] : config.sampling.items()) body[k] = v;
  return body;
}

std::string chat_response_text(std::string_view body) {
  try {
    auto j = nlohmann::json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_null()) return {};
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("unexpected chat-completion response: ") + e.what(), false);
  }
}

namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

ParsedUrl parse_base_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.scheme_host_port = url.substr(0, path_start);
  out.path_prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

}  // namespace

std::string HttpChatTransport::complete(const ProviderConfig& config, const std::string& api_key,
                                        const std::string& prompt) {
  const auto url = parse_base_url(config.base_url);
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(config.timeout);
  client.set_read_timeout(config.timeout);
  client.set_write_timeout(config.timeout);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
  auto res = client.Post(url.path_prefix + "/chat/completions", headers, chat_request_body(config, prompt).dump(),
                         "application/json");
  if (!res) throw TransportError("request to " + config.base_url + " failed: " + httplib::to_string(res.error()), true);
  if (res->status != 200) {
    const bool retryable = res->status == 429 || res->status >= 500;
    throw TransportError("HTTP " + std::to_string(res->status) + " from " + config.base_url + ": " +
                             res->body.substr(0, 300),
                         retryable);
  }
  return chat_response_text(res->body);
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  const auto index_path = dir_ / "index.tsv";
  if (!std::filesystem::exists(index_path)) return;
  std::ifstream in(index_path, std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 4) throw ParseError(index_path.string(), line_no, "expected 4 fields");
    index_.emplace(std::string(cols[0]), dir_ / std::string(cols[3]));
  }
}

std::optional<std::string> ResponseCache::lookup(const std::string& fingerprint) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(fingerprint);
  if (it == index_.end()) return std::nullopt;
  return text::read_file(it->second.string());
}

void ResponseCache::store(const std::string& fingerprint, const std::string& model_id, int run_index,
                          const std::string& response) {
  std::unique_lock lock(mutex_);
  if (index_.contains(fingerprint)) return;
  namespace fs = std::filesystem;
  fs::create_directories(dir_ / "records");
  const auto format_path = dir_ / "FORMAT";
  if (!fs::exists(format_path)) text::write_file(format_path.string(), "lemmabench response cache v1\n");
  const std::string rel = "records/" + fingerprint + ".txt";
  text::write_file((dir_ / rel).string(), response);
  const auto index_path = dir_ / "index.tsv";
  const bool fresh = !fs::exists(index_path);
  std::ofstream out(index_path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot append to " + index_path.string());
  if (fresh) out << "# fingerprint\tmodel_id\trun_index\trecord\n";
  out << fingerprint << '\t' << model_id << '\t' << run_index << '\t' << rel << '\n';
  out.flush();
  index_.emplace(fingerprint, dir_ / rel);
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mutex_);
  return index_.size();
}

std::size_t BatchResult::failures() const {
  std::size_t n = 0;
  for (const auto& run : runs)
    for (const auto& item : run)
      if (!item.response) ++n;
  return n;
}

LlmGateway::LlmGateway(GatewayOptions options, std::shared_ptr<ChatTransport> transport)
    : options_(std::move(options)), transport_(std::move(transport)) {
  if (!transport_) transport_ = std::make_shared<HttpChatTransport>();
  if (options_.mode != CacheMode::live) {
    if (options_.cache_dir.empty()) throw ConfigError("cache mode '" + std::string(to_string(options_.mode)) +
                                                      "' needs a cache directory");
    if (options_.mode == CacheMode::replay && !std::filesystem::exists(options_.cache_dir))
      throw ConfigError("replay cache directory does not exist: " + options_.cache_dir.string());
    cache_ = std::make_unique<ResponseCache>(options_.cache_dir);
  }
}

std::string LlmGateway::call_with_retries(const ProviderConfig& config, const std::string& prompt) {
  std::string api_key;
  if (!config.api_key_env.empty()) {
    const char* value = std::getenv(config.api_key_env.c_str());
    if (!value || !*value) throw ConfigError("environment variable " + config.api_key_env + " is not set");
    api_key = value;
  }
  thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
  for (int attempt = 0;; ++attempt) {
    try {
      ++live_calls_;
      return transport_->complete(config, api_key, prompt);
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= config.max_retries) throw;
      const double jitter = std::uniform_real_distribution<double>(0.0, 1.0)(jitter_rng);
      const auto delay = options_.backoff_base * (1LL << std::min(attempt, 16));
      std::this_thread::sleep_for(std::chrono::duration_cast<std::chrono::milliseconds>(delay * (1.0 + jitter)));
    }
  }
}

LlmResponse LlmGateway::complete(const ProviderConfig& config, const std::string& prompt, int run_index) {
  config.validate();
  LlmResponse r;
  r.request_fingerprint = request_fingerprint(config, prompt, run_index);
  if (cache_) {
    if (auto hit = cache_->lookup(r.request_fingerprint)) {
      r.raw_text = std::move(*hit);
      r.origin = ResponseOrigin::cache;
      return r;
    }
    if (options_.mode == CacheMode::replay)
      throw CacheMissError("no cached response for fingerprint " + r.request_fingerprint + " (model " +
                           config.model_id + ", run " + std::to_string(run_index) + ")");
  }
  const auto start = std::chrono::steady_clock::now();
  r.raw_text = call_with_retries(config, prompt);
  r.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  r.origin = ResponseOrigin::live;
  if (cache_) cache_->store(r.request_fingerprint, config.model_id, run_index, r.raw_text);
  return r;
}

BatchResult LlmGateway::run_batch(const ProviderConfig& config, const std::vector<std::string>& prompts, int runs,
                                  int parallelism) {
  if (runs < 1) throw ConfigError("run_batch needs runs >= 1");
  const std::size_t workers = static_cast<std::size_t>(std::max(1, parallelism));
  BatchResult result;
  result.runs.resize(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) {
    auto& items = result.runs[static_cast<std::size_t>(r)];
    items.resize(prompts.size());
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      items[i].prompt_index = i;
      items[i].run_index = r;
    }
  }
  const std::size_t total = prompts.size() * static_cast<std::size_t>(runs);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t n; (n = next.fetch_add(1)) < total;) {
      const std::size_t r = n / prompts.size(), i = n % prompts.size();
      auto& item = result.runs[r][i];
      const std::size_t now = ++in_flight_;
      for (std::size_t seen = max_in_flight_.load(); now > seen && !max_in_flight_.compare_exchange_weak(seen, now);) {
      }
      try {
        item.response = complete(config, prompts[i], static_cast<int>(r));
      } catch (const CacheMissError& e) {
        item.error = e.what();
        item.cache_miss = true;
      } catch (const std::exception& e) {
        item.error = e.what();
      }
      --in_flight_;
    }
  };
  if (total == 0) return result;
  std::vector<std::thread> pool;
  const std::size_t count = std::min(workers, total);
  pool.reserve(count);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return result;
}

}  // namespace lemmabench
