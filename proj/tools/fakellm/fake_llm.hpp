#pragma once

// Deterministic stand-in for an OpenAI-compatible chat endpoint. It reads the
// target sentence out of a lemmatization prompt, answers from a gold lexicon
// and injects reproducible noise (wrong lemmas, dropped and mutated words,
// chatter lines, code fences) so that the alignment and scoring paths see
// realistic model output.

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "lemmabench/corpus.hpp"
#include "lemmabench/gateway.hpp"

namespace httplib {
class Server;
}

namespace lemmabench::fake {

using Lexicon = std::map<std::string, std::string>;  // wordform -> lemma

/// Most frequent gold lemma per wordform; ties go to the first seen.
Lexicon build_lexicon(const std::vector<Corpus>& corpora);

/// Words of the target sentence: the last "Sentence:" block of the prompt,
/// either a Python list literal or a quoted space-separated string.
std::vector<std::string> target_words(const std::string& prompt);

/// Inverse of python_list_repr.
std::vector<std::string> parse_python_list(const std::string& literal);

struct ResponderOptions {
  double default_error_rate = 0.10;
  std::map<std::string, double> error_rate;  // per model id
  std::uint64_t seed = 0;
};

class Responder {
 public:
  Responder(Lexicon lexicon, ResponderOptions options);

  /// The n-th request with identical (model, prompt) uses noise stream n, so
  /// repeated runs differ while a serial replay of the same request order is
  /// reproducible.
  std::string respond(const std::string& model, const std::string& prompt);

 private:
  Lexicon lexicon_;
  ResponderOptions options_;
  std::mutex mutex_;
  std::map<std::string, std::uint64_t> seen_;
};

/// In-process transport with a call counter and optional scripted failures.
class Transport final : public ChatTransport {
 public:
  explicit Transport(std::shared_ptr<Responder> responder);

  std::string complete(const ProviderConfig& config, const std::string& api_key, const std::string& prompt) override;

  std::size_t calls() const noexcept { return calls_.load(); }
  /// Called before each request with the 0-based call number; may throw.
  std::function<void(std::size_t)> before_call;

 private:
  std::shared_ptr<Responder> responder_;
  std::atomic<std::size_t> calls_{0};
};

/// HTTP server on 127.0.0.1 serving POST <prefix>/chat/completions.
class Server {
 public:
  struct Options {
    std::string path_prefix = "/v1";
    std::string required_key;    // empty: no auth check
    std::size_t fail_first = 0;  // answer the first N requests with HTTP 503
  };

  Server(std::shared_ptr<Responder> responder, Options options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds (port 0 = any free port) and serves on a background thread.
  int start(int port = 0);
  void stop();
  /// Blocks until stop() is called from elsewhere.
  void wait();

  std::string base_url() const;
  std::size_t requests() const noexcept { return requests_.load(); }

 private:
  std::shared_ptr<Responder> responder_;
  Options options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace lemmabench::fake
