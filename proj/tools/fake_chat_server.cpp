// Local OpenAI-compatible endpoint backed by the deterministic fake responder.
// Used to record replay caches without third-party services.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fakellm/fake_llm.hpp"
#include "lemmabench/corpus.hpp"

using namespace lemmabench;

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fake OpenAI-compatible chat endpoint for lemmatization prompts"};
  std::vector<std::string> corpora;
  std::vector<std::string> model_rates;
  int port = 8765;
  double default_rate = 0.10;
  std::uint64_t seed = 0;
  std::size_t fail_first = 0;
  std::string key_env;
  app.add_option("--corpus", corpora, "gold corpus (.conllu or two-column .tsv) for the lexicon")->required();
  app.add_option("--port", port, "port on 127.0.0.1 (0 = any)")->capture_default_str();
  app.add_option("--error-rate", default_rate, "per-token noise rate")->capture_default_str();
  app.add_option("--model-error-rate", model_rates, "per-model noise rate, MODEL=RATE");
  app.add_option("--seed", seed, "noise seed")->capture_default_str();
  app.add_option("--fail-first", fail_first, "answer the first N requests with HTTP 503");
  app.add_option("--require-key-env", key_env, "require Bearer auth with the key in this variable");
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<Corpus> loaded;
    for (const auto& path : corpora) {
      const bool conllu = path.size() >= 7 && path.substr(path.size() - 7) == ".conllu";
      loaded.push_back(conllu ? ingest_conllu(path, "lexicon", "xx") : ingest_tsv(path, "lexicon", "xx"));
    }
    fake::ResponderOptions ro;
    ro.default_error_rate = default_rate;
    ro.seed = seed;
    for (const auto& spec : model_rates) {
      const auto eq = spec.rfind('=');
      if (eq == std::string::npos) throw std::runtime_error("--model-error-rate expects MODEL=RATE, got " + spec);
      ro.error_rate[spec.substr(0, eq)] = std::stod(spec.substr(eq + 1));
    }
    fake::Server::Options so;
    so.fail_first = fail_first;
    if (!key_env.empty()) {
      const char* key = std::getenv(key_env.c_str());
      if (!key || !*key) throw std::runtime_error("environment variable " + key_env + " is not set");
      so.required_key = key;
    }
    fake::Server server(std::make_shared<fake::Responder>(fake::build_lexicon(loaded), ro), so);
    server.start(port);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::printf("serving %s\n", server.base_url().c_str());
    std::fflush(stdout);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    std::printf("served %zu request(s)\n", server.requests());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
