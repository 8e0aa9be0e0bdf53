#include "fake_llm.hpp"

#include <algorithm>
#include <random>

#include <httplib.h>
#include <json.hpp>

#include "lemmabench/errors.hpp"
#include "lemmabench/text.hpp"
#include "lemmabench/unicode.hpp"

namespace lemmabench::fake {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string lowercase(const std::string& w) {
  auto u = unicode::decode(w);
  for (auto& c : u) c = unicode::to_lower(c);
  return unicode::encode(u);
}

std::string swap_first_case(const std::string& w) {
  auto u = unicode::decode(w);
  if (u.empty()) return w;
  const char32_t lo = unicode::to_lower(u[0]);
  u[0] = lo == u[0] ? unicode::to_upper(u[0]) : lo;
  return unicode::encode(u);
}

// One-character edit that keeps the word recognisable (distance 1).
std::string typo(const std::string& w, std::mt19937_64& rng) {
  auto u = unicode::decode(w);
  if (u.size() < 2) return w + "x";
  std::uniform_int_distribution<std::size_t> pos(0, u.size() - 1);
  const std::size_t p = pos(rng);
  if (rng() % 2 == 0) u.erase(p, 1);
  else u.insert(u.begin() + static_cast<std::ptrdiff_t>(p), U'x');
  return unicode::encode(u);
}

std::string wrong_lemma(const std::string& word, const std::string& lemma, std::mt19937_64& rng) {
  auto u = unicode::decode(lemma);
  switch (rng() % 3) {
    case 0:
      if (word != lemma) return word;
      [[fallthrough]];
    case 1:
      if (u.size() > 3) {
        u.pop_back();
        return unicode::encode(u);
      }
      [[fallthrough]];
    default: return lemma + "r";
  }
}

}  // namespace

Lexicon build_lexicon(const std::vector<Corpus>& corpora) {
  std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> counts;
  for (const auto& corpus : corpora)
    for (const auto& s : corpus.sentences)
      for (const auto& t : s.tokens) {
        if (!t.lemma) continue;
        auto& v = counts[t.wordform];
        auto it = std::find_if(v.begin(), v.end(), [&](const auto& p) { return p.first == *t.lemma; });
        if (it == v.end()) v.emplace_back(*t.lemma, 1);
        else ++it->second;
      }
  Lexicon lex;
  for (const auto& [form, v] : counts) {
    const auto best = std::max_element(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    lex.emplace(form, best->first);
  }
  return lex;
}

std::vector<std::string> parse_python_list(const std::string& literal) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < literal.size() && (literal[i] == ' ' || literal[i] == ',')) ++i;
  };
  skip();
  if (i >= literal.size() || literal[i] != '[') throw Error("not a list literal");
  ++i;
  for (skip(); i < literal.size() && literal[i] != ']'; skip()) {
    const char quote = literal[i];
    if (quote != '\'' && quote != '"') throw Error("unquoted list element");
    std::string item;
    for (++i; i < literal.size() && literal[i] != quote; ++i) {
      if (literal[i] == '\\' && i + 1 < literal.size()) {
        const char e = literal[++i];
        item += e == 'n' ? '\n' : e == 't' ? '\t' : e == 'r' ? '\r' : e;
      } else {
        item += literal[i];
      }
    }
    if (i >= literal.size()) throw Error("unterminated string in list");
    ++i;
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<std::string> target_words(const std::string& prompt) {
  const auto lines = text::lines(prompt);
  for (std::size_t k = lines.size(); k-- > 0;) {
    const std::string line(text::trim(lines[k]));
    if (line == "Sentence:" && k + 1 < lines.size()) return parse_python_list(std::string(text::trim(lines[k + 1])));
    if (line.rfind("Sentence: \"", 0) == 0 && line.size() >= 12 && line.back() == '"') {
      std::vector<std::string> words;
      const std::string inner = line.substr(11, line.size() - 12);
      for (auto w : text::split(inner, ' '))
        if (!w.empty()) words.emplace_back(w);
      return words;
    }
  }
  throw Error("prompt has no target sentence");
}

Responder::Responder(Lexicon lexicon, ResponderOptions options)
    : lexicon_(std::move(lexicon)), options_(std::move(options)) {}

std::string Responder::respond(const std::string& model, const std::string& prompt) {
  std::uint64_t stream;
  {
    std::lock_guard lock(mutex_);
    stream = seen_[model + '\x1f' + prompt]++;
  }
  std::mt19937_64 rng(fnv1a(prompt, fnv1a(model, options_.seed)) ^ (stream * 0x9E3779B97F4A7C15ULL));
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  auto it = options_.error_rate.find(model);
  double rate = it == options_.error_rate.end() ? options_.default_error_rate : it->second;
  std::size_t shots = 0;
  for (std::size_t p = 0; (p = prompt.find("The desired output is:", p)) != std::string::npos; ++p) ++shots;
  rate *= 1.0 - 0.08 * static_cast<double>(std::min<std::size_t>(shots, 5));
  if (prompt.find("**Process Every Word**") != std::string::npos) rate *= 0.9;

  const auto words = target_words(prompt);
  std::vector<std::string> out;
  const bool fence = u01(rng) < rate / 4;
  if (u01(rng) < rate / 2) out.emplace_back("Here is the lemmatized output:");
  if (fence) out.emplace_back("```");
  for (const auto& word : words) {
    auto lex = lexicon_.find(word);
    std::string lemma = lex != lexicon_.end() ? lex->second : lowercase(word);
    std::string shown = word;
    if (u01(rng) < rate) {
      const double kind = u01(rng);
      if (kind < 0.45) {
        lemma = wrong_lemma(word, lemma, rng);
      } else if (kind < 0.60) {
        continue;  // dropped word
      } else if (kind < 0.75) {
        shown = rng() % 2 ? swap_first_case(word) : typo(word, rng);
      } else if (kind < 0.87) {
        out.push_back(word + "\t" + lemma);
        shown = "of";
        lemma = "of";
      } else {
        lemma = "\"" + lemma + "\"";
      }
    }
    out.push_back(shown + "\t" + lemma);
  }
  if (fence) out.emplace_back("```");
  return text::join(out, "\n");
}

Transport::Transport(std::shared_ptr<Responder> responder) : responder_(std::move(responder)) {}

std::string Transport::complete(const ProviderConfig& config, const std::string&, const std::string& prompt) {
  const std::size_t n = calls_++;
  if (before_call) before_call(n);
  return responder_->respond(config.model_id, prompt);
}

Server::Server(std::shared_ptr<Responder> responder, Options options)
    : responder_(std::move(responder)), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  server_->Post(options_.path_prefix + "/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    const std::size_t n = requests_++;
    if (n < options_.fail_first) {
      res.status = 503;
      res.set_content(R"({"error":{"message":"temporarily unavailable"}})", "application/json");
      return;
    }
    if (!options_.required_key.empty() && req.get_header_value("Authorization") != "Bearer " + options_.required_key) {
      res.status = 401;
      res.set_content(R"({"error":{"message":"invalid api key"}})", "application/json");
      return;
    }
    try {
      const auto body = nlohmann::json::parse(req.body);
      const std::string model = body.at("model").get<std::string>();
      const std::string prompt = body.at("messages").back().at("content").get<std::string>();
      const std::string content = responder_->respond(model, prompt);
      nlohmann::json reply = {{"object", "chat.completion"},
                              {"model", model},
                              {"choices", {{{"index", 0},
                                            {"finish_reason", "stop"},
                                            {"message", {{"role", "assistant"}, {"content", content}}}}}}};
      res.set_content(reply.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", {{"message", e.what()}}}}.dump(), "application/json");
    }
  });
}

Server::~Server() { stop(); }

int Server::start(int port) {
  port_ = port == 0 ? server_->bind_to_any_port("127.0.0.1") : (server_->bind_to_port("127.0.0.1", port) ? port : -1);
  if (port_ <= 0) throw Error("fake chat server: cannot bind 127.0.0.1:" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void Server::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void Server::wait() {
  if (thread_.joinable()) thread_.join();
}

std::string Server::base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + options_.path_prefix; }

}  // namespace lemmabench::fake
