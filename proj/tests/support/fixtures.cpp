#include "fixtures.hpp"

#include <atomic>
#include <random>

#include <unistd.h>

#include "lemmabench/text.hpp"

namespace fixtures {

namespace fs = std::filesystem;

fs::path source_dir() { return LEMMABENCH_SOURCE_DIR; }
fs::path data_dir() { return source_dir() / "data"; }

std::vector<FixtureCorpus> corpora() {
  const auto dir = data_dir() / "fixtures";
  return {{"es_synth", "es", dir / "es_synth.conllu"},
          {"en_synth", "en", dir / "en_synth.conllu"},
          {"eu_synth", "eu", dir / "eu_synth.conllu"}};
}

lemmabench::Corpus load(const FixtureCorpus& c) { return lemmabench::ingest_conllu(c.path, c.name, c.language); }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("lemmabench-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

lemmabench::Sentence sentence(const std::string& id, const std::vector<std::string>& items) {
  lemmabench::Sentence s;
  s.id = id;
  for (const auto& item : items) {
    const auto slash = item.rfind('/');
    lemmabench::Token t;
    t.index = s.tokens.size() + 1;
    if (slash == std::string::npos || slash == 0) {
      t.wordform = item;
      t.lemma = item;
    } else {
      t.wordform = item.substr(0, slash);
      if (slash + 1 < item.size()) t.lemma = item.substr(slash + 1);
    }
    s.tokens.push_back(std::move(t));
  }
  return s;
}

lemmabench::Sentence golden_gate() {
  return sentence("t-1", {"El", "Parque", "Golden", "Gate", "ofrece", "un", "jardín", "botánico", ",", "un",
                          "planetario", ",", "y", "un", "jardín", "japonés", "."});
}

lemmabench::Sentence venecia() {
  return sentence("t-2", {"El", "festival", "de", "Venecia", "cerró", "hoy", "con", "la", "entrega", "de", "los",
                          "premios", "que", "coronaron", "a", "el", "realizador", "Alexander", "Sokurov", "y", "a",
                          "el", "actor", "Michael", "Fassbender", "."});
}

lemmabench::Sentence tina() {
  return sentence("d-1", {"Tina/Tina", "Anselmi/Anselmi", "se/el", "ocupó/ocupar", "sobre/sobre", "todo/todo",
                          "de/de", "los/el", "derechos/derecho", "de/de", "los/el", "trabajadores/trabajador",
                          "textiles/textil", "y/y", "los/el", "profesores/profesor", "./."});
}

std::string golden_prompt(const std::string& name) {
  return lemmabench::text::read_file((source_dir() / "tests" / "golden" / "prompts" / name).string());
}

ScoredCase random_scored_case(std::mt19937_64& rng) {
  using namespace lemmabench;
  static const std::vector<std::string> lemmas{"ser", "casa", "el", "perro", "ir", "de", "."};
  ScoredCase c;
  c.gold.name = "g";
  c.gold.language = "es";
  const std::size_t n = 1 + rng() % 12;
  for (std::size_t s = 0; s < n; ++s) {
    Sentence sent;
    sent.id = "g-" + std::to_string(s);
    AlignedPrediction p;
    p.sentence_id = sent.id;
    std::vector<std::optional<std::string>> gl, pl;
    for (std::size_t t = 0, len = 1 + rng() % 8; t < len; ++t) {
      Token tok;
      tok.index = t + 1;
      tok.wordform = "w" + std::to_string(t);
      if (rng() % 10) tok.lemma = lemmas[rng() % lemmas.size()];
      std::optional<std::string> guess;
      switch (rng() % 6) {
        case 0: break;
        case 1: guess = lemmas[rng() % lemmas.size()]; break;
        default: guess = tok.lemma.value_or("x"); break;
      }
      gl.push_back(tok.lemma);
      pl.push_back(guess);
      p.lemmas.push_back(guess);
      p.match.push_back(guess ? TokenMatch::exact : TokenMatch::missing);
      if (!guess) ++p.missing_words;
      sent.tokens.push_back(std::move(tok));
    }
    c.gold.sentences.push_back(std::move(sent));
    c.predictions.push_back(std::move(p));
    c.gold_lemmas.push_back(std::move(gl));
    c.predicted_lemmas.push_back(std::move(pl));
  }
  return c;
}

}  // namespace fixtures
