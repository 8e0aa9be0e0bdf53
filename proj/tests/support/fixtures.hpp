#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lemmabench/align.hpp"
#include "lemmabench/corpus.hpp"

namespace fixtures {

std::filesystem::path source_dir();
std::filesystem::path data_dir();

struct FixtureCorpus {
  std::string name;
  std::string language;
  std::filesystem::path path;
};
/// The shipped synthetic CoNLL-U corpora.
std::vector<FixtureCorpus> corpora();
lemmabench::Corpus load(const FixtureCorpus& c);

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Builds a sentence from "word/lemma" items; "word/" leaves the lemma absent.
lemmabench::Sentence sentence(const std::string& id, const std::vector<std::string>& items);

// Sentences of the golden prompt files.
lemmabench::Sentence golden_gate();
lemmabench::Sentence venecia();
lemmabench::Sentence tina();
std::string golden_prompt(const std::string& name);

/// Random gold corpus (some tokens unannotated) with predictions that are
/// right, wrong or missing per token, in both library and plain form.
struct ScoredCase {
  lemmabench::Corpus gold;
  std::vector<lemmabench::AlignedPrediction> predictions;
  std::vector<std::vector<std::optional<std::string>>> gold_lemmas, predicted_lemmas;
};
ScoredCase random_scored_case(std::mt19937_64& rng);

}  // namespace fixtures
