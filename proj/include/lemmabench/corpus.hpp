#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lemmabench/metadata.hpp"

namespace lemmabench {

struct Token {
  std::size_t index = 0;  // 1-based within the sentence
  std::string wordform;
  std::optional<std::string> lemma;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::string id;
  std::vector<Token> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  std::vector<std::string> wordforms() const;
  bool operator==(const Sentence&) const = default;
};

struct Corpus {
  std::string name;
  std::string language;  // ISO 639-1
  std::vector<Sentence> sentences;

  bool empty() const noexcept { return sentences.empty(); }
  const Sentence* find(std::string_view id) const;
  bool operator==(const Corpus&) const = default;
};

enum class SelectionRule { first_n, seeded_random };

std::string_view to_string(SelectionRule rule);
SelectionRule parse_selection_rule(std::string_view text);

struct SplitSpec {
  std::size_t train_count = 0;
  std::size_t dev_count = 0;
  std::size_t test_count = 0;
  SelectionRule rule = SelectionRule::first_n;
  std::uint64_t seed = 0;

  bool operator==(const SplitSpec&) const = default;
};

struct Splits {
  Corpus train;
  Corpus dev;
  Corpus test;
};

struct CorpusStats {
  std::size_t tokens = 0;
  std::size_t sentences = 0;

  bool operator==(const CorpusStats&) const = default;
};

/// Sentence ids are "<name>-<ordinal>" with a 1-based ordinal.
std::string sentence_id(std::string_view corpus_name, std::size_t ordinal);

// CoNLL-U: FORM and LEMMA columns only. Multiword-token ranges ("3-4") and
// empty nodes ("5.1") are skipped. Text is NFC-normalized.
Corpus parse_conllu(std::istream& in, const std::string& source, std::string name, std::string language);
Corpus ingest_conllu(const std::filesystem::path& path, std::string name, std::string language);

// Two-column TSV: wordform<TAB>lemma, blank line between sentences. An empty
// lemma field means the token is unannotated. Lines starting with "#" that
// contain no tab are comments.
Corpus parse_tsv(std::istream& in, const std::string& source, std::string name, std::string language);
Corpus ingest_tsv(const std::filesystem::path& path, std::string name, std::string language);

void write_tsv(const Corpus& corpus, std::ostream& out, const Metadata& meta = {});

/// First `max_sentences` (first_n) or a seeded sample kept in corpus order.
Corpus reduce(const Corpus& corpus, std::size_t max_sentences, SelectionRule rule, std::uint64_t seed);

Splits make_splits(const Corpus& corpus, const SplitSpec& spec);

CorpusStats corpus_stats(const Corpus& corpus);

/// Split manifest: which sentence ids went to which partition.
struct SplitManifest {
  std::string corpus;
  SplitSpec spec;
  std::vector<std::string> train_ids;
  std::vector<std::string> dev_ids;
  std::vector<std::string> test_ids;

  bool operator==(const SplitManifest&) const = default;
};

SplitManifest manifest_for(const Splits& splits, const std::string& corpus_name, const SplitSpec& spec);
void write_manifest(const SplitManifest& manifest, std::ostream& out, const Metadata& meta = {});
SplitManifest read_manifest(std::istream& in, const std::string& source);

/// Rebuild splits from a manifest against the full corpus.
Splits apply_manifest(const Corpus& corpus, const SplitManifest& manifest);

}  // namespace lemmabench
