#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lemmabench/corpus.hpp"
#include "lemmabench/metadata.hpp"

namespace lemmabench {

struct OutputPair {
  std::string wordform;
  std::string lemma;

  bool operator==(const OutputPair&) const = default;
};

/// Model output split into word-lemma pairs and lines that are not pairs
/// (prose, headers, fences). Unparsed lines count as random output.
struct ParsedOutput {
  std::vector<OutputPair> pairs;
  std::vector<std::string> unparsed;
};

/// Total parser. Accepts tab, runs of two or more spaces, or a single space
/// between exactly two fields; strips quotation marks wrapped around a field.
ParsedOutput parse_output(std::string_view raw);

enum class TokenMatch { exact, near, missing };

struct AlignedPrediction {
  std::string sentence_id;
  std::vector<std::optional<std::string>> lemmas;  // nullopt = MISSING
  std::vector<TokenMatch> match;                   // parallel to lemmas
  std::size_t missing_words = 0;
  std::size_t wrong_words = 0;     // output wordform near-matches the input word
  std::size_t random_outputs = 0;  // output lines matching no input token
  bool failed = false;             // no usable output (e.g. transport failure)
  std::string error;
};

/// Near match: equal up to case, or one code-point edit apart.
bool near_match(std::string_view output_word, std::string_view input_word);

/// Order-preserving global alignment of output pairs to input tokens.
/// Scores: exact +2, near +1, gap -1. On ties the traceback prefers gaps at
/// the end, which keeps matches as early as possible on both sides.
AlignedPrediction align(const ParsedOutput& output, const Sentence& input);
AlignedPrediction align_text(std::string_view raw, const Sentence& input);

/// Every token MISSING; used for sentences whose request failed.
AlignedPrediction all_missing(const Sentence& input, std::string error);

/// Predictions from a system that emits one lemma per token.
AlignedPrediction from_lemmas(const Sentence& input, const std::vector<std::string>& lemmas);

struct SentenceDiagnostics {
  std::string id;
  std::size_t missing = 0;
  std::size_t wrong = 0;
  std::size_t random = 0;
  std::size_t incorrect = 0;  // aligned tokens whose lemma differs from gold
  bool failed = false;
  std::string error;

  std::size_t total_errors() const noexcept { return missing + wrong + random + incorrect; }
};

struct Issue {
  std::size_t line = 0;
  std::string message;
};

struct RunDiagnostics {
  Metadata meta;
  std::vector<SentenceDiagnostics> sentences;
  std::vector<Issue> issues;

  std::size_t total_missing() const;
  std::size_t total_wrong() const;
  std::size_t total_random() const;
  std::size_t total_incorrect() const;
  std::size_t failed_sentences() const;
};

RunDiagnostics diagnose(const std::vector<AlignedPrediction>& predictions, const Corpus& gold);

std::string diagnostics_to_json(const RunDiagnostics& diagnostics);
RunDiagnostics diagnostics_from_json(std::string_view json, const std::string& source);

// Canonical prediction file: "# key = value" metadata lines, then per
// sentence a "# sent_id = <id>" line and wordform<TAB>lemma lines, blank
// line between sentences. MISSING is an empty lemma field.
void write_predictions(const std::vector<AlignedPrediction>& predictions, const Corpus& gold, const Metadata& meta,
                       std::ostream& out);

struct PredictionBlock {
  std::optional<std::string> sent_id;
  std::vector<OutputPair> pairs;
  std::size_t first_line = 0;
};

struct PredictionFile {
  Metadata meta;
  std::vector<PredictionBlock> blocks;
  std::vector<Issue> issues;  // malformed lines, skipped
};

PredictionFile read_prediction_file(std::istream& in, const std::string& source);

/// Predictions read back from a canonical file; blocks must line up with gold
/// token by token.
std::vector<AlignedPrediction> load_canonical_predictions(const PredictionFile& file, const Corpus& gold,
                                                          const std::string& source);

/// Predictions from another system's two-column file. Blocks are matched by
/// sent_id when present, else by position, and aligned against the gold
/// wordforms. Gold sentences without a block come back all-missing.
std::vector<AlignedPrediction> import_external_predictions(const PredictionFile& file, const Corpus& gold,
                                                           std::vector<Issue>& issues);

}  // namespace lemmabench
