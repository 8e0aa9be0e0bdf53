#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lemmabench/corpus.hpp"

namespace lemmabench {

enum class PromptTemplate { basic, full };
enum class InputMode { sentence_string, word_list };
enum class SelectionStrategy { manual, random, most_errors };

std::string_view to_string(PromptTemplate t);
std::string_view to_string(InputMode m);
std::string_view to_string(SelectionStrategy s);
PromptTemplate parse_template(std::string_view text);
InputMode parse_input_mode(std::string_view text);
SelectionStrategy parse_selection_strategy(std::string_view text);

/// Template id with version, e.g. "basic.v1".
std::string template_id(PromptTemplate t);
/// Raw template text with its {slots}.
std::string_view template_text(PromptTemplate t);

struct PromptSpec {
  PromptTemplate tmpl = PromptTemplate::basic;
  InputMode input_mode = InputMode::word_list;
  std::size_t k = 4;
  SelectionStrategy selection = SelectionStrategy::most_errors;
  std::uint64_t seed = 0;                 // random selection
  std::vector<std::string> manual_ids;    // manual selection
  std::string language_name = "English";  // English exonym of the target language

  void validate() const;
};

/// Best configuration from the prompt study: basic template, 4 shots,
/// word-list input, examples ranked by dev-run errors.
PromptSpec default_prompt_spec(std::string language_name);

struct FewShotExample {
  Sentence sentence;
  std::vector<std::pair<std::string, std::string>> gold_pairs;
};

FewShotExample make_example(const Sentence& sentence);

std::string render_prompt(const PromptSpec& spec, const std::vector<FewShotExample>& examples, const Sentence& target);

/// Python repr of a list of strings: ['a', "b'c"].
std::string python_list_repr(const std::vector<std::string>& words);

/// Per-sentence error totals from a prior dev run, keyed by sentence id.
using DevDiagnostics = std::map<std::string, std::size_t>;

std::vector<FewShotExample> select_examples(const PromptSpec& spec, const Corpus& pool,
                                            const DevDiagnostics* diagnostics = nullptr);

/// Manual example list: one sentence id per line, '#' starts a comment.
std::vector<std::string> read_id_list(std::string_view contents);

}  // namespace lemmabench
