#include "lemmabench/prompt.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "lemmabench/errors.hpp"
#include "lemmabench/sampling.hpp"
#include "lemmabench/text.hpp"

namespace lemmabench {

namespace detail {
std::string_view basic_template_v1();
std::string_view full_template_v1();
}  // namespace detail

std::string_view to_string(PromptTemplate t) { return t == PromptTemplate::basic ? "basic" : "full"; }

std::string_view to_string(InputMode m) {
  return m == InputMode::sentence_string ? "sentence-string" : "word-list";
}

std::string_view to_string(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::manual: return "manual";
    case SelectionStrategy::random: return "random";
    case SelectionStrategy::most_errors: return "most-errors";
  }
  return "most-errors";
}

PromptTemplate parse_template(std::string_view text) {
  if (text == "basic") return PromptTemplate::basic;
  if (text == "full") return PromptTemplate::full;
  throw ConfigError("unknown prompt template '" + std::string(text) + "' (expected basic or full)");
}

InputMode parse_input_mode(std::string_view text) {
  if (text == "sentence-string") return InputMode::sentence_string;
  if (text == "word-list") return InputMode::word_list;
  throw ConfigError("unknown input mode '" + std::string(text) + "' (expected sentence-string or word-list)");
}

SelectionStrategy parse_selection_strategy(std::string_view text) {
  if (text == "manual") return SelectionStrategy::manual;
  if (text == "random") return SelectionStrategy::random;
  if (text == "most-errors") return SelectionStrategy::most_errors;
  throw ConfigError("unknown example selection '" + std::string(text) + "' (expected manual, random or most-errors)");
}

std::string template_id(PromptTemplate t) { return std::string(to_string(t)) + ".v1"; }

std::string_view template_text(PromptTemplate t) {
  return t == PromptTemplate::basic ? detail::basic_template_v1() : detail::full_template_v1();
}

void PromptSpec::validate() const {
  if (k > 5) throw ConfigError("shot count k must be in [0, 5], got " + std::to_string(k));
  if (language_name.empty()) throw ConfigError("prompt language name is empty");
  if (k > 0 && selection == SelectionStrategy::manual && manual_ids.size() < k)
    throw ConfigError("manual example list has " + std::to_string(manual_ids.size()) + " id(s), k = " +
                      std::to_string(k));
}

PromptSpec default_prompt_spec(std::string language_name) {
  PromptSpec spec;
  spec.language_name = std::move(language_name);
  return spec;
}

FewShotExample make_example(const Sentence& sentence) {
  FewShotExample ex{sentence, {}};
  for (const auto& t : sentence.tokens) {
    if (!t.lemma) throw Error("example sentence " + sentence.id + " has an unannotated token '" + t.wordform + "'");
    ex.gold_pairs.emplace_back(t.wordform, *t.lemma);
  }
  return ex;
}

std::string python_list_repr(const std::vector<std::string>& words) {
  std::string out = "[";
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ", ";
    const std::string& w = words[i];
    const char quote = (w.find('\'') != std::string::npos && w.find('"') == std::string::npos) ? '"' : '\'';
    out += quote;
    for (char c : w) {
      if (c == '\\') out += "\\\\";
      else if (c == quote) out += std::string("\\") + quote;
      else if (c == '\n') out += "\\n";
      else if (c == '\r') out += "\\r";
      else if (c == '\t') out += "\\t";
      else out += c;
    }
    out += quote;
  }
  out += "]";
  return out;
}

namespace {

constexpr std::string_view kExampleIntro = "For example, for the sentence:";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
}

std::vector<std::string> example_lines(const std::vector<FewShotExample>& examples) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (i > 0) lines.emplace_back(kExampleIntro);
    for (const auto& [word, lemma] : examples[i].gold_pairs) lines.push_back(word);
    lines.emplace_back("The desired output is:");
    for (const auto& [word, lemma] : examples[i].gold_pairs) lines.push_back(word + "\t" + lemma);
  }
  return lines;
}

std::vector<std::string> target_lines(InputMode mode, const Sentence& target) {
  const auto words = target.wordforms();
  if (mode == InputMode::sentence_string) return {"Sentence: \"" + text::join(words, " ") + "\""};
  return {"Sentence:", python_list_repr(words)};
}

}  // namespace

std::string render_prompt(const PromptSpec& spec, const std::vector<FewShotExample>& examples, const Sentence& target) {
  spec.validate();
  if (examples.size() != spec.k)
    throw ConfigError("prompt expects " + std::to_string(spec.k) + " example(s), got " +
                      std::to_string(examples.size()));
  if (target.tokens.empty()) throw Error("cannot render a prompt for empty sentence " + target.id);

  std::vector<std::string> out;
  for (auto line : text::lines(template_text(spec.tmpl))) {
    if (line == "{examples}") {
      auto block = example_lines(examples);
      out.insert(out.end(), block.begin(), block.end());
    } else if (line == "{target}") {
      auto block = target_lines(spec.input_mode, target);
      out.insert(out.end(), block.begin(), block.end());
    } else {
      replace_all(line, "{example_intro}", examples.empty() ? std::string() : " " + std::string(kExampleIntro));
      replace_all(line, "{language}", spec.language_name);
      out.push_back(std::move(line));
    }
  }
  return text::join(out, "\n");
}

std::vector<FewShotExample> select_examples(const PromptSpec& spec, const Corpus& pool,
                                            const DevDiagnostics* diagnostics) {
  if (spec.k == 0) return {};
  if (spec.k > pool.sentences.size())
    throw ConfigError("cannot select " + std::to_string(spec.k) + " examples from a pool of " +
                      std::to_string(pool.sentences.size()) + " sentence(s)");

  std::vector<std::size_t> chosen;
  switch (spec.selection) {
    case SelectionStrategy::manual: {
      std::unordered_map<std::string_view, std::size_t> by_id;
      for (std::size_t i = 0; i < pool.sentences.size(); ++i) by_id.emplace(pool.sentences[i].id, i);
      if (spec.manual_ids.size() < spec.k)
        throw ConfigError("manual example list has fewer than " + std::to_string(spec.k) + " ids");
      for (std::size_t i = 0; i < spec.k; ++i) {
        auto it = by_id.find(spec.manual_ids[i]);
        if (it == by_id.end()) throw ConfigError("manual example id '" + spec.manual_ids[i] + "' is not in the pool");
        chosen.push_back(it->second);
      }
      break;
    }
    case SelectionStrategy::random:
      chosen = seeded_sample(pool.sentences.size(), spec.k, spec.seed);
      break;
    case SelectionStrategy::most_errors: {
      if (!diagnostics) throw ConfigError("most-errors example selection needs diagnostics from a prior dev run");
      std::vector<std::size_t> errors(pool.sentences.size());
      for (std::size_t i = 0; i < pool.sentences.size(); ++i) {
        auto it = diagnostics->find(pool.sentences[i].id);
        if (it == diagnostics->end())
          throw ConfigError("dev diagnostics do not cover pool sentence '" + pool.sentences[i].id + "'");
        errors[i] = it->second;
      }
      std::vector<std::size_t> order(pool.sentences.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return errors[a] > errors[b]; });
      chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.k));
      break;
    }
  }
  std::vector<FewShotExample> out;
  for (std::size_t i : chosen) out.push_back(make_example(pool.sentences[i]));
  return out;
}

std::vector<std::string> read_id_list(std::string_view contents) {
  std::vector<std::string> ids;
  for (const auto& line : text::lines(contents)) {
    auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
    if (!body.empty()) ids.emplace_back(body);
  }
  return ids;
}

}  // namespace lemmabench
