#include "lemmabench/align.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "lemmabench/errors.hpp"
#include "lemmabench/text.hpp"
#include "lemmabench/unicode.hpp"

namespace lemmabench {

namespace {

bool is_quote(char32_t c) {
  switch (c) {
    case U'"': case U'\'': case U'`':
    case U'“': case U'”': case U'„':
    case U'‘': case U'’':
    case U'«': case U'»':
      return true;
    default:
      return false;
  }
}

// Quotes wrapped around a field; a bare quote token such as '"' or "''" is kept.
std::string strip_quotes(std::string_view field) {
  std::u32string s = unicode::decode(text::trim(field));
  while (s.size() >= 3 && is_quote(s.front()) && is_quote(s.back())) s = s.substr(1, s.size() - 2);
  return unicode::nfc(unicode::encode(s));
}

std::vector<std::string_view> split_on_spaces(std::string_view line, std::size_t min_run) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  std::size_t start = 0;
  while (i < line.size()) {
    if (line[i] == ' ') {
      std::size_t j = i;
      while (j < line.size() && line[j] == ' ') ++j;
      if (j - i >= min_run) {
        if (i > start) fields.push_back(line.substr(start, i - start));
        start = j;
      }
      i = j;
    } else {
      ++i;
    }
  }
  if (start < line.size()) fields.push_back(line.substr(start));
  return fields;
}

std::optional<OutputPair> parse_pair(std::string_view line) {
  if (line.find('\t') != std::string_view::npos) {
    auto cols = text::split(line, '\t');
    std::vector<std::string_view> fields;
    for (auto c : cols)
      if (!text::trim(c).empty()) fields.push_back(c);
    // "word<TAB>" keeps an empty lemma so the word still aligns.
    if (fields.size() == 1 && !text::trim(cols.front()).empty() && cols.size() == 2)
      return OutputPair{strip_quotes(cols.front()), ""};
    if (fields.size() != 2) return std::nullopt;
    return OutputPair{strip_quotes(fields[0]), strip_quotes(fields[1])};
  }
  for (std::size_t run : {2u, 1u}) {
    auto fields = split_on_spaces(line, run);
    if (fields.size() == 2) return OutputPair{strip_quotes(fields[0]), strip_quotes(fields[1])};
    if (run == 2 && fields.size() > 2) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

ParsedOutput parse_output(std::string_view raw) {
  ParsedOutput out;
  for (const auto& line : text::lines(raw)) {
    auto body = text::trim(line);
    if (body.empty()) continue;
    // Keep a trailing tab: "word<TAB>" is a word with an empty lemma.
    std::string_view spaced = line;
    while (!spaced.empty() && (spaced.front() == ' ' || spaced.front() == '\r')) spaced.remove_prefix(1);
    while (!spaced.empty() && (spaced.back() == ' ' || spaced.back() == '\r')) spaced.remove_suffix(1);
    auto pair = parse_pair(spaced.find('\t') != std::string_view::npos ? spaced : body);
    if (pair && !pair->wordform.empty()) {
      out.pairs.push_back(std::move(*pair));
    } else {
      out.unparsed.emplace_back(body);
    }
  }
  return out;
}

bool near_match(std::string_view output_word, std::string_view input_word) {
  if (output_word == input_word) return false;
  if (unicode::fold_case(output_word) == unicode::fold_case(input_word)) return true;
  const auto a = unicode::decode(output_word);
  const auto b = unicode::decode(input_word);
  const std::size_t diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  return diff <= 1 && unicode::edit_distance(a, b) == 1;
}

AlignedPrediction align(const ParsedOutput& output, const Sentence& input) {
  const std::size_t p = output.pairs.size(), q = input.tokens.size();
  constexpr int kExact = 2, kNear = 1, kGap = -1;
  constexpr int kNone = std::numeric_limits<int>::min() / 2;

  std::vector<TokenMatch> rel(p * q, TokenMatch::missing);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      const auto& o = output.pairs[i].wordform;
      const auto& w = input.tokens[j].wordform;
      rel[i * q + j] = o == w ? TokenMatch::exact : near_match(o, w) ? TokenMatch::near : TokenMatch::missing;
    }
  }
  auto diag_score = [&](std::size_t i, std::size_t j) {
    switch (rel[(i - 1) * q + (j - 1)]) {
      case TokenMatch::exact: return kExact;
      case TokenMatch::near: return kNear;
      default: return kNone;
    }
  };

  std::vector<int> score((p + 1) * (q + 1));
  auto at = [&](std::size_t i, std::size_t j) -> int& { return score[i * (q + 1) + j]; };
  for (std::size_t i = 0; i <= p; ++i) at(i, 0) = static_cast<int>(i) * kGap;
  for (std::size_t j = 0; j <= q; ++j) at(0, j) = static_cast<int>(j) * kGap;
  for (std::size_t i = 1; i <= p; ++i) {
    for (std::size_t j = 1; j <= q; ++j) {
      int best = std::max(at(i - 1, j) + kGap, at(i, j - 1) + kGap);
      const int d = diag_score(i, j);
      if (d != kNone) best = std::max(best, at(i - 1, j - 1) + d);
      at(i, j) = best;
    }
  }

  AlignedPrediction result;
  result.sentence_id = input.id;
  result.lemmas.assign(q, std::nullopt);
  result.match.assign(q, TokenMatch::missing);
  std::size_t unmatched_outputs = 0;
  std::size_t i = p, j = q;
  while (i > 0 || j > 0) {
    if (i > 0 && at(i, j) == at(i - 1, j) + kGap) {
      ++unmatched_outputs;
      --i;
    } else if (j > 0 && at(i, j) == at(i, j - 1) + kGap) {
      --j;
    } else {
      const TokenMatch m = rel[(i - 1) * q + (j - 1)];
      result.match[j - 1] = m;
      result.lemmas[j - 1] = output.pairs[i - 1].lemma;
      --i;
      --j;
    }
  }
  for (auto m : result.match) {
    if (m == TokenMatch::missing) ++result.missing_words;
    if (m == TokenMatch::near) ++result.wrong_words;
  }
  result.random_outputs = unmatched_outputs + output.unparsed.size();
  return result;
}

AlignedPrediction align_text(std::string_view raw, const Sentence& input) { return align(parse_output(raw), input); }

AlignedPrediction all_missing(const Sentence& input, std::string error) {
  AlignedPrediction r;
  r.sentence_id = input.id;
  r.lemmas.assign(input.tokens.size(), std::nullopt);
  r.match.assign(input.tokens.size(), TokenMatch::missing);
  r.missing_words = input.tokens.size();
  r.failed = true;
  r.error = std::move(error);
  return r;
}

AlignedPrediction from_lemmas(const Sentence& input, const std::vector<std::string>& lemmas) {
  if (lemmas.size() != input.tokens.size())
    throw Error("sentence " + input.id + ": " + std::to_string(lemmas.size()) + " lemma(s) for " +
                std::to_string(input.tokens.size()) + " token(s)");
  AlignedPrediction r;
  r.sentence_id = input.id;
  r.lemmas.assign(lemmas.begin(), lemmas.end());
  r.match.assign(lemmas.size(), TokenMatch::exact);
  return r;
}

std::size_t RunDiagnostics::total_missing() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.missing;
  return n;
}
std::size_t RunDiagnostics::total_wrong() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.wrong;
  return n;
}
std::size_t RunDiagnostics::total_random() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.random;
  return n;
}
std::size_t RunDiagnostics::total_incorrect() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.incorrect;
  return n;
}
std::size_t RunDiagnostics::failed_sentences() const {
  return static_cast<std::size_t>(std::count_if(sentences.begin(), sentences.end(), [](const auto& s) { return s.failed; }));
}

RunDiagnostics diagnose(const std::vector<AlignedPrediction>& predictions, const Corpus& gold) {
  std::unordered_map<std::string_view, const Sentence*> by_id;
  for (const auto& s : gold.sentences) by_id.emplace(s.id, &s);
  RunDiagnostics d;
  for (const auto& p : predictions) {
    SentenceDiagnostics s{p.sentence_id, p.missing_words, p.wrong_words, p.random_outputs, 0, p.failed, p.error};
    if (auto it = by_id.find(p.sentence_id); it != by_id.end()) {
      const auto& tokens = it->second->tokens;
      for (std::size_t k = 0; k < tokens.size() && k < p.lemmas.size(); ++k)
        if (p.lemmas[k] && (!tokens[k].lemma || *p.lemmas[k] != *tokens[k].lemma)) ++s.incorrect;
    }
    d.sentences.push_back(std::move(s));
  }
  return d;
}

std::string diagnostics_to_json(const RunDiagnostics& d) {
  nlohmann::ordered_json j;
  j["format"] = "lemmabench diagnostics v1";
  j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : d.meta) j["meta"][k] = v;
  j["totals"] = {{"missing", d.total_missing()},
                 {"wrong", d.total_wrong()},
                 {"random", d.total_random()},
                 {"incorrect", d.total_incorrect()},
                 {"failed_sentences", d.failed_sentences()}};
  j["sentences"] = nlohmann::ordered_json::array();
  for (const auto& s : d.sentences) {
    nlohmann::ordered_json e = {{"id", s.id},
                                {"missing", s.missing},
                                {"wrong", s.wrong},
                                {"random", s.random},
                                {"incorrect", s.incorrect},
                                {"failed", s.failed}};
    if (!s.error.empty()) e["error"] = s.error;
    j["sentences"].push_back(std::move(e));
  }
  j["issues"] = nlohmann::ordered_json::array();
  for (const auto& i : d.issues) j["issues"].push_back({{"line", i.line}, {"message", i.message}});
  return j.dump(2) + "\n";
}

RunDiagnostics diagnostics_from_json(std::string_view json, const std::string& source) {
  RunDiagnostics d;
  try {
    auto j = nlohmann::ordered_json::parse(json);
    if (j.value("format", "") != "lemmabench diagnostics v1") throw ParseError(source, 0, "not a v1 diagnostics file");
    for (const auto& [k, v] : j.at("meta").items()) d.meta.emplace_back(k, v.get<std::string>());
    for (const auto& e : j.at("sentences")) {
      SentenceDiagnostics s;
      s.id = e.at("id").get<std::string>();
      s.missing = e.at("missing").get<std::size_t>();
      s.wrong = e.at("wrong").get<std::size_t>();
      s.random = e.at("random").get<std::size_t>();
      s.incorrect = e.at("incorrect").get<std::size_t>();
      s.failed = e.at("failed").get<bool>();
      s.error = e.value("error", "");
      d.sentences.push_back(std::move(s));
    }
    for (const auto& e : j.at("issues"))
      d.issues.push_back({e.at("line").get<std::size_t>(), e.at("message").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, e.what());
  }
  return d;
}

void write_predictions(const std::vector<AlignedPrediction>& predictions, const Corpus& gold, const Metadata& meta,
                       std::ostream& out) {
  std::unordered_map<std::string_view, const Sentence*> by_id;
  for (const auto& s : gold.sentences) by_id.emplace(s.id, &s);
  out << "# lemmabench predictions v1\n";
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << '\n';
  for (const auto& p : predictions) {
    auto it = by_id.find(p.sentence_id);
    if (it == by_id.end()) throw Error("prediction for unknown sentence " + p.sentence_id);
    const auto& tokens = it->second->tokens;
    if (tokens.size() != p.lemmas.size()) throw Error("prediction length mismatch for " + p.sentence_id);
    out << "\n# sent_id = " << p.sentence_id << '\n';
    for (std::size_t k = 0; k < tokens.size(); ++k) out << tokens[k].wordform << '\t' << p.lemmas[k].value_or("") << '\n';
  }
}

PredictionFile read_prediction_file(std::istream& in, const std::string& source) {
  PredictionFile file;
  std::string line;
  std::size_t line_no = 0;
  bool in_header = true;
  PredictionBlock current;
  auto flush = [&] {
    if (!current.pairs.empty() || current.sent_id) file.blocks.push_back(std::move(current));
    current = PredictionBlock{};
  };
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (line_no == 1) text::strip_bom(line);
    if (line.empty()) {
      in_header = false;
      flush();
      continue;
    }
    if (line.front() == '#') {
      auto body = text::trim(std::string_view(line).substr(1));
      auto eq = body.find(" = ");
      if (eq == std::string_view::npos) continue;
      std::string key(text::trim(body.substr(0, eq)));
      std::string value(text::trim(body.substr(eq + 3)));
      if (key == "sent_id") {
        if (!current.pairs.empty()) flush();
        current.sent_id = value;
        current.first_line = line_no;
        in_header = false;
      } else if (in_header) {
        file.meta.emplace_back(std::move(key), std::move(value));
      }
      continue;
    }
    in_header = false;
    auto cols = text::split(line, '\t');
    if (cols.size() != 2 || cols[0].empty()) {
      file.issues.push_back({line_no, source + ":" + std::to_string(line_no) + ": expected wordform<TAB>lemma, skipped"});
      continue;
    }
    if (current.pairs.empty() && !current.sent_id) current.first_line = line_no;
    current.pairs.push_back({unicode::nfc(cols[0]), unicode::nfc(cols[1])});
  }
  flush();
  return file;
}

std::vector<AlignedPrediction> load_canonical_predictions(const PredictionFile& file, const Corpus& gold,
                                                          const std::string& source) {
  if (!file.issues.empty()) throw ParseError(source, file.issues.front().line, "malformed canonical prediction line");
  std::unordered_map<std::string_view, const Sentence*> by_id;
  for (const auto& s : gold.sentences) by_id.emplace(s.id, &s);
  std::vector<AlignedPrediction> out;
  for (const auto& b : file.blocks) {
    if (!b.sent_id) throw ParseError(source, b.first_line, "block without sent_id");
    auto it = by_id.find(*b.sent_id);
    if (it == by_id.end()) throw ParseError(source, b.first_line, "unknown sentence '" + *b.sent_id + "'");
    const auto& tokens = it->second->tokens;
    if (tokens.size() != b.pairs.size())
      throw ParseError(source, b.first_line, "sentence " + *b.sent_id + " has " + std::to_string(b.pairs.size()) +
                                                 " line(s) for " + std::to_string(tokens.size()) + " token(s)");
    AlignedPrediction p;
    p.sentence_id = *b.sent_id;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      if (b.pairs[k].wordform != tokens[k].wordform)
        throw ParseError(source, b.first_line, "wordform mismatch in " + *b.sent_id);
      if (b.pairs[k].lemma.empty()) {
        p.lemmas.emplace_back(std::nullopt);
        p.match.push_back(TokenMatch::missing);
        ++p.missing_words;
      } else {
        p.lemmas.emplace_back(b.pairs[k].lemma);
        p.match.push_back(TokenMatch::exact);
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<AlignedPrediction> import_external_predictions(const PredictionFile& file, const Corpus& gold,
                                                           std::vector<Issue>& issues) {
  issues.insert(issues.end(), file.issues.begin(), file.issues.end());
  const bool keyed = std::any_of(file.blocks.begin(), file.blocks.end(), [](const auto& b) { return b.sent_id.has_value(); });
  std::unordered_map<std::string_view, const PredictionBlock*> by_id;
  if (keyed) {
    for (const auto& b : file.blocks) {
      if (!b.sent_id) {
        issues.push_back({b.first_line, "block without sent_id in a keyed prediction file, skipped"});
        continue;
      }
      by_id.emplace(*b.sent_id, &b);
    }
  } else if (file.blocks.size() != gold.sentences.size()) {
    issues.push_back({0, "prediction file has " + std::to_string(file.blocks.size()) + " sentence(s), gold has " +
                             std::to_string(gold.sentences.size())});
  }

  std::vector<AlignedPrediction> out;
  for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
    const auto& s = gold.sentences[i];
    const PredictionBlock* block = nullptr;
    if (keyed) {
      if (auto it = by_id.find(s.id); it != by_id.end()) block = it->second;
    } else if (i < file.blocks.size()) {
      block = &file.blocks[i];
    }
    if (!block) {
      out.push_back(all_missing(s, "no predictions for this sentence"));
      continue;
    }
    ParsedOutput parsed{block->pairs, {}};
    out.push_back(align(parsed, s));
    // An empty lemma field marks a token the system left unlemmatized.
    auto& p = out.back();
    for (std::size_t k = 0; k < p.lemmas.size(); ++k) {
      if (p.lemmas[k] && p.lemmas[k]->empty()) {
        p.lemmas[k].reset();
        if (p.match[k] == TokenMatch::near) --p.wrong_words;
        p.match[k] = TokenMatch::missing;
        ++p.missing_words;
      }
    }
  }
  return out;
}

}  // namespace lemmabench
