#include "lemmabench/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "lemmabench/errors.hpp"
#include "lemmabench/sampling.hpp"
#include "lemmabench/text.hpp"
#include "lemmabench/unicode.hpp"

namespace lemmabench {

std::vector<std::string> Sentence::wordforms() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.wordform);
  return out;
}

const Sentence* Corpus::find(std::string_view id) const {
  auto it = std::find_if(sentences.begin(), sentences.end(), [&](const Sentence& s) { return s.id == id; });
  return it == sentences.end() ? nullptr : &*it;
}

std::string_view to_string(SelectionRule rule) {
  return rule == SelectionRule::first_n ? "first-n" : "seeded-random";
}

SelectionRule parse_selection_rule(std::string_view text) {
  if (text == "first-n") return SelectionRule::first_n;
  if (text == "seeded-random") return SelectionRule::seeded_random;
  throw ConfigError("unknown selection rule '" + std::string(text) + "' (expected first-n or seeded-random)");
}

std::string sentence_id(std::string_view corpus_name, std::size_t ordinal) {
  return std::string(corpus_name) + "-" + std::to_string(ordinal);
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

class SentenceBuilder {
 public:
  SentenceBuilder(Corpus& corpus, const std::string& source) : corpus_(corpus), source_(source) {}

  void add(std::size_t line_no, std::size_t index, std::string_view form, std::optional<std::string> lemma) {
    if (form.empty()) throw ParseError(source_, line_no, "empty wordform");
    if (index != tokens_.size() + 1)
      throw ParseError(source_, line_no,
                       "token index " + std::to_string(index) + " breaks the 1..n sequence (expected " +
                           std::to_string(tokens_.size() + 1) + ")");
    if (lemma) lemma = unicode::nfc(*lemma);
    tokens_.push_back(Token{index, unicode::nfc(form), std::move(lemma)});
  }

  std::size_t pending() const { return tokens_.size(); }

  void flush() {
    if (tokens_.empty()) return;
    Sentence s;
    s.id = sentence_id(corpus_.name, corpus_.sentences.size() + 1);
    s.tokens = std::move(tokens_);
    tokens_.clear();
    corpus_.sentences.push_back(std::move(s));
  }

 private:
  Corpus& corpus_;
  const std::string& source_;
  std::vector<Token> tokens_;
};

}  // namespace

Corpus parse_conllu(std::istream& in, const std::string& source, std::string name, std::string language) {
  Corpus corpus{std::move(name), std::move(language), {}};
  SentenceBuilder builder(corpus, source);
  std::string line;
  std::size_t line_no = 0;
  bool saw_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (line_no == 1) text::strip_bom(line);
    if (text::trim(line).empty()) {
      builder.flush();
      continue;
    }
    saw_content = true;
    if (line.front() == '#') continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 10)
      throw ParseError(source, line_no, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) continue;
    if (!is_digits(id)) throw ParseError(source, line_no, "invalid token id '" + std::string(id) + "'");
    std::optional<std::string> lemma;
    // "_" is the CoNLL-U placeholder, except for the underscore token itself.
    if (!cols[2].empty() && (cols[2] != "_" || cols[1] == "_")) lemma = std::string(cols[2]);
    builder.add(line_no, std::stoul(std::string(id)), cols[1], std::move(lemma));
  }
  builder.flush();
  if (!saw_content || corpus.sentences.empty()) throw ParseError(source, 0, "empty corpus");
  return corpus;
}

Corpus ingest_conllu(const std::filesystem::path& path, std::string name, std::string language) {
  auto in = open_input(path);
  return parse_conllu(in, path.string(), std::move(name), std::move(language));
}

Corpus parse_tsv(std::istream& in, const std::string& source, std::string name, std::string language) {
  Corpus corpus{std::move(name), std::move(language), {}};
  SentenceBuilder builder(corpus, source);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (line_no == 1) text::strip_bom(line);
    if (line.empty()) {
      builder.flush();
      continue;
    }
    if (line.front() == '#' && line.find('\t') == std::string::npos) continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 2)
      throw ParseError(source, line_no, "expected wordform<TAB>lemma, found " + std::to_string(cols.size()) + " field(s)");
    std::optional<std::string> lemma;
    if (!cols[1].empty()) lemma = std::string(cols[1]);
    builder.add(line_no, builder.pending() + 1, cols[0], std::move(lemma));
  }
  builder.flush();
  if (corpus.sentences.empty()) throw ParseError(source, 0, "empty corpus");
  return corpus;
}

Corpus ingest_tsv(const std::filesystem::path& path, std::string name, std::string language) {
  auto in = open_input(path);
  return parse_tsv(in, path.string(), std::move(name), std::move(language));
}

void write_tsv(const Corpus& corpus, std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << '\n';
  bool first = true;
  for (const auto& s : corpus.sentences) {
    if (!first) out << '\n';
    first = false;
    for (const auto& t : s.tokens) out << t.wordform << '\t' << t.lemma.value_or("") << '\n';
  }
}

Corpus reduce(const Corpus& corpus, std::size_t max_sentences, SelectionRule rule, std::uint64_t seed) {
  if (corpus.sentences.size() <= max_sentences) return corpus;
  Corpus out{corpus.name, corpus.language, {}};
  if (rule == SelectionRule::first_n) {
    out.sentences.assign(corpus.sentences.begin(), corpus.sentences.begin() + static_cast<std::ptrdiff_t>(max_sentences));
  } else {
    for (std::size_t i : seeded_sample(corpus.sentences.size(), max_sentences, seed))
      out.sentences.push_back(corpus.sentences[i]);
  }
  return out;
}

Splits make_splits(const Corpus& corpus, const SplitSpec& spec) {
  const std::size_t total = spec.train_count + spec.dev_count + spec.test_count;
  if (total > corpus.sentences.size())
    throw ConfigError("split " + std::to_string(spec.train_count) + "/" + std::to_string(spec.dev_count) + "/" +
                      std::to_string(spec.test_count) + " needs " + std::to_string(total) + " sentences but corpus '" +
                      corpus.name + "' has " + std::to_string(corpus.sentences.size()));

  std::vector<std::size_t> order(corpus.sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (spec.rule == SelectionRule::seeded_random) order = seeded_permutation(corpus.sentences.size(), spec.seed);

  auto take = [&](std::size_t begin, std::size_t count) {
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                 order.begin() + static_cast<std::ptrdiff_t>(begin + count));
    std::sort(idx.begin(), idx.end());
    Corpus part{corpus.name, corpus.language, {}};
    part.sentences.reserve(count);
    for (std::size_t i : idx) part.sentences.push_back(corpus.sentences[i]);
    return part;
  };
  return Splits{take(0, spec.train_count), take(spec.train_count, spec.dev_count),
                take(spec.train_count + spec.dev_count, spec.test_count)};
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.sentences = corpus.sentences.size();
  for (const auto& s : corpus.sentences) stats.tokens += s.tokens.size();
  return stats;
}

SplitManifest manifest_for(const Splits& splits, const std::string& corpus_name, const SplitSpec& spec) {
  SplitManifest m{corpus_name, spec, {}, {}, {}};
  for (const auto& s : splits.train.sentences) m.train_ids.push_back(s.id);
  for (const auto& s : splits.dev.sentences) m.dev_ids.push_back(s.id);
  for (const auto& s : splits.test.sentences) m.test_ids.push_back(s.id);
  return m;
}

void write_manifest(const SplitManifest& m, std::ostream& out, const Metadata& meta) {
  out << "# lemmabench split manifest v1\n";
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << '\n';
  out << "corpus\t" << m.corpus << '\n';
  out << "rule\t" << to_string(m.spec.rule) << '\n';
  out << "seed\t" << m.spec.seed << '\n';
  out << "counts\t" << m.spec.train_count << '\t' << m.spec.dev_count << '\t' << m.spec.test_count << '\n';
  for (const auto& id : m.train_ids) out << "train\t" << id << '\n';
  for (const auto& id : m.dev_ids) out << "dev\t" << id << '\n';
  for (const auto& id : m.test_ids) out << "test\t" << id << '\n';
}

SplitManifest read_manifest(std::istream& in, const std::string& source) {
  SplitManifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    auto cols = text::split(line, '\t');
    const std::string_view key = cols[0];
    auto need = [&](std::size_t n) {
      if (cols.size() != n) throw ParseError(source, line_no, "expected " + std::to_string(n) + " fields");
    };
    try {
      if (key == "corpus") {
        need(2);
        m.corpus = cols[1];
      } else if (key == "rule") {
        need(2);
        m.spec.rule = parse_selection_rule(cols[1]);
      } else if (key == "seed") {
        need(2);
        m.spec.seed = std::stoull(std::string(cols[1]));
      } else if (key == "counts") {
        need(4);
        m.spec.train_count = std::stoul(std::string(cols[1]));
        m.spec.dev_count = std::stoul(std::string(cols[2]));
        m.spec.test_count = std::stoul(std::string(cols[3]));
      } else if (key == "train" || key == "dev" || key == "test") {
        need(2);
        auto& ids = key == "train" ? m.train_ids : key == "dev" ? m.dev_ids : m.test_ids;
        ids.emplace_back(cols[1]);
      } else {
        throw ParseError(source, line_no, "unknown manifest key '" + std::string(key) + "'");
      }
    } catch (const std::logic_error&) {
      throw ParseError(source, line_no, "invalid number");
    }
  }
  return m;
}

Splits apply_manifest(const Corpus& corpus, const SplitManifest& m) {
  std::unordered_map<std::string_view, const Sentence*> by_id;
  for (const auto& s : corpus.sentences) by_id.emplace(s.id, &s);
  auto collect = [&](const std::vector<std::string>& ids) {
    Corpus part{corpus.name, corpus.language, {}};
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw ConfigError("split manifest names unknown sentence '" + id + "'");
      part.sentences.push_back(*it->second);
    }
    return part;
  };
  return Splits{collect(m.train_ids), collect(m.dev_ids), collect(m.test_ids)};
}

}  // namespace lemmabench
