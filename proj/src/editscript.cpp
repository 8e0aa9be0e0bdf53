#include "lemmabench/editscript.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <optional>
#include <ostream>
#include <tuple>

#include "lemmabench/errors.hpp"
#include "lemmabench/text.hpp"
#include "lemmabench/unicode.hpp"

namespace lemmabench {

std::size_t EditScript::cost() const noexcept {
  return prefix.remove + prefix.insert.size() + suffix.remove + suffix.insert.size() +
         (case_flag == CaseFlag::preserve ? 0 : 1);
}

EditScript identity_script() { return EditScript{}; }

namespace {

std::u32string recase(CaseFlag flag, std::u32string_view word) {
  std::u32string out(word);
  if (out.empty() || flag == CaseFlag::preserve) return out;
  out[0] = flag == CaseFlag::lowercase_first ? unicode::to_lower(out[0]) : unicode::to_upper(out[0]);
  return out;
}

struct Candidate {
  EditScript script;
  // Ranking key: cost, prefix edit size, insertion length, case flag, prefix deletions.
  std::tuple<std::size_t, std::size_t, std::size_t, int, std::size_t> key() const {
    return {script.cost(), script.prefix.remove + script.prefix.insert.size(),
            script.prefix.insert.size() + script.suffix.insert.size(), static_cast<int>(script.case_flag),
            script.prefix.remove};
  }
};

// Best decomposition for a fixed case flag: the wordform and lemma share a
// maximal common substring; everything around it is rewritten.
Candidate best_for(CaseFlag flag, std::u32string_view word, std::u32string_view lemma) {
  const std::u32string w = recase(flag, word);
  const std::size_t n = w.size(), m = lemma.size();

  // run[j] = length of the common suffix of w[0..i) and lemma[0..j).
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  std::size_t best_len = 0;
  std::optional<Candidate> best;

  auto consider = [&](std::size_t w_begin, std::size_t len, std::size_t l_begin) {
    Candidate c;
    c.script.case_flag = flag;
    c.script.prefix.remove = w_begin;
    c.script.prefix.insert = std::u32string(lemma.substr(0, l_begin));
    c.script.suffix.remove = n - w_begin - len;
    c.script.suffix.insert = std::u32string(lemma.substr(l_begin + len));
    if (!best || c.key() < best->key()) best = std::move(c);
  };

  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = w[i - 1] == lemma[j - 1] ? prev[j - 1] + 1 : 0;
      const std::size_t len = cur[j];
      if (len == 0 || len < best_len) continue;
      if (len > best_len) {
        best_len = len;
        best.reset();
      }
      consider(i - len, len, j - len);
    }
    std::swap(prev, cur);
  }
  if (!best) consider(0, 0, 0);  // nothing shared: replace the whole word via the suffix
  return *best;
}

}  // namespace

EditScript induce(std::u32string_view wordform, std::u32string_view lemma) {
  std::optional<Candidate> best;
  for (CaseFlag flag : {CaseFlag::preserve, CaseFlag::lowercase_first, CaseFlag::uppercase_first}) {
    if (flag != CaseFlag::preserve && (wordform.empty() || recase(flag, wordform) == wordform)) continue;
    Candidate c = best_for(flag, wordform, lemma);
    if (!best || c.key() < best->key()) best = std::move(c);
  }
  return best->script;
}

EditScript induce(std::string_view wordform, std::string_view lemma) {
  return induce(unicode::decode(wordform), unicode::decode(lemma));
}

bool applicable(const EditScript& script, std::size_t wordform_length) noexcept {
  return script.prefix.remove + script.suffix.remove <= wordform_length;
}

std::u32string apply(const EditScript& script, std::u32string_view wordform) {
  if (!applicable(script, wordform.size()))
    throw InapplicableScriptError("script " + encode(script) + " deletes more than the " +
                                  std::to_string(wordform.size()) + " character(s) of '" + unicode::encode(wordform) +
                                  "'");
  const std::u32string w = recase(script.case_flag, wordform);
  std::u32string out = script.prefix.insert;
  out.append(w, script.prefix.remove, w.size() - script.prefix.remove - script.suffix.remove);
  out += script.suffix.insert;
  return out;
}

std::string apply(const EditScript& script, std::string_view wordform) {
  return unicode::encode(apply(script, std::u32string_view(unicode::decode(wordform))));
}

namespace {

void escape_into(std::string& out, std::u32string_view s) {
  for (char32_t c : s) {
    switch (c) {
      case U'\\': out += "\\\\"; break;
      case U'|': out += "\\|"; break;
      case U':': out += "\\:"; break;
      case U'\t': out += "\\t"; break;
      case U'\n': out += "\\n"; break;
      default: out += unicode::encode(std::u32string_view(&c, 1));
    }
  }
}

char case_char(CaseFlag f) {
  switch (f) {
    case CaseFlag::preserve: return '=';
    case CaseFlag::lowercase_first: return 'l';
    case CaseFlag::uppercase_first: return 'u';
  }
  return '=';
}

}  // namespace

std::string encode(const EditScript& script) {
  std::string out(1, case_char(script.case_flag));
  out += std::to_string(script.prefix.remove);
  out += ':';
  escape_into(out, script.prefix.insert);
  out += '|';
  out += std::to_string(script.suffix.remove);
  out += ':';
  escape_into(out, script.suffix.insert);
  return out;
}

EditScript decode_script(std::string_view encoded) {
  auto fail = [&](const std::string& why) -> EditScript {
    throw Error("invalid edit script '" + std::string(encoded) + "': " + why);
  };
  if (encoded.empty()) return fail("empty");
  EditScript script;
  switch (encoded[0]) {
    case '=': script.case_flag = CaseFlag::preserve; break;
    case 'l': script.case_flag = CaseFlag::lowercase_first; break;
    case 'u': script.case_flag = CaseFlag::uppercase_first; break;
    default: return fail("unknown case flag");
  }
  std::size_t pos = 1;
  auto read_op = [&](AffixOp& op, bool last) {
    std::size_t start = pos;
    while (pos < encoded.size() && encoded[pos] >= '0' && encoded[pos] <= '9') ++pos;
    if (pos == start || pos >= encoded.size() || encoded[pos] != ':') fail("expected <count>:");
    op.remove = std::stoul(std::string(encoded.substr(start, pos - start)));
    ++pos;
    std::string raw;
    while (pos < encoded.size() && encoded[pos] != '|') {
      char c = encoded[pos++];
      if (c == ':') fail("unescaped ':'");
      if (c != '\\') {
        raw.push_back(c);
        continue;
      }
      if (pos >= encoded.size()) fail("dangling escape");
      char e = encoded[pos++];
      switch (e) {
        case '\\': raw.push_back('\\'); break;
        case '|': raw.push_back('|'); break;
        case ':': raw.push_back(':'); break;
        case 't': raw.push_back('\t'); break;
        case 'n': raw.push_back('\n'); break;
        default: fail("unknown escape");
      }
    }
    op.insert = unicode::decode(raw);
    if (last) {
      if (pos != encoded.size()) fail("trailing characters");
    } else {
      if (pos >= encoded.size()) fail("missing suffix part");
      ++pos;
    }
  };
  read_op(script.prefix, false);
  read_op(script.suffix, true);
  return script;
}

std::size_t LabelInventory::find(const EditScript& script) const {
  auto it = id_by_code.find(encode(script));
  return it == id_by_code.end() ? labels.size() : it->second;
}

namespace {

LabelInventory finalize(std::map<std::string, std::size_t> counts) {
  std::vector<std::pair<std::string, std::size_t>> entries(counts.begin(), counts.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  LabelInventory inv;
  for (auto& [code, freq] : entries) {
    inv.id_by_code.emplace(code, inv.labels.size());
    inv.labels.push_back(decode_script(code));
    inv.frequency.push_back(freq);
  }
  return inv;
}

}  // namespace

LabelInventory build_inventory(const Corpus& train) {
  if (train.sentences.empty()) throw Error("cannot build a label inventory from an empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& s : train.sentences) {
    for (const auto& t : s.tokens) {
      if (!t.lemma || t.lemma->empty())
        throw Error("token " + std::to_string(t.index) + " '" + t.wordform + "' in sentence " + s.id +
                    " has no lemma");
      ++counts[encode(induce(t.wordform, *t.lemma))];
    }
  }
  return finalize(std::move(counts));
}

void write_inventory(const LabelInventory& inv, std::ostream& out, const Metadata& meta) {
  out << "# lemmabench label inventory v1\n";
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << '\n';
  out << "# id\tscript\tfrequency\n";
  for (std::size_t i = 0; i < inv.labels.size(); ++i)
    out << i << '\t' << encode(inv.labels[i]) << '\t' << inv.frequency[i] << '\n';
}

LabelInventory read_inventory(std::istream& in, const std::string& source) {
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  std::string line;
  std::size_t line_no = 0;
  bool versioned = false;
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (line_no == 1) {
      if (line != "# lemmabench label inventory v1") throw ParseError(source, 1, "not a v1 label inventory");
      versioned = true;
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 3) throw ParseError(source, line_no, "expected id<TAB>script<TAB>frequency");
    std::size_t id = 0, freq = 0;
    try {
      id = std::stoul(std::string(cols[0]));
      freq = std::stoul(std::string(cols[2]));
    } catch (const std::logic_error&) {
      throw ParseError(source, line_no, "invalid number");
    }
    if (id != order.size()) throw ParseError(source, line_no, "label ids must be dense and ascending");
    std::string code = encode(decode_script(cols[1]));
    counts[code] = freq;
    order.push_back(code);
  }
  if (!versioned) throw ParseError(source, 0, "empty inventory file");
  LabelInventory inv;
  for (const auto& code : order) {
    inv.id_by_code.emplace(code, inv.labels.size());
    inv.labels.push_back(decode_script(code));
    inv.frequency.push_back(counts[code]);
  }
  return inv;
}

}  // namespace lemmabench
