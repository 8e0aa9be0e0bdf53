#include "lemmabench/baseline.hpp"

#include <istream>
#include <ostream>
#include <unordered_map>

#include "lemmabench/errors.hpp"
#include "lemmabench/text.hpp"
#include "lemmabench/unicode.hpp"

namespace lemmabench {

namespace {

using Counts = std::map<std::string, std::map<std::size_t, std::size_t>>;  // key -> label id -> count

std::map<std::string, EditScript> majority(const Counts& counts, const LabelInventory& inventory) {
  std::map<std::string, EditScript> table;
  for (const auto& [key, by_label] : counts) {
    // Ties go to the lower inventory id (the map iterates ids ascending).
    std::size_t best_id = by_label.begin()->first, best_count = 0;
    for (const auto& [id, count] : by_label) {
      if (count > best_count) {
        best_id = id;
        best_count = count;
      }
    }
    table.emplace(key, inventory.labels[best_id]);
  }
  return table;
}

std::string suffix_key(const std::u32string& folded, std::size_t len) {
  return unicode::encode(std::u32string_view(folded).substr(folded.size() - len));
}

}  // namespace

BaselineModel train_baseline(const Corpus& train, const LabelInventory& inventory, BaselineOptions options) {
  if (train.sentences.empty()) throw Error("cannot train the baseline on an empty corpus");
  if (options.max_suffix_len == 0) throw ConfigError("max_suffix_len must be at least 1");
  Counts forms, suffixes;
  for (const auto& s : train.sentences) {
    for (const auto& t : s.tokens) {
      if (!t.lemma) throw Error("training token '" + t.wordform + "' in " + s.id + " has no lemma");
      const std::size_t id = inventory.find(induce(t.wordform, *t.lemma));
      if (id == inventory.size())
        throw Error("training token '" + t.wordform + "' in " + s.id + " has a script missing from the inventory");
      const std::string folded = unicode::fold_case(t.wordform);
      ++forms[folded][id];
      const std::u32string folded32 = unicode::decode(folded);
      for (std::size_t len = 1; len <= options.max_suffix_len && len <= folded32.size(); ++len)
        ++suffixes[suffix_key(folded32, len)][id];
    }
  }
  BaselineModel model;
  model.max_suffix_len = options.max_suffix_len;
  model.form_table = majority(forms, inventory);
  model.suffix_table = majority(suffixes, inventory);
  return model;
}

std::string predict_lemma(const BaselineModel& model, const std::string& wordform) {
  const std::u32string word = unicode::decode(wordform);
  auto try_script = [&](const EditScript& script, std::string& out) {
    if (!applicable(script, word.size())) return false;
    out = unicode::encode(apply(script, std::u32string_view(word)));
    return !out.empty();
  };
  std::string out;
  const std::string folded = unicode::fold_case(wordform);
  if (auto it = model.form_table.find(folded); it != model.form_table.end() && try_script(it->second, out)) return out;
  const std::u32string folded32 = unicode::decode(folded);
  for (std::size_t len = std::min(model.max_suffix_len, folded32.size()); len >= 1; --len) {
    auto it = model.suffix_table.find(suffix_key(folded32, len));
    if (it != model.suffix_table.end() && try_script(it->second, out)) return out;
  }
  return wordform;
}

std::vector<std::string> predict(const BaselineModel& model, const Sentence& sentence) {
  std::vector<std::string> out;
  out.reserve(sentence.tokens.size());
  for (const auto& t : sentence.tokens) out.push_back(predict_lemma(model, t.wordform));
  return out;
}

void write_model(const BaselineModel& model, std::ostream& out, const Metadata& meta) {
  out << "# lemmabench baseline model v1\n";
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << '\n';
  out << "max_suffix_len\t" << model.max_suffix_len << '\n';
  for (const auto& [key, script] : model.form_table) out << "form\t" << key << '\t' << encode(script) << '\n';
  for (const auto& [key, script] : model.suffix_table) out << "suffix\t" << key << '\t' << encode(script) << '\n';
}

BaselineModel read_model(std::istream& in, const std::string& source) {
  BaselineModel model;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (line_no == 1) {
      if (line != "# lemmabench baseline model v1") throw ParseError(source, 1, "not a v1 baseline model");
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    auto cols = text::split(line, '\t');
    try {
      if (cols[0] == "max_suffix_len" && cols.size() == 2) {
        model.max_suffix_len = std::stoul(std::string(cols[1]));
      } else if ((cols[0] == "form" || cols[0] == "suffix") && cols.size() == 3) {
        auto& table = cols[0] == "form" ? model.form_table : model.suffix_table;
        table.emplace(std::string(cols[1]), decode_script(cols[2]));
      } else {
        throw ParseError(source, line_no, "unrecognized model line");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  if (line_no == 0) throw ParseError(source, 0, "empty model file");
  return model;
}

}  // namespace lemmabench
