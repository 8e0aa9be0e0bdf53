#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lemmabench/corpus.hpp"
#include "lemmabench/editscript.hpp"
#include "lemmabench/metadata.hpp"

namespace lemmabench {

/// Frequency-table lemmatizer over edit-script labels. Lookup order per
/// token: exact (case-folded) form, then the longest known suffix of length
/// max_suffix_len down to 1, then identity.
struct BaselineModel {
  std::size_t max_suffix_len = 5;
  std::map<std::string, EditScript> form_table;    // case-folded wordform -> script
  std::map<std::string, EditScript> suffix_table;  // case-folded suffix -> script
};

struct BaselineOptions {
  std::size_t max_suffix_len = 5;
};

BaselineModel train_baseline(const Corpus& train, const LabelInventory& inventory, BaselineOptions options = {});

std::string predict_lemma(const BaselineModel& model, const std::string& wordform);
std::vector<std::string> predict(const BaselineModel& model, const Sentence& sentence);

void write_model(const BaselineModel& model, std::ostream& out, const Metadata& meta = {});
BaselineModel read_model(std::istream& in, const std::string& source);

}  // namespace lemmabench
