#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lemmabench/corpus.hpp"
#include "lemmabench/metadata.hpp"

namespace lemmabench {

enum class CaseFlag : std::uint8_t { preserve, lowercase_first, uppercase_first };

/// Prefix or suffix rewrite: drop `remove` code points, then insert `insert`.
struct AffixOp {
  std::size_t remove = 0;
  std::u32string insert;

  bool empty() const noexcept { return remove == 0 && insert.empty(); }
  auto operator<=>(const AffixOp&) const = default;
};

/// Wordform-to-lemma transformation: recase the first character, then
/// rewrite a prefix and a suffix. Counts are in Unicode code points.
struct EditScript {
  CaseFlag case_flag = CaseFlag::preserve;
  AffixOp prefix;
  AffixOp suffix;

  bool is_identity() const noexcept { return case_flag == CaseFlag::preserve && prefix.empty() && suffix.empty(); }

  /// Edited characters: deletions plus insertions, plus one for a case change.
  std::size_t cost() const noexcept;

  auto operator<=>(const EditScript&) const = default;
};

EditScript identity_script();

/// Minimal script mapping `wordform` to `lemma`. Among minimal-cost scripts
/// the one with the smallest prefix edit wins, then the shortest total
/// insertion, then preserve over recasing, then the fewest prefix deletions.
EditScript induce(std::string_view wordform, std::string_view lemma);
EditScript induce(std::u32string_view wordform, std::u32string_view lemma);

/// Throws InapplicableScriptError when the deletions exceed the wordform.
std::string apply(const EditScript& script, std::string_view wordform);
std::u32string apply(const EditScript& script, std::u32string_view wordform);

bool applicable(const EditScript& script, std::size_t wordform_length) noexcept;

/// Text form "<case><prefix-del>:<prefix-ins>|<suffix-del>:<suffix-ins>"
/// with case one of '=', 'l', 'u'. Backslash escapes '\\', '|', ':', tab
/// and newline inside insertions. Identity is "=0:|0:".
std::string encode(const EditScript& script);
EditScript decode_script(std::string_view encoded);

struct LabelInventory {
  std::vector<EditScript> labels;                  // indexed by label id
  std::vector<std::size_t> frequency;              // parallel to labels
  std::map<std::string, std::size_t> id_by_code;   // encode(script) -> id

  std::size_t size() const noexcept { return labels.size(); }
  /// Label id, or size() when the script is unknown.
  std::size_t find(const EditScript& script) const;
};

/// Ids are ordered by frequency (descending), then by encoding.
LabelInventory build_inventory(const Corpus& train);

void write_inventory(const LabelInventory& inventory, std::ostream& out, const Metadata& meta = {});
LabelInventory read_inventory(std::istream& in, const std::string& source);

}  // namespace lemmabench
