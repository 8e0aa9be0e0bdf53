#include <doctest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "lemmabench/align.hpp"
#include "lemmabench/errors.hpp"
#include "oracles.hpp"

using namespace lemmabench;

namespace {

Sentence basque() { return fixtures::sentence("eu-1", {"Etxera/etxe", "joan/joan", "egingo/egin", "dut/*edun", "./."}); }

}  // namespace

TEST_CASE("parse: tab pairs") {
  const auto p = parse_output("El\tel\nParque\tParque");
  CHECK(p.pairs == std::vector<OutputPair>{{"El", "el"}, {"Parque", "Parque"}});
  CHECK(p.unparsed.empty());
}

TEST_CASE("parse: quotation marks are stripped") {
  CHECK(parse_output("\"ocupó\"\tocupar").pairs == std::vector<OutputPair>{{"ocupó", "ocupar"}});
  CHECK(parse_output("«casa»\t'casa'").pairs == std::vector<OutputPair>{{"casa", "casa"}});
  CHECK(parse_output("\"\t\"").pairs == std::vector<OutputPair>{{"\"", "\""}});  // a quote mark token is kept
}

TEST_CASE("parse: separators") {
  CHECK(parse_output("perros   perro").pairs == std::vector<OutputPair>{{"perros", "perro"}});
  CHECK(parse_output("perros perro").pairs == std::vector<OutputPair>{{"perros", "perro"}});
  CHECK(parse_output("  perros\tperro  \r\n\n").pairs == std::vector<OutputPair>{{"perros", "perro"}});
  CHECK(parse_output("perros\t").pairs == std::vector<OutputPair>{{"perros", ""}});
}

TEST_CASE("parse: explanations are random-output candidates") {
  const auto p = parse_output("El\tel\n\nThe lemmas above are given in their dictionary form, as requested.\n```");
  CHECK(p.pairs.size() == 1);
  CHECK(p.unparsed.size() == 2);
  CHECK(align(p, fixtures::sentence("s", {"El/el"})).random_outputs == 2);
}

TEST_CASE("near match") {
  CHECK(near_match("el", "El"));
  CHECK(near_match("ocupo", "ocupó"));
  CHECK(near_match("casas", "casa"));
  CHECK_FALSE(near_match("casa", "casa"));  // exact, not near
  CHECK_FALSE(near_match("perro", "gato"));
  CHECK_FALSE(near_match("ab", "ba"));
}

TEST_CASE("align: perfect output") {
  const auto a = align_text("Etxera\tetxe\njoan\tjoan\negingo\tegin\ndut\t*edun\n.\t.", basque());
  CHECK(a.missing_words == 0);
  CHECK(a.wrong_words == 0);
  CHECK(a.random_outputs == 0);
  CHECK(a.lemmas[2] == "egin");
}

TEST_CASE("align: skipped egingo") {
  const auto a = align_text("Etxera\tetxe\njoan\tjoan\ndut\t*edun\n.\t.", basque());
  CHECK(a.missing_words == 1);
  CHECK_FALSE(a.lemmas[2].has_value());
  CHECK(a.match[2] == TokenMatch::missing);
  CHECK(a.lemmas[3] == "*edun");
}

TEST_CASE("align: lowercased sentence-initial word is a wrong word whose lemma still counts") {
  const auto a = align_text("etxera\tetxe\njoan\tjoan\negingo\tegin\ndut\t*edun\n.\t.", basque());
  CHECK(a.wrong_words == 1);
  CHECK(a.match[0] == TokenMatch::near);
  CHECK(a.lemmas[0] == "etxe");
}

TEST_CASE("align: duplicated block is random output, first block aligned") {
  const std::string block = "Etxera\tetxe\njoan\tjoan\negingo\tegin\ndut\t*edun\n.\t.\n";
  const auto a = align_text(block + block, basque());
  CHECK(a.missing_words == 0);
  CHECK(a.random_outputs == 5);
  CHECK(a.lemmas == std::vector<std::optional<std::string>>{"etxe", "joan", "egin", "*edun", "."});
}

TEST_CASE("align: ties resolve toward earlier matches") {
  const auto s = fixtures::sentence("s", {"de/de", "x/x", "de/de"});
  const auto a = align_text("de\tDE", s);
  CHECK(a.lemmas[0] == "DE");
  CHECK_FALSE(a.lemmas[2].has_value());
}

TEST_CASE("align: empty and garbage output") {
  const auto a = align_text("", basque());
  CHECK(a.missing_words == 5);
  CHECK(a.lemmas.size() == 5);
  const auto g = align_text("I cannot help with that.\nSorry", basque());
  CHECK(g.missing_words == 5);
  CHECK(g.random_outputs == 2);
}

TEST_CASE("property: perturbation oracle") {
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 300; ++i) {
    const auto p = oracle::perturb(rng);
    const auto a = align_text(p.raw, p.input);
    INFO(p.raw);
    CHECK(a.missing_words == p.deleted);
    CHECK(a.wrong_words == p.mutated);
    CHECK(a.random_outputs == p.inserted);
  }
}

TEST_CASE("property: totality and order preservation on random text") {
  std::mt19937_64 rng(4);
  const auto s = fixtures::sentence("s", {"uno", "dos", "tres", "cuatro", "dos", "."});
  const std::vector<std::string> pieces{"uno", "dos", "Dos", "tres", "tre", "cuatro", ".", "\t", " ", "  ", "\n", "\"", "x"};
  for (int i = 0; i < 2000; ++i) {
    std::string raw;
    for (std::size_t k = rng() % 30; k > 0; --k) raw += pieces[rng() % pieces.size()];
    const auto parsed = parse_output(raw);
    const auto a = align(parsed, s);
    REQUIRE(a.lemmas.size() == s.tokens.size());
    REQUIRE(a.match.size() == s.tokens.size());
    std::size_t matched = 0;
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
      CHECK(a.lemmas[t].has_value() == (a.match[t] != TokenMatch::missing));
      matched += a.lemmas[t].has_value();
    }
    CHECK(a.missing_words == s.tokens.size() - matched);
    CHECK(a.random_outputs == parsed.pairs.size() - matched + parsed.unparsed.size());
  }
}

TEST_CASE("diagnose and the diagnostics sidecar") {
  Corpus gold{"eu", "eu", {basque(), fixtures::sentence("eu-2", {"Bai/bai"})}};
  const std::vector<AlignedPrediction> preds{
      align_text("etxera\tetxe\njoan\tjoan\ndut\tdu\n.\t.\nextra line here", basque()),
      all_missing(gold.sentences[1], "HTTP 500")};
  auto d = diagnose(preds, gold);
  REQUIRE(d.sentences.size() == 2);
  CHECK(d.sentences[0].missing == 1);
  CHECK(d.sentences[0].wrong == 1);
  CHECK(d.sentences[0].random == 1);
  CHECK(d.sentences[0].incorrect == 1);  // dut -> du
  CHECK(d.sentences[0].total_errors() == 4);
  CHECK(d.sentences[1].failed);
  CHECK(d.failed_sentences() == 1);
  CHECK(d.total_missing() == 2);

  d.meta = {{"system", "x"}};
  d.issues = {{3, "bad line"}};
  const auto back = diagnostics_from_json(diagnostics_to_json(d), "diag");
  CHECK(back.meta == d.meta);
  CHECK(back.sentences.size() == 2);
  CHECK(back.sentences[1].error == "HTTP 500");
  CHECK(back.issues.size() == 1);
  CHECK(diagnostics_to_json(back) == diagnostics_to_json(d));
  CHECK_THROWS_AS(diagnostics_from_json("{}", "x"), ParseError);
}

TEST_CASE("canonical prediction file round trip") {
  Corpus gold{"eu", "eu", {basque()}};
  const std::vector<AlignedPrediction> preds{align_text("Etxera\tetxe\njoan\tjoan\ndut\t*edun\n.\t.", basque())};
  std::ostringstream out;
  write_predictions(preds, gold, {{"system", "s"}}, out);
  std::istringstream in(out.str());
  const auto file = read_prediction_file(in, "pred");
  CHECK(file.meta == Metadata{{"system", "s"}});
  const auto back = load_canonical_predictions(file, gold, "pred");
  CHECK(back[0].lemmas == preds[0].lemmas);
}

TEST_CASE("external predictions: malformed line, id matching, absent blocks") {
  Corpus gold{"eu", "eu", {basque(), fixtures::sentence("eu-2", {"Bai/bai", "./."})}};
  std::istringstream in(
      "# sent_id = eu-2\nBai\tbai\n.\t.\n\n# sent_id = eu-1\nEtxera\tetxe\nthis is not a pair\njoan\tjoan\n"
      "egingo\tegin\ndut\t*edun\n.\t.\n");
  const auto file = read_prediction_file(in, "ext");
  std::vector<Issue> issues;
  const auto preds = import_external_predictions(file, gold, issues);
  REQUIRE(preds.size() == 2);
  CHECK(preds[0].sentence_id == "eu-1");
  CHECK(preds[0].missing_words == 0);
  CHECK(preds[1].lemmas[0] == "bai");
  CHECK(issues.size() == 1);
  CHECK(issues[0].line == 7);

  std::istringstream partial("# sent_id = eu-1\nEtxera\tetxe\n");
  std::vector<Issue> more;
  const auto p2 = import_external_predictions(read_prediction_file(partial, "p"), gold, more);
  CHECK(p2[1].missing_words == 2);
}
