#include <doctest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "lemmabench/editscript.hpp"
#include "lemmabench/errors.hpp"
#include "lemmabench/unicode.hpp"
#include "oracles.hpp"

using namespace lemmabench;

TEST_CASE("induce: worked examples") {
  CHECK(apply(induce("chosen", "choose"), "chosen") == "choose");
  CHECK(apply(induce("ocupó", "ocupar"), "ocupó") == "ocupar");
  CHECK(apply(induce("los", "el"), "los") == "el");
  CHECK(induce("the", "the").is_identity());
  CHECK(encode(induce("the", "the")) == "=0:|0:");
}

TEST_CASE("induce: minimal scripts by hand") {
  const auto chosen = induce("chosen", "choose");
  // The kept middle must be contiguous in both: "cho" + "sen" -> "cho" + "ose".
  CHECK(chosen.cost() == 6);
  CHECK(chosen.prefix.empty());
  CHECK(chosen.suffix.remove == 3);
  CHECK(chosen.suffix.insert == U"ose");

  const auto ocupo = induce("ocupó", "ocupar");
  CHECK(ocupo.suffix.remove == 1);
  CHECK(ocupo.suffix.insert == U"ar");
  CHECK(encode(ocupo) == "=0:|1:ar");

  CHECK(encode(induce("dogs", "dog")) == "=0:|1:");
  CHECK(encode(induce("ungood", "good")) == "=2:|0:");
}

TEST_CASE("induce: case handling") {
  const auto the = induce("The", "the");
  CHECK(the.case_flag == CaseFlag::lowercase_first);
  CHECK(the.prefix.empty());
  CHECK(the.suffix.empty());
  CHECK(induce("madrid", "Madrid").case_flag == CaseFlag::uppercase_first);
  CHECK(apply(induce("Los", "el"), "Los") == "el");
  CHECK(apply(induce("Él", "él"), "Él") == "él");
}

TEST_CASE("induce: ties prefer suffix edits") {
  // "aa" -> "a": deleting either end costs 1; the suffix edit wins.
  const auto s = induce("aa", "a");
  CHECK(s.prefix.empty());
  CHECK(s.suffix.remove == 1);
}

TEST_CASE("induce: whole-word fallback when nothing is shared") {
  const auto s = induce("was", "be");
  CHECK(apply(s, "was") == "be");
  CHECK(s.cost() == 5);
  CHECK(s.prefix.empty());
  CHECK(s.suffix.remove == 3);
}

TEST_CASE("apply: identity and inapplicable scripts") {
  CHECK(apply(identity_script(), "casa") == "casa");
  const auto strip = induce("dogs", "dog");
  CHECK(apply(strip, "cats") == "cat");
  CHECK_THROWS_AS(apply(induce("houses", "h"), "ab"), InapplicableScriptError);
  CHECK(applicable(strip, 1));
  CHECK_FALSE(applicable(strip, 0));
  // prefix and suffix deletions together must fit
  CHECK_FALSE(applicable(induce("xxab", "a"), 2));
}

TEST_CASE("encode / decode round trip with escapes") {
  for (const auto& [w, l] : std::vector<std::pair<std::string, std::string>>{
           {"a|b", "a:b"}, {"x", "\\"}, {"tab", "t\tb"}, {"nl", "n\nl"}, {"Abc", "xabc|"}}) {
    const auto s = induce(w, l);
    const auto code = encode(s);
    CHECK(code.find('\t') == std::string::npos);
    CHECK(code.find('\n') == std::string::npos);
    CHECK(decode_script(code) == s);
  }
  CHECK_THROWS_AS(decode_script("=0:"), Error);
  CHECK_THROWS_AS(decode_script("?0:|0:"), Error);
  CHECK_THROWS_AS(decode_script("=x:|0:"), Error);
}

TEST_CASE("property: round trip, determinism and identity law on random strings") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 2000; ++i) {
    const auto w = unicode::encode(oracle::random_unicode(rng, 1, 10));
    const auto l = unicode::encode(oracle::random_unicode(rng, 1, 10));
    const auto s = induce(w, l);
    REQUIRE(lemmabench::apply(s, w) == l);
    CHECK(encode(s) == encode(induce(w, l)));
    CHECK(induce(w, w).is_identity());
  }
}

TEST_CASE("property: induced cost equals the exhaustive decomposition oracle") {
  std::mt19937_64 rng(77);
  const std::u32string alphabet = U"abAB";
  for (int i = 0; i < 3000; ++i) {
    std::u32string w, l;
    for (std::size_t k = 1 + rng() % 7; k > 0; --k) w += alphabet[rng() % alphabet.size()];
    for (std::size_t k = 1 + rng() % 7; k > 0; --k) l += alphabet[rng() % alphabet.size()];
    const auto s = induce(w, l);
    REQUIRE(lemmabench::apply(s, w) == l);
    CHECK(s.cost() == oracle::min_edit_cost(w, l));
  }
  for (const auto& f : fixtures::corpora()) {
    for (const auto& sent : fixtures::load(f).sentences)
      for (const auto& t : sent.tokens) {
        const auto w = unicode::decode(t.wordform), l = unicode::decode(*t.lemma);
        CHECK(induce(w, l).cost() == oracle::min_edit_cost(w, l));
      }
  }
}

TEST_CASE("inventory: ids, frequencies and serialization") {
  Corpus same{"s", "en", {fixtures::sentence("s-1", {"a", "b", "c"})}};
  const auto one = build_inventory(same);
  CHECK(one.size() == 1);
  CHECK(one.labels[0].is_identity());
  CHECK(one.frequency[0] == 3);

  Corpus plural{"p", "en", {fixtures::sentence("p-1", {"dogs/dog", "cats/cat"})}};
  const auto strip = build_inventory(plural);
  CHECK(strip.size() == 1);
  CHECK(encode(strip.labels[0]) == "=0:|1:");
  CHECK(strip.find(induce("rats", "rat")) == 0);
  CHECK(strip.find(identity_script()) == strip.size());

  Corpus mixed{"m", "en", {fixtures::sentence("m-1", {"The/the", "dogs/dog", "ran/run", "cats/cat", "a"})}};
  const auto inv = build_inventory(mixed);
  CHECK(encode(inv.labels[0]) == "=0:|1:");  // most frequent first
  for (std::size_t i = 1; i < inv.size(); ++i) {
    CHECK(inv.frequency[i - 1] >= inv.frequency[i]);
    if (inv.frequency[i - 1] == inv.frequency[i]) CHECK(encode(inv.labels[i - 1]) < encode(inv.labels[i]));
  }

  std::ostringstream out;
  write_inventory(inv, out, {{"corpus", "m"}});
  std::istringstream in(out.str());
  const auto back = read_inventory(in, "inv");
  CHECK(back.labels == inv.labels);
  CHECK(back.frequency == inv.frequency);

  std::istringstream bad("# something else\n0\t=0:|0:\t1\n");
  CHECK_THROWS_AS(read_inventory(bad, "bad"), Error);
}

TEST_CASE("inventory: missing lemma names the token") {
  Corpus c{"x", "en", {fixtures::sentence("x-1", {"ok", "bare/"})}};
  try {
    build_inventory(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bare") != std::string::npos);
    CHECK(msg.find("x-1") != std::string::npos);
  }
}

TEST_CASE("inventory is stable across builds") {
  const auto c = fixtures::load(fixtures::corpora()[0]);
  std::ostringstream a, b;
  write_inventory(build_inventory(c), a);
  write_inventory(build_inventory(c), b);
  CHECK(a.str() == b.str());
}
