// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fakellm/fake_llm.hpp"
#include "fixtures.hpp"
#include "lemmabench/align.hpp"
#include "lemmabench/baseline.hpp"
#include "lemmabench/editscript.hpp"
#include "lemmabench/eval.hpp"
#include "lemmabench/experiment.hpp"
#include "lemmabench/prompt.hpp"
#include "lemmabench/text.hpp"
#include "lemmabench/unicode.hpp"
#include "oracles.hpp"

using namespace lemmabench;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr double kRoundTripSeconds = 5.0;
constexpr std::size_t kRandomPairs = 10000;
constexpr std::size_t kMinimalityMaxLen = 12;
constexpr std::size_t kPerturbations = 1000;
constexpr std::size_t kMetricFixtures = 100;
constexpr std::size_t kMcNemarMaxN = 50;
constexpr double kMcNemarTolerance = 1e-9;
constexpr double kReplaySeconds = 60.0;
constexpr std::size_t kReplayMinSentences = 50;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Corpus> fixture_corpora() {
  std::vector<Corpus> out;
  for (const auto& c : fixtures::corpora()) out.push_back(fixtures::load(c));
  return out;
}

Outcome round_trip() {
  const auto corpora = fixture_corpora();
  const auto start = Clock::now();
  std::size_t pairs = 0, bad = 0;
  std::string first_bad;
  auto check = [&](const std::string& w, const std::string& l) {
    ++pairs;
    if (lemmabench::apply(induce(w, l), w) != l) {
      if (!bad++) first_bad = w + " -> " + l;
    }
  };
  for (const auto& c : corpora)
    for (const auto& s : c.sentences)
      for (const auto& t : s.tokens)
        if (t.lemma) check(t.wordform, *t.lemma);
  std::mt19937_64 rng(20240601);
  for (std::size_t i = 0; i < kRandomPairs; ++i)
    check(unicode::encode(oracle::random_unicode(rng, 1, 16)), unicode::encode(oracle::random_unicode(rng, 0, 16)));
  const double secs = seconds_since(start);
  Outcome o{bad == 0 && secs < kRoundTripSeconds,
            fmt("%zu/%zu pairs round-trip (%zu random), %.2f s (limit %.0f s)", pairs - bad, pairs, kRandomPairs, secs,
                kRoundTripSeconds)};
  if (bad) o.detail += "; first failure " + first_bad;
  return o;
}

Outcome minimality() {
  std::size_t pairs = 0, bad = 0;
  std::string first_bad;
  for (const auto& c : fixture_corpora())
    for (const auto& s : c.sentences)
      for (const auto& t : s.tokens) {
        if (!t.lemma) continue;
        const auto w = unicode::decode(t.wordform), l = unicode::decode(*t.lemma);
        if (w.size() > kMinimalityMaxLen || l.size() > kMinimalityMaxLen) continue;
        ++pairs;
        const auto got = induce(w, l).cost(), want = oracle::min_edit_cost(w, l);
        if (got != want && !bad++) first_bad = fmt("%s -> %s: %zu vs oracle %zu", t.wordform.c_str(), t.lemma->c_str(), got, want);
      }
  Outcome o{bad == 0 && pairs > 0, fmt("%zu/%zu fixture pairs (<= %zu chars) match the exhaustive oracle", pairs - bad,
                                       pairs, kMinimalityMaxLen)};
  if (bad) o.detail += "; first mismatch " + first_bad;
  return o;
}

Outcome alignment() {
  std::mt19937_64 rng(77);
  std::size_t bad = 0, d = 0, m = 0, ins = 0;
  for (std::size_t i = 0; i < kPerturbations; ++i) {
    const auto p = oracle::perturb(rng);
    const auto a = align_text(p.raw, p.input);
    d += p.deleted;
    m += p.mutated;
    ins += p.inserted;
    if (a.missing_words != p.deleted || a.wrong_words != p.mutated || a.random_outputs != p.inserted) ++bad;
  }
  return {bad == 0, fmt("%zu/%zu perturbed outputs exact (%zu deleted, %zu mutated, %zu inserted in total)",
                        kPerturbations - bad, kPerturbations, d, m, ins)};
}

Outcome metrics() {
  std::mt19937_64 rng(4242);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < kMetricFixtures; ++i) {
    const auto c = fixtures::random_scored_case(rng);
    for (bool renorm : {false, true}) {
      const auto policy = renorm ? MissingPolicy::renormalize : MissingPolicy::strict;
      if (word_accuracy(c.predictions, c.gold, policy) != oracle::word_accuracy(c.gold_lemmas, c.predicted_lemmas, renorm) ||
          sentence_accuracy(c.predictions, c.gold, policy) !=
              oracle::sentence_accuracy(c.gold_lemmas, c.predicted_lemmas, renorm))
        ++bad;
    }
  }
  return {bad == 0, fmt("%zu/%zu fixture-policy combinations agree exactly with brute force", 2 * kMetricFixtures - bad,
                        2 * kMetricFixtures)};
}

Outcome mcnemar_check() {
  double worst = 0.0;
  bool symmetric = true;
  std::size_t cells = 0;
  for (std::size_t n = 0; n <= kMcNemarMaxN; ++n)
    for (std::size_t b = 0; b <= n; ++b) {
      ++cells;
      const double p = mcnemar_exact_p(b, n - b);
      worst = std::max(worst, std::abs(p - oracle::binomial_two_sided(b, n - b)));
      if (p != mcnemar_exact_p(n - b, b) || mcnemar(b, n - b).p_value != mcnemar(n - b, b).p_value) symmetric = false;
    }
  bool degenerate = mcnemar(0, 0).p_value == 1.0 && mcnemar_exact_p(0, 0) == 1.0;
  for (std::size_t k = 1; k <= 30; ++k) degenerate = degenerate && mcnemar(k, k).p_value == 1.0;
  return {worst <= kMcNemarTolerance && symmetric && degenerate,
          fmt("%zu cells with b01+b10 <= %zu, max |p - enumeration| = %.3g (tol %.0e), symmetric=%s, p=1 cases=%s", cells,
              kMcNemarMaxN, worst, kMcNemarTolerance, symmetric ? "yes" : "no", degenerate ? "yes" : "no")};
}

Outcome prompts() {
  auto spec = [](PromptTemplate t, InputMode m, std::size_t k) {
    auto s = default_prompt_spec("Spanish");
    s.tmpl = t;
    s.input_mode = m;
    s.k = k;
    return s;
  };
  const std::vector<FewShotExample> ex{make_example(fixtures::tina())};
  struct Case {
    const char* file;
    std::string rendered;
  };
  const std::vector<Case> cases{
      {"basic_k0_sentence_es.txt", render_prompt(spec(PromptTemplate::basic, InputMode::sentence_string, 0), {}, fixtures::golden_gate())},
      {"full_k0_sentence_es.txt", render_prompt(spec(PromptTemplate::full, InputMode::sentence_string, 0), {}, fixtures::golden_gate())},
      {"basic_k1_wordlist_es.txt", render_prompt(spec(PromptTemplate::basic, InputMode::word_list, 1), ex, fixtures::venecia())},
      {"full_k1_wordlist_es.txt", render_prompt(spec(PromptTemplate::full, InputMode::word_list, 1), ex, fixtures::venecia())}};
  std::size_t ok = 0;
  std::string bad;
  for (const auto& c : cases) {
    if (c.rendered == fixtures::golden_prompt(c.file)) ++ok;
    else bad += std::string(" ") + c.file;
  }
  const auto golden = fixtures::golden_prompt("full_k0_sentence_es.txt");
  const bool markers = golden.find("Your task is to lemmatize a sentence") != std::string::npos &&
                       golden.find("**Process Every Word**") != std::string::npos;
  Outcome o{ok == cases.size() && markers, fmt("%zu/%zu prompts byte-match golden files", ok, cases.size())};
  if (!bad.empty()) o.detail += "; differ:" + bad;
  if (!markers) o.detail += "; golden text lacks the expected instructions";
  return o;
}

std::vector<std::string> data_rows(const std::string& tsv) {
  std::vector<std::string> out;
  for (auto& l : text::lines(tsv))
    if (!l.empty() && l.front() != '#') out.push_back(l);
  return out;
}

// Optional: official PUD files under LEMMABENCH_UD_DIR, matched by file name.
std::string live_table1(bool& pass) {
  const char* dir = std::getenv("LEMMABENCH_UD_DIR");
  if (!dir || !*dir) return "live check skipped (LEMMABENCH_UD_DIR unset)";
  struct Expect {
    const char* prefix;
    const char* language;
    CorpusStats stats;
  };
  const std::vector<Expect> expected{{"tr_pud", "tr", {1795, 100}}, {"cs_pud", "cs", {1930, 100}}};
  std::string detail = "live:";
  for (const auto& e : expected) {
    std::optional<fs::path> found;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".conllu" &&
          entry.path().filename().string().starts_with(e.prefix))
        found = entry.path();
    if (!found) {
      pass = false;
      detail += fmt(" %s not found;", e.prefix);
      continue;
    }
    const auto stats = corpus_stats(ingest_conllu(*found, e.prefix, e.language));
    const bool ok = stats == e.stats;
    pass = pass && ok;
    detail += fmt(" %s %zu/%zu (expected %zu/%zu)%s;", e.prefix, stats.tokens, stats.sentences, e.stats.tokens,
                  e.stats.sentences, ok ? "" : " MISMATCH");
  }
  return detail;
}

Outcome table1() {
  fixtures::TempDir dir("acc-table1");
  const auto config = load_config(fixtures::data_dir() / "experiments" / "fixtures.json", {{}, dir.path(), {}, {}});
  const auto rows = cmd_ingest(config);
  const auto produced = data_rows(text::read_file((config.output_dir / "stats.tsv").string()));
  const auto pinned = data_rows(text::read_file((fixtures::data_dir() / "fixtures" / "stats.pinned.tsv").string()));
  bool pass = produced == pinned;
  std::string detail = fmt("%zu corpora match the pinned table%s", rows.size(), pass ? "" : " (MISMATCH)");
  for (const auto& r : rows)
    if (r.reduction != "none") detail += fmt("; %s reduced by %s", r.corpus.c_str(), r.reduction.c_str());
  detail += "; " + live_table1(pass);
  return {pass, detail};
}

Outcome replay() {
  const auto config_path = fixtures::data_dir() / "replay" / "lemmabench.json";
  fixtures::TempDir a("acc-replay-a"), b("acc-replay-b");
  const auto lexicon_source = fixtures::load(fixtures::corpora()[0]);
  auto transport = std::make_shared<fake::Transport>(
      std::make_shared<fake::Responder>(fake::build_lexicon({lexicon_source}), fake::ResponderOptions{}));
  const auto start = Clock::now();
  std::string outputs[2];
  std::vector<EvalReport> reports[2];
  std::size_t live = 0, sentences = 0;
  int i = 0;
  for (const auto* dir : {&a, &b}) {
    const auto c = load_config(config_path, {CacheMode::replay, dir->path(), {}, {}});
    cmd_ingest(c);
    cmd_split(c);
    cmd_induce(c);
    cmd_train_baseline(c);
    live += cmd_run(c, transport).live_calls;
    reports[i] = cmd_score(c).reports;
    for (const char* f : {"scores.tsv", "mcnemar.tsv", "report.txt"})
      outputs[i] += text::read_file((c.output_dir / "reports" / f).string());
    sentences = c.corpora[0].split.test_count;
    ++i;
  }
  const double secs = seconds_since(start);
  bool same_reports = reports[0].size() == reports[1].size() && !reports[0].empty();
  for (std::size_t k = 0; same_reports && k < reports[0].size(); ++k) {
    const auto &x = reports[0][k], &y = reports[1][k];
    same_reports = x.system_id == y.system_id && x.word_accuracy == y.word_accuracy &&
                   x.sentence_accuracy == y.sentence_accuracy && x.word.mean == y.word.mean &&
                   x.word.stddev == y.word.stddev && x.sentence.mean == y.sentence.mean &&
                   x.sentence.stddev == y.sentence.stddev && x.diagnostics.missing == y.diagnostics.missing &&
                   x.diagnostics.wrong == y.diagnostics.wrong && x.diagnostics.random == y.diagnostics.random;
  }
  const bool identical = outputs[0] == outputs[1];
  const std::size_t calls = live + transport->calls();
  return {identical && same_reports && calls == 0 && secs < kReplaySeconds && sentences >= kReplayMinSentences,
          fmt("2 invocations, %zu reports, reports %s, files %s, %zu network calls, %zu test sentences, %.2f s (limit %.0f s)",
              reports[0].size(), same_reports ? "equal" : "DIFFER", identical ? "byte-identical" : "DIFFER", calls,
              sentences, secs, kReplaySeconds)};
}

Outcome baseline_sanity() {
  fixtures::TempDir dir("acc-baseline");
  const auto c = load_config(fixtures::data_dir() / "experiments" / "fixtures.json", {{}, dir.path(), {}, {}});
  cmd_ingest(c);
  cmd_split(c);
  cmd_induce(c);
  cmd_train_baseline(c);
  bool pass = true;
  std::string detail;
  std::size_t checked_sentences = 0;
  for (const auto& cc : c.corpora) {
    const auto dev = ingest_tsv(c.output_dir / "splits" / (cc.name + ".dev.tsv"), cc.name, cc.language);
    std::ifstream model_in(c.output_dir / "models" / "baseline" / (cc.name + ".tsv"));
    const auto model = read_model(model_in, cc.name);
    std::vector<AlignedPrediction> base, identity;
    for (const auto& s : dev.sentences) {
      std::vector<std::string> forms;
      for (const auto& t : s.tokens) forms.push_back(t.wordform);
      identity.push_back(from_lemmas(s, forms));
      base.push_back(from_lemmas(s, predict(model, s)));
    }
    const double b = word_accuracy(base, dev), id = word_accuracy(identity, dev);
    pass = pass && b >= id;
    detail += fmt("%s dev %.4f vs identity %.4f; ", cc.name.c_str(), b, id);
    for (const auto& s : ingest_tsv(corpus_file(c, cc.name), cc.name, cc.language).sentences) {
      ++checked_sentences;
      if (predict(model, s).size() != s.tokens.size()) {
        pass = false;
        detail += "length mismatch in " + s.id + "; ";
      }
    }
  }
  detail += fmt("output length equals input length on %zu sentences", checked_sentences);
  return {pass, detail};
}

}  // namespace

int main() {
  report("edit-script round trip", round_trip);
  report("edit-script minimality", minimality);
  report("alignment taxonomy", alignment);
  report("metrics oracle", metrics);
  report("mcnemar", mcnemar_check);
  report("prompt fidelity", prompts);
  report("corpus statistics table", table1);
  report("offline replay determinism", replay);
  report("baseline sanity", baseline_sanity);
  return failures == 0 ? 0 : 1;
}
