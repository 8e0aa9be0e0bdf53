#include "lemmabench/eval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lemmabench/errors.hpp"

namespace lemmabench {

std::string_view to_string(MissingPolicy p) { return p == MissingPolicy::strict ? "strict" : "renormalize"; }

MissingPolicy parse_missing_policy(std::string_view text) {
  if (text == "strict") return MissingPolicy::strict;
  if (text == "renormalize") return MissingPolicy::renormalize;
  throw ConfigError("unknown missing-token policy '" + std::string(text) + "' (expected strict or renormalize)");
}

namespace {

// Walks gold sentences with their matching predictions; calls
// visit(sentence, prediction) in gold order.
template <typename Visit>
void for_each_pair(const std::vector<AlignedPrediction>& predictions, const Corpus& gold, Visit&& visit) {
  std::unordered_map<std::string_view, const AlignedPrediction*> by_id;
  for (const auto& p : predictions) by_id.emplace(p.sentence_id, &p);
  std::vector<std::string> absent;
  for (const auto& s : gold.sentences)
    if (!by_id.contains(s.id)) absent.push_back(s.id);
  if (!absent.empty()) {
    std::string msg = "predictions missing for " + std::to_string(absent.size()) + " sentence(s) of " + gold.name + ":";
    for (std::size_t i = 0; i < absent.size() && i < 10; ++i) msg += " " + absent[i];
    if (absent.size() > 10) msg += " ...";
    throw Error(msg);
  }
  for (const auto& s : gold.sentences) {
    const auto& p = *by_id.at(s.id);
    if (p.lemmas.size() != s.tokens.size())
      throw Error("prediction for " + s.id + " has " + std::to_string(p.lemmas.size()) + " token(s), gold has " +
                  std::to_string(s.tokens.size()));
    visit(s, p);
  }
}

bool is_correct(const Token& gold, const std::optional<std::string>& predicted) {
  return predicted && gold.lemma && *predicted == *gold.lemma;
}

}  // namespace

std::vector<bool> token_correctness(const std::vector<AlignedPrediction>& predictions, const Corpus& gold,
                                    MissingPolicy policy) {
  std::vector<bool> out;
  for_each_pair(predictions, gold, [&](const Sentence& s, const AlignedPrediction& p) {
    for (std::size_t k = 0; k < s.tokens.size(); ++k) {
      if (!s.tokens[k].lemma) continue;
      if (policy == MissingPolicy::renormalize && !p.lemmas[k]) continue;
      out.push_back(is_correct(s.tokens[k], p.lemmas[k]));
    }
  });
  return out;
}

double word_accuracy(const std::vector<AlignedPrediction>& predictions, const Corpus& gold, MissingPolicy policy) {
  const auto correct = token_correctness(predictions, gold, policy);
  if (correct.empty()) return 0.0;
  return static_cast<double>(std::count(correct.begin(), correct.end(), true)) / static_cast<double>(correct.size());
}

double sentence_accuracy(const std::vector<AlignedPrediction>& predictions, const Corpus& gold, MissingPolicy policy) {
  std::size_t total = 0, correct = 0;
  for_each_pair(predictions, gold, [&](const Sentence& s, const AlignedPrediction& p) {
    ++total;
    bool all = true;
    for (std::size_t k = 0; k < s.tokens.size() && all; ++k) {
      if (!s.tokens[k].lemma) continue;
      if (policy == MissingPolicy::renormalize && !p.lemmas[k]) continue;
      all = is_correct(s.tokens[k], p.lemmas[k]);
    }
    if (all) ++correct;
  });
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

RunStats aggregate_runs(std::span<const double> values) {
  if (values.empty()) throw Error("cannot aggregate zero runs");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

double mcnemar_exact_p(std::size_t b01, std::size_t b10) {
  const std::size_t n = b01 + b10;
  if (n == 0) return 1.0;
  const std::size_t k = std::min(b01, b10);
  const double log_half_n = static_cast<double>(n) * std::log(0.5);
  const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
  double tail = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    const double log_pmf = lg_n1 - std::lgamma(static_cast<double>(i) + 1.0) -
                           std::lgamma(static_cast<double>(n - i) + 1.0) + log_half_n;
    tail += std::exp(log_pmf);
  }
  return std::min(1.0, 2.0 * tail);
}

double mcnemar_chi2_statistic(std::size_t b01, std::size_t b10) {
  const std::size_t n = b01 + b10;
  if (n == 0) return 0.0;
  const double diff = std::abs(static_cast<double>(b01) - static_cast<double>(b10));
  const double corrected = std::max(0.0, diff - 1.0);
  return corrected * corrected / static_cast<double>(n);
}

double mcnemar_chi2_p(std::size_t b01, std::size_t b10) {
  return std::erfc(std::sqrt(mcnemar_chi2_statistic(b01, b10) / 2.0));
}

McNemarResult mcnemar(std::size_t b01, std::size_t b10, double alpha) {
  McNemarResult r;
  r.b01 = b01;
  r.b10 = b10;
  r.alpha = alpha;
  r.statistic = mcnemar_chi2_statistic(b01, b10);
  r.exact = b01 + b10 < 25;
  r.p_value = r.exact ? mcnemar_exact_p(b01, b10) : mcnemar_chi2_p(b01, b10);
  return r;
}

McNemarResult mcnemar(const std::vector<bool>& a, const std::vector<bool>& b, double alpha) {
  if (a.size() != b.size())
    throw Error("McNemar needs paired correctness vectors, got " + std::to_string(a.size()) + " and " +
                std::to_string(b.size()));
  std::size_t b01 = 0, b10 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i] && b[i]) ++b01;
    if (a[i] && !b[i]) ++b10;
  }
  return mcnemar(b01, b10, alpha);
}

EvalReport make_report(std::string system_id, std::string corpus_name, std::vector<double> word_acc,
                       std::vector<double> sent_acc, DiagnosticTotals totals) {
  EvalReport r;
  r.system_id = std::move(system_id);
  r.corpus_name = std::move(corpus_name);
  r.word = aggregate_runs(word_acc);
  r.sentence = aggregate_runs(sent_acc);
  r.word_accuracy = std::move(word_acc);
  r.sentence_accuracy = std::move(sent_acc);
  r.diagnostics = totals;
  return r;
}

}  // namespace lemmabench
