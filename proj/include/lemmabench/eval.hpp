#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lemmabench/align.hpp"
#include "lemmabench/corpus.hpp"

namespace lemmabench {

/// strict: a MISSING token is an incorrect lemma.
/// renormalize: MISSING tokens are left out of the denominator.
enum class MissingPolicy { strict, renormalize };

std::string_view to_string(MissingPolicy p);
MissingPolicy parse_missing_policy(std::string_view text);

/// Per-token correctness in gold order over annotated gold tokens. Under
/// renormalize, MISSING tokens are dropped, so vectors from different systems
/// may differ in length.
std::vector<bool> token_correctness(const std::vector<AlignedPrediction>& predictions, const Corpus& gold,
                                    MissingPolicy policy = MissingPolicy::strict);

double word_accuracy(const std::vector<AlignedPrediction>& predictions, const Corpus& gold,
                     MissingPolicy policy = MissingPolicy::strict);
double sentence_accuracy(const std::vector<AlignedPrediction>& predictions, const Corpus& gold,
                         MissingPolicy policy = MissingPolicy::strict);

struct RunStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

RunStats aggregate_runs(std::span<const double> values);

struct McNemarResult {
  std::size_t b01 = 0;  // A wrong, B right
  std::size_t b10 = 0;  // A right, B wrong
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool exact = true;  // binomial branch used
  bool significant() const noexcept { return p_value < alpha; }
};

/// Two-sided exact binomial p-value for the discordant counts.
double mcnemar_exact_p(std::size_t b01, std::size_t b10);
/// Chi-square (1 df) p-value with continuity correction, clamped at zero.
double mcnemar_chi2_statistic(std::size_t b01, std::size_t b10);
double mcnemar_chi2_p(std::size_t b01, std::size_t b10);

/// Exact test below 25 discordant pairs, chi-square approximation otherwise.
McNemarResult mcnemar(std::size_t b01, std::size_t b10, double alpha = 0.05);
McNemarResult mcnemar(const std::vector<bool>& a_correct, const std::vector<bool>& b_correct, double alpha = 0.05);

struct DiagnosticTotals {
  std::size_t missing = 0;
  std::size_t wrong = 0;
  std::size_t random = 0;
};

struct EvalReport {
  std::string system_id;
  std::string corpus_name;
  std::string split = "test";
  std::vector<double> word_accuracy;  // per run
  std::vector<double> sentence_accuracy;
  RunStats word;
  RunStats sentence;
  DiagnosticTotals diagnostics;  // summed over runs
};

EvalReport make_report(std::string system_id, std::string corpus_name, std::vector<double> word_acc,
                       std::vector<double> sent_acc, DiagnosticTotals totals);

}  // namespace lemmabench
