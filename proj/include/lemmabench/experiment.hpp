#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lemmabench/corpus.hpp"
#include "lemmabench/eval.hpp"
#include "lemmabench/gateway.hpp"
#include "lemmabench/metadata.hpp"
#include "lemmabench/prompt.hpp"

namespace lemmabench {

struct ReductionConfig {
  std::size_t max_sentences = 900;
  SelectionRule rule = SelectionRule::first_n;
  std::uint64_t seed = 0;
};

struct CorpusConfig {
  std::string name;
  std::string language;       // ISO 639-1
  std::string language_name;  // English exonym used in prompts
  std::filesystem::path path;
  std::string format = "conllu";  // conllu | tsv
  std::optional<ReductionConfig> reduce;
  SplitSpec split;
};

enum class SystemKind { baseline, llm, external };

struct SystemConfig {
  std::string id;
  SystemKind kind = SystemKind::baseline;
  std::string eval_split = "test";  // which partition the system lemmatizes

  // baseline
  std::size_t max_suffix_len = 5;

  // llm
  ProviderConfig provider;
  PromptSpec prompt;
  std::string example_pool = "dev";
  std::map<std::string, std::filesystem::path> diagnostics;  // corpus -> prior dev-run sidecar
  int parallelism = 4;

  // external: corpus -> one file per run (a single file is reused for every run)
  std::map<std::string, std::vector<std::filesystem::path>> predictions;
};

struct ScoringConfig {
  MissingPolicy missing_policy = MissingPolicy::strict;
  int mcnemar_run = 0;
  double alpha = 0.05;
};

struct ExperimentConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this
  std::string config_hash;
  std::vector<CorpusConfig> corpora;
  std::vector<SystemConfig> systems;
  int runs = 3;
  ScoringConfig scoring;
  std::filesystem::path output_dir;
  CacheMode cache_mode = CacheMode::replay;
  std::filesystem::path cache_dir;

  const CorpusConfig& corpus(const std::string& name) const;
  const SystemConfig& system(const std::string& id) const;
};

/// Command-line overrides applied on top of the config file.
struct ConfigOverrides {
  std::optional<CacheMode> cache_mode;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<int> runs;
};

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir,
                              const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

std::string default_language_name(const std::string& iso_code);

/// Header fields shared by every output file.
Metadata base_metadata(const ExperimentConfig& config);

// Output layout under output_dir:
//   corpora/<corpus>.tsv                      ingested (and reduced) corpus
//   stats.tsv, stats.txt                      token/sentence table
//   splits/<corpus>.split, <corpus>.{train,dev,test}.tsv
//   inventory/<corpus>.tsv                    label inventory of the train split
//   models/<system>/<corpus>.tsv              baseline tables
//   predictions/<system>/<corpus>/run<r>.tsv  + run<r>.diag.json
//   reports/scores.tsv, reports/mcnemar.tsv, reports/report.txt
std::filesystem::path corpus_file(const ExperimentConfig& config, const std::string& corpus);
std::filesystem::path prediction_file(const ExperimentConfig& config, const std::string& system,
                                      const std::string& corpus, int run);
std::filesystem::path diagnostics_file(const ExperimentConfig& config, const std::string& system,
                                       const std::string& corpus, int run);

struct CorpusStatsRow {
  std::string corpus;
  std::string language;
  CorpusStats stats;
  std::string reduction;  // e.g. "first-n 900", "none"
};

std::vector<CorpusStatsRow> cmd_ingest(const ExperimentConfig& config);
void cmd_split(const ExperimentConfig& config);
void cmd_induce(const ExperimentConfig& config);
void cmd_train_baseline(const ExperimentConfig& config);

struct RunSummary {
  std::size_t prediction_files = 0;
  std::size_t failed_sentences = 0;
  std::size_t live_calls = 0;
  std::size_t cache_hits = 0;
  std::vector<std::string> issues;
  std::vector<std::string> prompt_fingerprints;  // run-0 fingerprints of every LLM request, in order
};

/// `transport` replaces the HTTP client (tests).
RunSummary cmd_run(const ExperimentConfig& config, std::shared_ptr<ChatTransport> transport = nullptr,
                   const std::vector<std::string>& only_systems = {});

struct PairwiseResult {
  std::string corpus;
  std::string system_a;
  std::string system_b;
  McNemarResult test;
};

struct ScoreTable {
  std::vector<EvalReport> reports;  // corpus-major, systems in config order
  std::vector<PairwiseResult> pairwise;
  std::map<std::string, std::string> best;               // corpus -> system id
  std::map<std::string, bool> best_significant;          // corpus -> best beats every other system
};

ScoreTable compute_scores(const ExperimentConfig& config);
ScoreTable cmd_score(const ExperimentConfig& config);
PairwiseResult cmd_compare(const ExperimentConfig& config, const std::string& corpus, const std::string& system_a,
                           const std::string& system_b);

std::string render_scores_tsv(const ScoreTable& table, const Metadata& meta);
std::string render_mcnemar_tsv(const ScoreTable& table, const Metadata& meta);
/// Text table: one row per corpus, WAcc/SentAcc per system plus a best
/// marker ('^') and a significance star.
std::string render_report(const ScoreTable& table, const ExperimentConfig& config, const Metadata& meta);
std::string render_stats_table(const std::vector<CorpusStatsRow>& rows, const Metadata& meta);
std::string render_stats_tsv(const std::vector<CorpusStatsRow>& rows, const Metadata& meta);

}  // namespace lemmabench
