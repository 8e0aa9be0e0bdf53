#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lemmabench/errors.hpp"
#include "lemmabench/experiment.hpp"
#include "lemmabench/text.hpp"

namespace fs = std::filesystem;
using namespace lemmabench;

namespace {

struct Options {
  std::string config = "lemmabench.json";
  std::string cache_mode;
  std::string output_dir;
  std::string cache_dir;
  int runs = 0;
  std::vector<std::string> systems;
  std::string corpus;
  std::string system_a;
  std::string system_b;
  std::string fingerprints;
};

ExperimentConfig load(const Options& o) {
  ConfigOverrides ov;
  if (!o.cache_mode.empty()) ov.cache_mode = parse_cache_mode(o.cache_mode);
  if (!o.output_dir.empty()) ov.output_dir = fs::absolute(o.output_dir);
  if (!o.cache_dir.empty()) ov.cache_dir = fs::absolute(o.cache_dir);
  if (o.runs > 0) ov.runs = o.runs;
  return load_config(o.config, ov);
}

void print_scores(const ScoreTable& table) {
  for (const auto& r : table.reports) {
    std::printf("%-16s %-20s %-5s WAcc %.4f ± %.4f  SentAcc %.4f ± %.4f\n", r.corpus_name.c_str(), r.system_id.c_str(),
                r.split.c_str(), r.word.mean, r.word.stddev, r.sentence.mean, r.sentence.stddev);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lemmabench: contextual lemmatization experiments"};
  app.require_subcommand(1);
  Options o;
  app.add_option("-c,--config", o.config, "experiment config (JSON)")->capture_default_str();
  app.add_option("--cache-mode", o.cache_mode, "override cache mode")
      ->check(CLI::IsMember({"live", "record", "replay"}));
  app.add_option("-o,--output-dir", o.output_dir, "override output directory");
  app.add_option("--cache-dir", o.cache_dir, "override response cache directory");
  app.add_option("--runs", o.runs, "override number of runs")->check(CLI::PositiveNumber);

  auto* ingest = app.add_subcommand("ingest", "read corpora, apply reductions, write the stats table");
  auto* split = app.add_subcommand("split", "partition ingested corpora into train/dev/test");
  auto* induce = app.add_subcommand("induce", "induce the edit-script inventory from each train split");
  auto* train = app.add_subcommand("train-baseline", "train the suffix-backoff baseline");
  auto* run = app.add_subcommand("run", "produce predictions for every system, corpus and run");
  run->add_option("-s,--system", o.systems, "restrict to these system ids");
  run->add_option("--fingerprints", o.fingerprints, "write run-0 request fingerprints to this file");
  auto* score = app.add_subcommand("score", "score predictions and write reports/");
  auto* compare = app.add_subcommand("compare", "McNemar test between two systems on one corpus");
  compare->add_option("corpus", o.corpus)->required();
  compare->add_option("system_a", o.system_a)->required();
  compare->add_option("system_b", o.system_b)->required();
  auto* report = app.add_subcommand("report", "score and print the report table");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = load(o);
    if (ingest->parsed()) {
      for (const auto& row : cmd_ingest(config))
        std::printf("%-16s %-3s tokens %zu sentences %zu (%s)\n", row.corpus.c_str(), row.language.c_str(),
                    row.stats.tokens, row.stats.sentences, row.reduction.c_str());
    } else if (split->parsed()) {
      cmd_split(config);
    } else if (induce->parsed()) {
      cmd_induce(config);
    } else if (train->parsed()) {
      cmd_train_baseline(config);
    } else if (run->parsed()) {
      const auto summary = cmd_run(config, nullptr, o.systems);
      if (!o.fingerprints.empty())
        text::write_file(o.fingerprints, text::join(summary.prompt_fingerprints, "\n") + "\n");
      for (const auto& issue : summary.issues) std::fprintf(stderr, "warning: %s\n", issue.c_str());
      std::printf("prediction files %zu, failed sentences %zu, live calls %zu, cache hits %zu\n",
                  summary.prediction_files, summary.failed_sentences, summary.live_calls, summary.cache_hits);
    } else if (score->parsed()) {
      print_scores(cmd_score(config));
    } else if (compare->parsed()) {
      const auto r = cmd_compare(config, o.corpus, o.system_a, o.system_b);
      std::printf("%s: %s vs %s  b01 %zu  b10 %zu  %s statistic %.4f  p %.6g  %s at alpha %.2f\n", r.corpus.c_str(),
                  r.system_a.c_str(), r.system_b.c_str(), r.test.b01, r.test.b10, r.test.exact ? "exact" : "chi2",
                  r.test.statistic, r.test.p_value, r.test.significant() ? "significant" : "not significant",
                  r.test.alpha);
    } else if (report->parsed()) {
      cmd_score(config);
      std::cout << text::read_file((config.output_dir / "reports" / "report.txt").string());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
