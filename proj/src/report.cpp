#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "lemmabench/experiment.hpp"
#include "lemmabench/unicode.hpp"

namespace lemmabench {

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pvalue(double p) {
  char buf[64];
  if (p != 0.0 && p < 1e-4) std::snprintf(buf, sizeof buf, "%.3e", p);
  else std::snprintf(buf, sizeof buf, "%.6f", p);
  return buf;
}

void header(std::ostringstream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << '\n';
}

std::string pad(const std::string& s, std::size_t width, bool right = false) {
  const std::size_t len = unicode::length(s);
  if (len >= width) return s;
  const std::string fill(width - len, ' ');
  return right ? fill + s : s + fill;
}

// Renders rows as a space-aligned table; the first row is the header.
std::string layout(const std::vector<std::vector<std::string>>& rows, std::size_t left_cols) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], unicode::length(row[i]));
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i) line += "  ";
      line += pad(rows[r][i], width[i], i >= left_cols);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w;
      out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::string render_scores_tsv(const ScoreTable& table, const Metadata& meta) {
  std::ostringstream out;
  header(out, meta);
  out << "corpus\tsystem\tsplit\twacc_mean\twacc_std\tsentacc_mean\tsentacc_std\twacc_runs\tsentacc_runs\tmissing\twrong"
         "\trandom\n";
  for (const auto& r : table.reports) {
    std::string wr, sr;
    for (double v : r.word_accuracy) wr += (wr.empty() ? "" : ",") + fixed(v);
    for (double v : r.sentence_accuracy) sr += (sr.empty() ? "" : ",") + fixed(v);
    out << r.corpus_name << '\t' << r.system_id << '\t' << r.split << '\t' << fixed(r.word.mean) << '\t'
        << fixed(r.word.stddev) << '\t' << fixed(r.sentence.mean) << '\t' << fixed(r.sentence.stddev) << '\t' << wr
        << '\t' << sr << '\t' << r.diagnostics.missing << '\t' << r.diagnostics.wrong << '\t' << r.diagnostics.random
        << '\n';
  }
  return out.str();
}

std::string render_mcnemar_tsv(const ScoreTable& table, const Metadata& meta) {
  std::ostringstream out;
  header(out, meta);
  out << "corpus\tsystem_a\tsystem_b\tb01\tb10\ttest\tstatistic\tp_value\talpha\tsignificant\n";
  for (const auto& p : table.pairwise) {
    out << p.corpus << '\t' << p.system_a << '\t' << p.system_b << '\t' << p.test.b01 << '\t' << p.test.b10 << '\t'
        << (p.test.exact ? "exact" : "chi2") << '\t' << fixed(p.test.statistic) << '\t' << pvalue(p.test.p_value)
        << '\t' << fixed(p.test.alpha, 2) << '\t' << (p.test.significant() ? "yes" : "no") << '\n';
  }
  return out.str();
}

std::string render_report(const ScoreTable& table, const ExperimentConfig& config, const Metadata& meta) {
  std::ostringstream out;
  header(out, meta);
  out << '\n';

  std::vector<std::string> corpora;
  for (const auto& c : config.corpora) corpora.push_back(c.name);
  std::vector<std::string> systems;
  for (const auto& s : config.systems) {
    if (s.eval_split == "test") systems.push_back(s.id);
  }
  auto find = [&](const std::string& corpus, const std::string& system) -> const EvalReport* {
    for (const auto& r : table.reports)
      if (r.corpus_name == corpus && r.system_id == system && r.split == "test") return &r;
    return nullptr;
  };
  auto cell = [](const RunStats& s) { return fixed(s.mean * 100.0, 2) + " ± " + fixed(s.stddev * 100.0, 2); };

  for (const auto& [title, pick] :
       {std::pair<const char*, bool>{"Word accuracy (%), mean ± std over runs", true}, {"Sentence accuracy (%)", false}}) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> head{"corpus"};
    head.insert(head.end(), systems.begin(), systems.end());
    rows.push_back(head);
    for (const auto& corpus : corpora) {
      std::vector<std::string> row{corpus};
      auto best = table.best.find(corpus);
      for (const auto& system : systems) {
        const auto* r = find(corpus, system);
        if (!r) {
          row.emplace_back("-");
          continue;
        }
        std::string text = cell(pick ? r->word : r->sentence);
        if (pick && best != table.best.end() && best->second == system) {
          text += "^";
          if (table.best_significant.at(corpus)) text += "*";
        }
        row.push_back(text);
      }
      rows.push_back(row);
    }
    out << title << '\n' << layout(rows, 1) << '\n';
  }
  out << "^ best word accuracy per corpus; * best system significantly better than every other system (McNemar, run "
      << config.scoring.mcnemar_run << ", alpha " << fixed(config.scoring.alpha, 2) << ")\n\n";

  std::vector<std::vector<std::string>> diag{{"corpus", "system", "missing", "wrong", "random"}};
  for (const auto& r : table.reports)
    diag.push_back({r.corpus_name, r.system_id + (r.split == "test" ? "" : " (" + r.split + ")"),
                    std::to_string(r.diagnostics.missing), std::to_string(r.diagnostics.wrong),
                    std::to_string(r.diagnostics.random)});
  out << "Alignment diagnostics (summed over runs)\n" << layout(diag, 2) << '\n';

  std::vector<std::vector<std::string>> mc{{"corpus", "system A", "system B", "b01", "b10", "p", "sig"}};
  for (const auto& p : table.pairwise)
    mc.push_back({p.corpus, p.system_a, p.system_b, std::to_string(p.test.b01), std::to_string(p.test.b10),
                  pvalue(p.test.p_value), p.test.significant() ? "yes" : "no"});
  out << "Pairwise McNemar tests\n" << layout(mc, 3);
  return out.str();
}

std::string render_stats_table(const std::vector<CorpusStatsRow>& rows, const Metadata& meta) {
  std::ostringstream out;
  header(out, meta);
  out << '\n';
  std::vector<std::vector<std::string>> t{{"corpus", "language", "reduction", "tokens", "sentences"}};
  for (const auto& r : rows)
    t.push_back({r.corpus, r.language, r.reduction, std::to_string(r.stats.tokens), std::to_string(r.stats.sentences)});
  out << layout(t, 3);
  return out.str();
}

std::string render_stats_tsv(const std::vector<CorpusStatsRow>& rows, const Metadata& meta) {
  std::ostringstream out;
  header(out, meta);
  out << "corpus\tlanguage\treduction\ttokens\tsentences\n";
  for (const auto& r : rows)
    out << r.corpus << '\t' << r.language << '\t' << r.reduction << '\t' << r.stats.tokens << '\t' << r.stats.sentences
        << '\n';
  return out.str();
}

}  // namespace lemmabench
