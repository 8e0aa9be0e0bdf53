#include "lemmabench/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "lemmabench/align.hpp"
#include "lemmabench/baseline.hpp"
#include "lemmabench/editscript.hpp"
#include "lemmabench/errors.hpp"
#include "lemmabench/text.hpp"

namespace lemmabench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormatVersion = "lemmabench experiment v1";
// Diagnostics reference to another system's run 0 in the same output dir.
constexpr std::string_view kSystemRef = "system:";

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for '" + std::string(key) + "' in " + where);
  }
}

template <typename T>
T require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing '" + std::string(key) + "' in " + where);
  return get_or<T>(obj, key, T{}, where);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

CorpusConfig parse_corpus(const json& j, const fs::path& base) {
  const std::string where = "corpus entry";
  check_keys(j, where, {"name", "language", "language_name", "path", "format", "reduce", "split"});
  CorpusConfig c;
  c.name = require<std::string>(j, "name", where);
  const std::string w = "corpus '" + c.name + "'";
  c.language = require<std::string>(j, "language", w);
  c.language_name = get_or<std::string>(j, "language_name", default_language_name(c.language), w);
  if (c.language_name.empty()) throw ConfigError(w + " needs language_name (no default for '" + c.language + "')");
  c.path = resolve(base, require<std::string>(j, "path", w));
  c.format = get_or<std::string>(j, "format", "conllu", w);
  if (c.format != "conllu" && c.format != "tsv") throw ConfigError(w + ": format must be conllu or tsv");
  if (j.contains("reduce")) {
    const auto& r = j.at("reduce");
    check_keys(r, w + " reduce", {"max_sentences", "rule", "seed"});
    ReductionConfig red;
    red.max_sentences = get_or<std::size_t>(r, "max_sentences", 900, w);
    red.rule = parse_selection_rule(get_or<std::string>(r, "rule", "first-n", w));
    red.seed = get_or<std::uint64_t>(r, "seed", 0, w);
    c.reduce = red;
  }
  const auto& s = j.contains("split") ? j.at("split") : json::object();
  check_keys(s, w + " split", {"train", "dev", "test", "rule", "seed"});
  c.split.train_count = get_or<std::size_t>(s, "train", 0, w);
  c.split.dev_count = get_or<std::size_t>(s, "dev", 0, w);
  c.split.test_count = get_or<std::size_t>(s, "test", 0, w);
  c.split.rule = parse_selection_rule(get_or<std::string>(s, "rule", "first-n", w));
  c.split.seed = get_or<std::uint64_t>(s, "seed", 0, w);
  return c;
}

void check_split_name(const std::string& split, const std::string& where) {
  if (split != "train" && split != "dev" && split != "test")
    throw ConfigError(where + ": split must be train, dev or test, got '" + split + "'");
}

SystemConfig parse_system(const json& j, const fs::path& base, int runs) {
  SystemConfig s;
  s.id = require<std::string>(j, "id", "system entry");
  const std::string w = "system '" + s.id + "'";
  const auto type = require<std::string>(j, "type", w);
  s.eval_split = get_or<std::string>(j, "split", "test", w);
  check_split_name(s.eval_split, w);
  if (type == "baseline") {
    check_keys(j, w, {"id", "type", "split", "max_suffix_len"});
    s.kind = SystemKind::baseline;
    s.max_suffix_len = get_or<std::size_t>(j, "max_suffix_len", 5, w);
    if (s.max_suffix_len == 0) throw ConfigError(w + ": max_suffix_len must be >= 1");
  } else if (type == "llm") {
    check_keys(j, w, {"id", "type", "split", "provider", "prompt", "diagnostics", "parallelism"});
    s.kind = SystemKind::llm;
    const auto& p = j.contains("provider") ? j.at("provider") : throw ConfigError(w + " needs a provider");
    check_keys(p, w + " provider", {"base_url", "model", "api_key_env", "sampling", "timeout_s", "max_retries"});
    s.provider.base_url = require<std::string>(p, "base_url", w);
    s.provider.model_id = require<std::string>(p, "model", w);
    s.provider.api_key_env = get_or<std::string>(p, "api_key_env", "", w);
    s.provider.sampling = p.contains("sampling") ? p.at("sampling") : json::object();
    s.provider.timeout = std::chrono::seconds(get_or<int>(p, "timeout_s", 120, w));
    s.provider.max_retries = get_or<int>(p, "max_retries", 3, w);
    s.provider.validate();

    const auto& q = j.contains("prompt") ? j.at("prompt") : json::object();
    check_keys(q, w + " prompt", {"template", "input_mode", "k", "selection", "seed", "manual_ids", "manual_ids_file", "pool"});
    s.prompt = default_prompt_spec("English");
    s.prompt.tmpl = parse_template(get_or<std::string>(q, "template", "basic", w));
    s.prompt.input_mode = parse_input_mode(get_or<std::string>(q, "input_mode", "word-list", w));
    s.prompt.k = get_or<std::size_t>(q, "k", 4, w);
    s.prompt.selection = parse_selection_strategy(get_or<std::string>(q, "selection", "most-errors", w));
    s.prompt.seed = get_or<std::uint64_t>(q, "seed", 0, w);
    if (q.contains("manual_ids")) s.prompt.manual_ids = get_or<std::vector<std::string>>(q, "manual_ids", {}, w);
    if (q.contains("manual_ids_file"))
      s.prompt.manual_ids = read_id_list(text::read_file(resolve(base, q.at("manual_ids_file").get<std::string>()).string()));
    s.example_pool = get_or<std::string>(q, "pool", "dev", w);
    check_split_name(s.example_pool, w + " prompt pool");
    if (s.prompt.k > 5) throw ConfigError(w + ": k must be in [0, 5]");

    if (j.contains("diagnostics")) {
      for (const auto& [corpus, value] : j.at("diagnostics").items()) {
        const auto ref = value.get<std::string>();
        s.diagnostics.emplace(corpus, ref.rfind(kSystemRef, 0) == 0 ? fs::path(ref) : resolve(base, ref));
      }
    }
    s.parallelism = get_or<int>(j, "parallelism", 4, w);
    if (s.parallelism < 1) throw ConfigError(w + ": parallelism must be >= 1");
  } else if (type == "external") {
    check_keys(j, w, {"id", "type", "split", "predictions"});
    s.kind = SystemKind::external;
    if (!j.contains("predictions")) throw ConfigError(w + " needs predictions");
    for (const auto& [corpus, value] : j.at("predictions").items()) {
      std::vector<fs::path> paths;
      if (value.is_string()) {
        paths.push_back(resolve(base, value.get<std::string>()));
      } else if (value.is_array()) {
        for (const auto& v : value) paths.push_back(resolve(base, v.get<std::string>()));
      } else {
        throw ConfigError(w + ": predictions for '" + corpus + "' must be a path or a list of paths");
      }
      if (paths.size() != 1 && paths.size() != static_cast<std::size_t>(runs))
        throw ConfigError(w + ": predictions for '" + corpus + "' list " + std::to_string(paths.size()) +
                          " file(s); expected 1 or one per run (" + std::to_string(runs) + ")");
      s.predictions.emplace(corpus, std::move(paths));
    }
  } else {
    throw ConfigError(w + ": unknown type '" + type + "' (expected baseline, llm or external)");
  }
  return s;
}

}  // namespace

std::string default_language_name(const std::string& iso) {
  static const std::map<std::string, std::string> names = {
      {"cs", "Czech"},   {"de", "German"},  {"en", "English"},   {"es", "Spanish"}, {"eu", "Basque"},
      {"fi", "Finnish"}, {"fr", "French"},  {"is", "Icelandic"}, {"it", "Italian"}, {"pl", "Polish"},
      {"ru", "Russian"}, {"sv", "Swedish"}, {"tr", "Turkish"}};
  auto it = names.find(iso);
  return it == names.end() ? std::string() : it->second;
}

const CorpusConfig& ExperimentConfig::corpus(const std::string& name) const {
  for (const auto& c : corpora)
    if (c.name == name) return c;
  throw ConfigError("unknown corpus '" + name + "'");
}

const SystemConfig& ExperimentConfig::system(const std::string& id) const {
  for (const auto& s : systems)
    if (s.id == id) return s;
  throw ConfigError("unknown system '" + id + "'");
}

ExperimentConfig parse_config(const std::string& json_text, const fs::path& base_dir, const ConfigOverrides& overrides) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config", {"format", "output_dir", "runs", "cache", "scoring", "corpora", "systems"});
  if (j.value("format", kFormatVersion) != std::string(kFormatVersion))
    throw ConfigError("unsupported config format '" + j.value("format", "") + "'");

  ExperimentConfig c;
  c.base_dir = base_dir;
  {
    json hashed = j;
    hashed.erase("output_dir");
    if (hashed.contains("cache")) hashed["cache"].erase("dir");
    c.config_hash = sha256_hex(hashed.dump()).substr(0, 16);
  }
  c.runs = overrides.runs.value_or(get_or<int>(j, "runs", 3, "config"));
  if (c.runs < 1) throw ConfigError("runs must be >= 1");
  c.output_dir = overrides.output_dir.value_or(resolve(base_dir, get_or<std::string>(j, "output_dir", "out", "config")));

  const auto& cache = j.contains("cache") ? j.at("cache") : json::object();
  check_keys(cache, "cache", {"mode", "dir"});
  c.cache_mode = overrides.cache_mode.value_or(parse_cache_mode(get_or<std::string>(cache, "mode", "replay", "cache")));
  c.cache_dir = overrides.cache_dir.value_or(resolve(base_dir, get_or<std::string>(cache, "dir", "cache", "cache")));

  const auto& scoring = j.contains("scoring") ? j.at("scoring") : json::object();
  check_keys(scoring, "scoring", {"missing_policy", "mcnemar_run", "alpha"});
  c.scoring.missing_policy = parse_missing_policy(get_or<std::string>(scoring, "missing_policy", "strict", "scoring"));
  c.scoring.mcnemar_run = get_or<int>(scoring, "mcnemar_run", 0, "scoring");
  c.scoring.alpha = get_or<double>(scoring, "alpha", 0.05, "scoring");
  if (c.scoring.mcnemar_run < 0 || c.scoring.mcnemar_run >= c.runs)
    throw ConfigError("scoring.mcnemar_run must be in [0, runs)");
  if (!(c.scoring.alpha > 0.0 && c.scoring.alpha < 1.0)) throw ConfigError("scoring.alpha must be in (0, 1)");

  if (!j.contains("corpora") || !j.at("corpora").is_array() || j.at("corpora").empty())
    throw ConfigError("config lists no corpora");
  std::set<std::string> names;
  for (const auto& e : j.at("corpora")) {
    c.corpora.push_back(parse_corpus(e, base_dir));
    if (!names.insert(c.corpora.back().name).second)
      throw ConfigError("duplicate corpus name '" + c.corpora.back().name + "'");
  }
  if (!j.contains("systems") || !j.at("systems").is_array() || j.at("systems").empty())
    throw ConfigError("config lists no systems");
  std::set<std::string> ids;
  for (const auto& e : j.at("systems")) {
    c.systems.push_back(parse_system(e, base_dir, c.runs));
    if (!ids.insert(c.systems.back().id).second) throw ConfigError("duplicate system id '" + c.systems.back().id + "'");
  }
  for (const auto& s : c.systems) {
    for (const auto& [corpus, _] : s.predictions) c.corpus(corpus);
    for (const auto& [corpus, ref] : s.diagnostics) {
      c.corpus(corpus);
      const auto r = ref.string();
      if (r.rfind(kSystemRef, 0) == 0) c.system(r.substr(kSystemRef.size()));
    }
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path, const ConfigOverrides& overrides) {
  std::string contents;
  try {
    contents = text::read_file(path.string());
  } catch (const Error&) {
    throw ConfigError("cannot read config " + path.string());
  }
  return parse_config(contents, fs::absolute(path).parent_path(), overrides);
}

Metadata base_metadata(const ExperimentConfig& c) {
  return {{"tool", "lemmabench 1"},
          {"config_hash", c.config_hash},
          {"cache_mode", std::string(to_string(c.cache_mode))},
          {"runs", std::to_string(c.runs)},
          {"missing_policy", std::string(to_string(c.scoring.missing_policy))},
          {"mcnemar_run", std::to_string(c.scoring.mcnemar_run)},
          {"templates", template_id(PromptTemplate::basic) + "," + template_id(PromptTemplate::full)}};
}

fs::path corpus_file(const ExperimentConfig& c, const std::string& corpus) {
  return c.output_dir / "corpora" / (corpus + ".tsv");
}

fs::path prediction_file(const ExperimentConfig& c, const std::string& system, const std::string& corpus, int run) {
  return c.output_dir / "predictions" / system / corpus / ("run" + std::to_string(run) + ".tsv");
}

fs::path diagnostics_file(const ExperimentConfig& c, const std::string& system, const std::string& corpus, int run) {
  return c.output_dir / "predictions" / system / corpus / ("run" + std::to_string(run) + ".diag.json");
}

namespace {

fs::path manifest_file(const ExperimentConfig& c, const std::string& corpus) {
  return c.output_dir / "splits" / (corpus + ".split");
}

Corpus load_ingested(const ExperimentConfig& c, const CorpusConfig& cc) {
  const auto path = corpus_file(c, cc.name);
  if (!fs::exists(path)) throw ConfigError("corpus '" + cc.name + "' has not been ingested; run `lemmabench ingest` first");
  return ingest_tsv(path, cc.name, cc.language);
}

Splits load_splits(const ExperimentConfig& c, const CorpusConfig& cc) {
  const auto path = manifest_file(c, cc.name);
  if (!fs::exists(path)) throw ConfigError("corpus '" + cc.name + "' has no split manifest; run `lemmabench split` first");
  std::ifstream in(path, std::ios::binary);
  return apply_manifest(load_ingested(c, cc), read_manifest(in, path.string()));
}

const Corpus& pick(const Splits& s, const std::string& split) {
  if (split == "train") return s.train;
  if (split == "dev") return s.dev;
  return s.test;
}

std::string reduction_label(const CorpusConfig& cc) {
  if (!cc.reduce) return "none";
  std::string out = std::string(to_string(cc.reduce->rule)) + " " + std::to_string(cc.reduce->max_sentences);
  if (cc.reduce->rule == SelectionRule::seeded_random) out += " seed " + std::to_string(cc.reduce->seed);
  return out;
}

template <typename Writer>
void write_stream(const fs::path& path, Writer&& writer) {
  std::ostringstream ss;
  writer(ss);
  text::write_file(path.string(), ss.str());
}

LabelInventory inventory_for(const Splits& splits, const CorpusConfig& cc) {
  if (splits.train.empty()) throw ConfigError("corpus '" + cc.name + "' has an empty train split");
  return build_inventory(splits.train);
}

}  // namespace

std::vector<CorpusStatsRow> cmd_ingest(const ExperimentConfig& c) {
  if (c.corpora.empty()) throw ConfigError("config lists no corpora");
  std::vector<CorpusStatsRow> rows;
  for (const auto& cc : c.corpora) {
    Corpus corpus = cc.format == "conllu" ? ingest_conllu(cc.path, cc.name, cc.language)
                                          : ingest_tsv(cc.path, cc.name, cc.language);
    if (cc.reduce) corpus = reduce(corpus, cc.reduce->max_sentences, cc.reduce->rule, cc.reduce->seed);
    auto meta = base_metadata(c);
    meta.emplace_back("corpus", cc.name);
    meta.emplace_back("source", cc.path.filename().string());
    meta.emplace_back("reduction", reduction_label(cc));
    write_stream(corpus_file(c, cc.name), [&](std::ostream& os) { write_tsv(corpus, os, meta); });
    rows.push_back({cc.name, cc.language, corpus_stats(corpus), reduction_label(cc)});
  }
  const auto meta = base_metadata(c);
  text::write_file((c.output_dir / "stats.tsv").string(), render_stats_tsv(rows, meta));
  text::write_file((c.output_dir / "stats.txt").string(), render_stats_table(rows, meta));
  return rows;
}

void cmd_split(const ExperimentConfig& c) {
  for (const auto& cc : c.corpora) {
    const Corpus corpus = load_ingested(c, cc);
    const Splits splits = make_splits(corpus, cc.split);
    auto meta = base_metadata(c);
    meta.emplace_back("corpus", cc.name);
    write_stream(manifest_file(c, cc.name),
                 [&](std::ostream& os) { write_manifest(manifest_for(splits, cc.name, cc.split), os, meta); });
    for (const auto& [part, name] : {std::pair{&splits.train, "train"}, {&splits.dev, "dev"}, {&splits.test, "test"}}) {
      auto m = meta;
      m.emplace_back("split", name);
      write_stream(c.output_dir / "splits" / (cc.name + "." + name + ".tsv"),
                   [&](std::ostream& os) { write_tsv(*part, os, m); });
    }
  }
}

void cmd_induce(const ExperimentConfig& c) {
  for (const auto& cc : c.corpora) {
    const auto inv = inventory_for(load_splits(c, cc), cc);
    auto meta = base_metadata(c);
    meta.emplace_back("corpus", cc.name);
    meta.emplace_back("split", "train");
    write_stream(c.output_dir / "inventory" / (cc.name + ".tsv"),
                 [&](std::ostream& os) { write_inventory(inv, os, meta); });
  }
}

void cmd_train_baseline(const ExperimentConfig& c) {
  for (const auto& s : c.systems) {
    if (s.kind != SystemKind::baseline) continue;
    for (const auto& cc : c.corpora) {
      const auto splits = load_splits(c, cc);
      const auto model = train_baseline(splits.train, inventory_for(splits, cc), {s.max_suffix_len});
      auto meta = base_metadata(c);
      meta.emplace_back("system", s.id);
      meta.emplace_back("corpus", cc.name);
      write_stream(c.output_dir / "models" / s.id / (cc.name + ".tsv"),
                   [&](std::ostream& os) { write_model(model, os, meta); });
    }
  }
}

namespace {

struct SystemRun {
  std::vector<std::vector<AlignedPrediction>> runs;
  std::vector<std::vector<Issue>> issues;  // per run
  Metadata meta;
};

SystemRun run_baseline(const ExperimentConfig& c, const SystemConfig& s, const CorpusConfig& cc, const Splits& splits) {
  const auto model = train_baseline(splits.train, inventory_for(splits, cc), {s.max_suffix_len});
  std::vector<AlignedPrediction> preds;
  for (const auto& sentence : pick(splits, s.eval_split).sentences)
    preds.push_back(from_lemmas(sentence, predict(model, sentence)));
  SystemRun out;
  out.runs.assign(static_cast<std::size_t>(c.runs), preds);
  out.issues.resize(static_cast<std::size_t>(c.runs));
  out.meta = {{"max_suffix_len", std::to_string(s.max_suffix_len)}};
  return out;
}

SystemRun run_external(const ExperimentConfig& c, const SystemConfig& s, const CorpusConfig& cc, const Splits& splits) {
  auto it = s.predictions.find(cc.name);
  if (it == s.predictions.end())
    throw ConfigError("external system '" + s.id + "' has no predictions for corpus '" + cc.name + "'");
  SystemRun out;
  for (int r = 0; r < c.runs; ++r) {
    const auto& path = it->second.size() == 1 ? it->second.front() : it->second[static_cast<std::size_t>(r)];
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open external predictions " + path.string());
    const auto file = read_prediction_file(in, path.string());
    std::vector<Issue> issues;
    out.runs.push_back(import_external_predictions(file, pick(splits, s.eval_split), issues));
    out.issues.push_back(std::move(issues));
  }
  std::string sources;
  for (const auto& p : it->second) sources += (sources.empty() ? "" : ",") + p.filename().string();
  out.meta = {{"external_source", sources}};
  return out;
}

DevDiagnostics load_dev_diagnostics(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("diagnostics file not found: " + path.string());
  const auto run = diagnostics_from_json(text::read_file(path.string()), path.string());
  DevDiagnostics d;
  for (const auto& s : run.sentences) d[s.id] = s.total_errors();
  return d;
}

SystemRun run_llm(const ExperimentConfig& c, const SystemConfig& s, const CorpusConfig& cc, const Splits& splits,
                  LlmGateway& gateway, RunSummary& summary) {
  PromptSpec spec = s.prompt;
  spec.language_name = cc.language_name;
  std::optional<DevDiagnostics> diag;
  if (spec.k > 0 && spec.selection == SelectionStrategy::most_errors) {
    auto it = s.diagnostics.find(cc.name);
    if (it == s.diagnostics.end())
      throw ConfigError("system '" + s.id + "' uses most-errors selection but lists no diagnostics for '" + cc.name + "'");
    const auto ref = it->second.string();
    if (ref.rfind(kSystemRef, 0) == 0) {
      const auto& source = c.system(ref.substr(kSystemRef.size()));
      if (source.eval_split != s.example_pool)
        throw ConfigError("system '" + s.id + "' takes diagnostics from '" + source.id + "', which is evaluated on " +
                          source.eval_split + ", not on the example pool (" + s.example_pool + ")");
      diag = load_dev_diagnostics(diagnostics_file(c, source.id, cc.name, 0));
    } else {
      diag = load_dev_diagnostics(it->second);
    }
  }
  const auto examples = select_examples(spec, pick(splits, s.example_pool), diag ? &*diag : nullptr);
  const Corpus& target = pick(splits, s.eval_split);
  std::vector<std::string> prompts;
  for (const auto& sentence : target.sentences) prompts.push_back(render_prompt(spec, examples, sentence));

  const auto batch = gateway.run_batch(s.provider, prompts, c.runs, s.parallelism);
  // A replay with holes would score the holes as MISSING; refuse instead.
  std::size_t misses = 0;
  const BatchItem* first_miss = nullptr;
  for (const auto& run : batch.runs)
    for (const auto& item : run)
      if (item.cache_miss && !misses++) first_miss = &item;
  if (misses)
    throw CacheMissError(std::to_string(misses) + " request(s) of system '" + s.id + "' on '" + cc.name +
                         "' are not in the response cache (first: " + first_miss->error +
                         "); record them with --cache-mode record");
  SystemRun out;
  for (const auto& run : batch.runs) {
    std::vector<AlignedPrediction> preds;
    for (const auto& item : run) {
      const auto& sentence = target.sentences[item.prompt_index];
      if (item.response) {
        if (item.response->origin == ResponseOrigin::cache) ++summary.cache_hits;
        if (item.run_index == 0) summary.prompt_fingerprints.push_back(item.response->request_fingerprint);
        preds.push_back(align_text(item.response->raw_text, sentence));
      } else {
        if (item.run_index == 0)
          summary.prompt_fingerprints.push_back(request_fingerprint(s.provider, prompts[item.prompt_index], 0));
        summary.issues.push_back(s.id + "/" + cc.name + "/run" + std::to_string(item.run_index) + "/" + sentence.id +
                                 ": " + item.error);
        preds.push_back(all_missing(sentence, item.error));
      }
    }
    out.runs.push_back(std::move(preds));
    out.issues.emplace_back();
  }
  std::string example_ids;
  for (const auto& e : examples) example_ids += (example_ids.empty() ? "" : ",") + e.sentence.id;
  out.meta = {{"model", s.provider.model_id},
              {"template", template_id(spec.tmpl)},
              {"input_mode", std::string(to_string(spec.input_mode))},
              {"k", std::to_string(spec.k)},
              {"selection", spec.k == 0 ? "none" : std::string(to_string(spec.selection))},
              {"selection_seed", std::to_string(spec.seed)},
              {"error_weighting", "equal"},
              {"example_pool", s.example_pool},
              {"examples", example_ids.empty() ? "none" : example_ids},
              {"sampling", s.provider.sampling.empty() ? "provider-defaults" : s.provider.sampling.dump()}};
  return out;
}

}  // namespace

RunSummary cmd_run(const ExperimentConfig& c, std::shared_ptr<ChatTransport> transport,
                   const std::vector<std::string>& only_systems) {
  RunSummary summary;
  std::unique_ptr<LlmGateway> gateway;
  for (const auto& id : only_systems) c.system(id);
  for (const auto& s : c.systems) {
    if (!only_systems.empty() && std::find(only_systems.begin(), only_systems.end(), s.id) == only_systems.end())
      continue;
    for (const auto& cc : c.corpora) {
      if (s.kind == SystemKind::external && !s.predictions.contains(cc.name)) continue;
      const auto splits = load_splits(c, cc);
      SystemRun result;
      switch (s.kind) {
        case SystemKind::baseline: result = run_baseline(c, s, cc, splits); break;
        case SystemKind::external: result = run_external(c, s, cc, splits); break;
        case SystemKind::llm:
          if (!gateway) gateway = std::make_unique<LlmGateway>(GatewayOptions{c.cache_mode, c.cache_dir}, transport);
          result = run_llm(c, s, cc, splits, *gateway, summary);
          break;
      }
      const Corpus& gold = pick(splits, s.eval_split);
      for (int r = 0; r < c.runs; ++r) {
        const auto& preds = result.runs[static_cast<std::size_t>(r)];
        auto meta = base_metadata(c);
        meta.emplace_back("system", s.id);
        meta.emplace_back("kind", s.kind == SystemKind::baseline ? "baseline" : s.kind == SystemKind::llm ? "llm" : "external");
        meta.emplace_back("corpus", cc.name);
        meta.emplace_back("split", s.eval_split);
        meta.emplace_back("run", std::to_string(r));
        meta.insert(meta.end(), result.meta.begin(), result.meta.end());
        write_stream(prediction_file(c, s.id, cc.name, r),
                     [&](std::ostream& os) { write_predictions(preds, gold, meta, os); });
        auto diag = diagnose(preds, gold);
        diag.meta = meta;
        diag.issues = result.issues[static_cast<std::size_t>(r)];
        for (const auto& issue : diag.issues) summary.issues.push_back(s.id + "/" + cc.name + ": " + issue.message);
        summary.failed_sentences += diag.failed_sentences();
        text::write_file(diagnostics_file(c, s.id, cc.name, r).string(), diagnostics_to_json(diag));
        ++summary.prediction_files;
      }
    }
  }
  if (gateway) summary.live_calls = gateway->live_calls();
  return summary;
}

namespace {

struct LoadedRun {
  std::vector<AlignedPrediction> predictions;
  RunDiagnostics diagnostics;
};

// Per-token correctness for McNemar over annotated gold tokens: nullopt where
// the prediction is MISSING.
std::vector<std::optional<bool>> paired_correctness(const std::vector<AlignedPrediction>& preds, const Corpus& gold) {
  token_correctness(preds, gold, MissingPolicy::strict);  // validates coverage and lengths
  std::map<std::string, const AlignedPrediction*> by_id;
  for (const auto& p : preds) by_id.emplace(p.sentence_id, &p);
  std::vector<std::optional<bool>> out;
  for (const auto& s : gold.sentences) {
    const auto& p = *by_id.at(s.id);
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
      if (!s.tokens[t].lemma) continue;
      if (p.lemmas[t]) out.emplace_back(*p.lemmas[t] == *s.tokens[t].lemma);
      else out.emplace_back(std::nullopt);
    }
  }
  return out;
}

McNemarResult paired_test(const std::vector<std::optional<bool>>& a, const std::vector<std::optional<bool>>& b,
                          MissingPolicy policy, double alpha) {
  std::vector<bool> va, vb;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (policy == MissingPolicy::renormalize && (!a[i] || !b[i])) continue;
    va.push_back(a[i].value_or(false));
    vb.push_back(b[i].value_or(false));
  }
  return mcnemar(va, vb, alpha);
}

}  // namespace

ScoreTable compute_scores(const ExperimentConfig& c) {
  ScoreTable table;
  std::vector<std::string> gaps;
  for (const auto& cc : c.corpora) {
    std::optional<Splits> splits;
    // (split) -> system index -> correctness of the McNemar run
    std::map<std::string, std::vector<std::pair<std::string, std::vector<std::optional<bool>>>>> paired;
    std::map<std::string, std::vector<std::size_t>> report_index;
    for (const auto& s : c.systems) {
      if (s.kind == SystemKind::external && !s.predictions.contains(cc.name)) continue;
      std::vector<LoadedRun> runs;
      bool complete = true;
      for (int r = 0; r < c.runs; ++r) {
        const auto pf = prediction_file(c, s.id, cc.name, r);
        const auto df = diagnostics_file(c, s.id, cc.name, r);
        if (!fs::exists(pf) || !fs::exists(df)) {
          gaps.push_back(s.id + "/" + cc.name + "/run" + std::to_string(r));
          complete = false;
        }
      }
      if (!complete) continue;
      if (!splits) splits = load_splits(c, cc);
      const Corpus& gold = pick(*splits, s.eval_split);
      std::vector<double> wacc, sacc;
      DiagnosticTotals totals;
      std::vector<std::optional<bool>> mcnemar_vector;
      for (int r = 0; r < c.runs; ++r) {
        const auto pf = prediction_file(c, s.id, cc.name, r);
        std::ifstream in(pf, std::ios::binary);
        const auto preds = load_canonical_predictions(read_prediction_file(in, pf.string()), gold, pf.string());
        const auto df = diagnostics_file(c, s.id, cc.name, r);
        const auto diag = diagnostics_from_json(text::read_file(df.string()), df.string());
        wacc.push_back(word_accuracy(preds, gold, c.scoring.missing_policy));
        sacc.push_back(sentence_accuracy(preds, gold, c.scoring.missing_policy));
        totals.missing += diag.total_missing();
        totals.wrong += diag.total_wrong();
        totals.random += diag.total_random();
        if (r == c.scoring.mcnemar_run) mcnemar_vector = paired_correctness(preds, gold);
      }
      auto report = make_report(s.id, cc.name, std::move(wacc), std::move(sacc), totals);
      report.split = s.eval_split;
      report_index[s.eval_split].push_back(table.reports.size());
      table.reports.push_back(std::move(report));
      paired[s.eval_split].emplace_back(s.id, std::move(mcnemar_vector));
    }
    for (const auto& [split, systems] : paired) {
      for (std::size_t a = 0; a < systems.size(); ++a)
        for (std::size_t b = a + 1; b < systems.size(); ++b)
          table.pairwise.push_back({cc.name, systems[a].first, systems[b].first,
                                    paired_test(systems[a].second, systems[b].second, c.scoring.missing_policy,
                                                c.scoring.alpha)});
    }
    // Best system on the test split (ties: sentence accuracy, then config order).
    auto it = report_index.find("test");
    if (it != report_index.end() && !it->second.empty()) {
      std::size_t best = it->second.front();
      for (std::size_t idx : it->second) {
        const auto& r = table.reports[idx];
        const auto& b = table.reports[best];
        if (r.word.mean > b.word.mean || (r.word.mean == b.word.mean && r.sentence.mean > b.sentence.mean)) best = idx;
      }
      const auto& best_id = table.reports[best].system_id;
      table.best[cc.name] = best_id;
      bool significant = it->second.size() > 1;
      for (const auto& p : table.pairwise) {
        if (p.corpus != cc.name || (p.system_a != best_id && p.system_b != best_id)) continue;
        if (c.system(p.system_a).eval_split != "test" || c.system(p.system_b).eval_split != "test") continue;
        significant = significant && p.test.significant();
      }
      table.best_significant[cc.name] = significant;
    }
  }
  if (!gaps.empty()) {
    std::string msg = "missing predictions (run `lemmabench run` first):";
    for (const auto& g : gaps) msg += "\n  " + g;
    throw Error(msg);
  }
  return table;
}

ScoreTable cmd_score(const ExperimentConfig& c) {
  auto table = compute_scores(c);
  const auto meta = base_metadata(c);
  const auto dir = c.output_dir / "reports";
  text::write_file((dir / "scores.tsv").string(), render_scores_tsv(table, meta));
  text::write_file((dir / "mcnemar.tsv").string(), render_mcnemar_tsv(table, meta));
  text::write_file((dir / "report.txt").string(), render_report(table, c, meta));
  return table;
}

PairwiseResult cmd_compare(const ExperimentConfig& c, const std::string& corpus, const std::string& system_a,
                           const std::string& system_b) {
  const auto& cc = c.corpus(corpus);
  const auto& sa = c.system(system_a);
  const auto& sb = c.system(system_b);
  if (sa.eval_split != sb.eval_split)
    throw ConfigError("systems '" + system_a + "' and '" + system_b + "' are evaluated on different splits");
  const auto splits = load_splits(c, cc);
  const Corpus& gold = pick(splits, sa.eval_split);
  auto load = [&](const std::string& id) {
    const auto pf = prediction_file(c, id, corpus, c.scoring.mcnemar_run);
    if (!fs::exists(pf)) throw Error("missing predictions " + pf.string() + " (run `lemmabench run` first)");
    std::ifstream in(pf, std::ios::binary);
    return paired_correctness(load_canonical_predictions(read_prediction_file(in, pf.string()), gold, pf.string()), gold);
  };
  return {corpus, system_a, system_b, paired_test(load(system_a), load(system_b), c.scoring.missing_policy, c.scoring.alpha)};
}

}  // namespace lemmabench
