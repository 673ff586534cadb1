#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "numsarc/config.hpp"
#include "numsarc/corpus.hpp"
#include "numsarc/embeddings.hpp"
#include "numsarc/error.hpp"
#include "numsarc/eval.hpp"
#include "numsarc/features.hpp"
#include "numsarc/neural.hpp"
#include "numsarc/pipeline.hpp"
#include "numsarc/synth.hpp"
#include "numsarc/util.hpp"

namespace fs = std::filesystem;
using namespace numsarc;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output_dir = ".";
};

// `pipeline` replaces the file's choice; the file's other settings then apply on top of that pipeline's presets.
RunConfig run_config(const Globals& g, const std::string& pipeline = "") {
  nlohmann::json j = g.config_path.empty() ? nlohmann::json::object() : read_config_json(g.config_path);
  if (!pipeline.empty()) j["pipeline"] = pipeline;
  if (g.seed) j["seed"] = *g.seed;
  return RunConfig::from_json(j);
}

fs::path out_path(const Globals& g, const std::string& explicit_path, const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  fs::create_directories(g.output_dir);
  return fs::path(g.output_dir) / default_name;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  util::write_file(path, j.dump(2) + "\n");
}

std::string pick(const std::string& flag, const std::string& fallback, const char* what) {
  const std::string& v = flag.empty() ? fallback : flag;
  if (v.empty()) throw UsageError(std::string("no ") + what + " given (flag or config data section)");
  return v;
}

// Lines of {"id", "text", "label"?, "surface"?}; "surface" keeps the original case when present.
std::vector<text::AnalyzedTweet> analyze_file(const fs::path& path, bool require_labels) {
  static const text::Analyzer analyzer;
  std::vector<text::AnalyzedTweet> out;
  const std::string content = util::read_file(path);
  std::size_t line_no = 0;
  for (auto line : util::split_lines(content)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("text") || !j["text"].is_string()) {
      throw DataError(where + ": \"id\" and \"text\" must be strings");
    }
    std::optional<int> label;
    if (j.contains("label") && !j["label"].is_null()) {
      if (!j["label"].is_number_integer() || (j["label"] != 0 && j["label"] != 1)) throw DataError(where + ": label must be 0 or 1");
      label = j["label"].get<int>();
    }
    if (require_labels && !label) throw DataError(where + ": missing label");
    const auto text = j["text"].get<std::string>();
    const auto surface = j.contains("surface") && j["surface"].is_string() ? j["surface"].get<std::string>() : text;
    out.push_back(analyzer.analyze(j["id"].get<std::string>(), util::to_lower(text), label, surface));
  }
  if (out.empty()) throw DataError(path.string() + " holds no tweets");
  return out;
}

eval::TablePtr load_table(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_shared<embeddings::EmbeddingTable>(embeddings::load_embeddings(path));
}

nlohmann::json analyzed_json(const text::AnalyzedTweet& t) {
  nlohmann::json tokens = nlohmann::json::array();
  nlohmann::json tags = nlohmann::json::array();
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    tokens.push_back(t.tokens[i].surface);
    tags.push_back(std::string(text::tag_name(t.tags[i])));
  }
  nlohmann::json mentions = nlohmann::json::array();
  for (const auto& m : t.mentions) {
    mentions.push_back({{"value", m.value},
                        {"unit", m.unit ? nlohmann::json(*m.unit) : nlohmann::json()},
                        {"raw_unit", m.raw_unit ? nlohmann::json(*m.raw_unit) : nlohmann::json()},
                        {"position", m.position}});
  }
  nlohmann::json diagnostics = nlohmann::json::array();
  for (const auto& d : t.diagnostics) diagnostics.push_back({{"position", d.position}, {"message", d.message}});
  nlohmann::json j = {{"id", t.id},         {"text", t.text},         {"tokens", tokens},
                      {"tags", tags},       {"noun_phrases", t.noun_phrase_words},
                      {"mentions", mentions}, {"diagnostics", diagnostics}};
  if (t.label) j["label"] = *t.label;
  return j;
}

void print_metrics(const std::string& title, const eval::MetricsReport& r) {
  std::cout << eval::format_table({{title, r}});
}

// ---- subcommands

int cmd_ingest(const Globals& g, const std::string& input, const std::string& output, const std::string& dataset) {
  const auto report = corpus::ingest(corpus::read_raw_jsonl(input));
  auto tweets = report.tweets;
  if (!dataset.empty()) tweets = corpus::build_dataset(tweets, corpus::DatasetPreset::preset(dataset), run_config(g).seed);
  const auto path = out_path(g, output, "tweets.jsonl");
  util::write_file(path, corpus::to_jsonl(tweets));
  nlohmann::json summary = {{"input", input},
                            {"output", path.string()},
                            {"kept", tweets.size()},
                            {"unlabeled", report.unlabeled},
                            {"empty", report.empty},
                            {"duplicates", report.duplicates},
                            {"seed", run_config(g).seed}};
  if (!tweets.empty()) summary["numeric_fraction"] = corpus::numeric_fraction(tweets);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_analyze(const Globals& g, const std::string& input, const std::string& output) {
  const auto tweets = analyze_file(input, false);
  std::string out;
  for (const auto& t : tweets) out += analyzed_json(t).dump() + "\n";
  const auto path = out_path(g, output, "analyzed.jsonl");
  util::write_file(path, out);
  std::cout << "analyzed " << tweets.size() << " tweets -> " << path.string() << "\n";
  return 0;
}

int cmd_build_repo(const Globals& g, const std::string& input, const std::string& output, const std::string& strategy,
                   const std::string& embeddings_path) {
  auto config = run_config(g, strategy.empty() ? "" : "rule-" + strategy);
  if (config.pipeline != "rule-cosine") config = run_config(g, "rule-exact");
  eval::RulePipeline pipeline(config, load_table(embeddings_path.empty() ? config.embeddings_path : embeddings_path));
  pipeline.fit(analyze_file(pick(input, config.train_path, "--input"), true));
  const auto path = out_path(g, output, "repository.json");
  write_json(path, pipeline.to_json());
  nlohmann::json summary = pipeline.training_info();
  summary["output"] = path.string();
  summary["seed"] = config.seed;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_predict_rule(const Globals& g, const std::string& repo, const std::string& input, const std::string& output) {
  const auto loaded = eval::RulePipeline::from_json(nlohmann::json::parse(util::read_file(repo)));
  const auto tweets = analyze_file(input, false);
  std::string lines;
  std::vector<int> preds;
  std::vector<int> golds;
  bool labeled = true;
  for (const auto& t : tweets) {
    const auto p = loaded->explain(t);
    nlohmann::json j = {{"id", t.id}, {"label", p.label}, {"path", std::string(rulebase::path_name(p.path))}};
    if (p.matched_tweet_index) j["matched_tweet_index"] = *p.matched_tweet_index;
    if (p.interval) j["interval"] = {p.interval->first, p.interval->second};
    j["match_score"] = p.match_score;
    lines += j.dump() + "\n";
    preds.push_back(p.label);
    if (t.label) golds.push_back(*t.label);
    else labeled = false;
  }
  const auto path = out_path(g, output, "predictions.jsonl");
  util::write_file(path, lines);
  std::cout << "wrote " << tweets.size() << " predictions -> " << path.string() << "\n";
  if (labeled) {
    const auto report = eval::MetricsReport::from_confusion(eval::confusion(preds, golds));
    write_json(out_path(g, "", "metrics.json"),
               {{"pipeline", loaded->name()}, {"metrics", report.to_json()}, {"input", input}});
    print_metrics(loaded->name(), report);
  }
  return 0;
}

int cmd_featurize(const Globals& g, const std::string& input, const std::string& output, const std::string& units_from,
                  const std::string& embeddings_path) {
  const auto config = run_config(g);
  const auto tweets = analyze_file(pick(input, config.train_path, "--input"), false);
  auto fc = config.features;
  fc.unit_vocabulary = features::collect_unit_vocabulary(units_from.empty() ? tweets : analyze_file(units_from, false));
  const auto table = load_table(embeddings_path.empty() ? config.embeddings_path : embeddings_path);
  if (fc.tweet_embedding) {
    if (!table) throw UsageError("tweet embedding features need --embeddings");
    fc.embedding_dim = table->dim();
  }
  std::vector<features::FeatureVector> rows;
  std::vector<int> labels;
  bool labeled = true;
  for (const auto& t : tweets) {
    rows.push_back(features::assemble_features(t, fc, table.get()));
    if (t.label) labels.push_back(*t.label);
    else labeled = false;
  }
  const auto path = out_path(g, output, "features.csv");
  util::write_file(path, features::to_csv(fc, rows, labeled ? &labels : nullptr));
  std::cout << "wrote " << rows.size() << " rows x " << features::column_names(fc).size() << " features -> "
            << path.string() << "\n";
  return 0;
}

int cmd_train(const Globals& g, const std::string& model, const std::string& input, const std::string& output,
              const std::string& embeddings_path) {
  const auto config = run_config(g, model);
  const auto train_path = pick(input, config.train_path, "--input");
  const auto tweets = analyze_file(train_path, true);
  auto pipeline = eval::make_pipeline(config, load_table(embeddings_path.empty() ? config.embeddings_path : embeddings_path));
  pipeline->fit(tweets);

  const auto model_path = out_path(g, output, "model.json");
  write_json(model_path, pipeline->to_json());
  const auto report = eval::MetricsReport::from_confusion(eval::confusion(pipeline->predict(tweets), eval::gold_labels(tweets)));
  const nlohmann::json summary = {{"pipeline", config.pipeline},
                                  {"seed", config.seed},
                                  {"config_fingerprint", config.fingerprint()},
                                  {"train_size", tweets.size()},
                                  {"training", pipeline->training_info()},
                                  {"fingerprints", pipeline->fingerprints()},
                                  {"training_metrics", report.to_json()}};
  write_json(out_path(g, "", "train_report.json"), summary);
  if (is_neural_pipeline(config.pipeline)) {
    const auto info = pipeline->training_info();
    neural::TrainResult curve;
    curve.train_loss = info["train_loss"].get<std::vector<double>>();
    curve.val_loss = info["val_loss"].get<std::vector<double>>();
    util::write_file(out_path(g, "", "loss_curve.csv"), neural::loss_curve_csv(curve));
  }
  std::cout << "model -> " << model_path.string() << "\n";
  print_metrics(config.pipeline + " (train)", report);
  return 0;
}

int cmd_evaluate(const Globals& g, const std::string& model, const std::string& input) {
  const auto artifact = nlohmann::json::parse(util::read_file(model));
  const auto pipeline = eval::load_pipeline(artifact);
  const auto config = RunConfig::from_json(artifact.at("config"));
  const auto tweets = analyze_file(pick(input, config.test_path, "--input"), true);
  const auto report = eval::MetricsReport::from_confusion(eval::confusion(pipeline->predict(tweets), eval::gold_labels(tweets)));
  write_json(out_path(g, "", "metrics.json"),
             {{"pipeline", pipeline->name()}, {"seed", config.seed}, {"test_size", tweets.size()}, {"metrics", report.to_json()}});
  print_metrics(pipeline->name(), report);
  return 0;
}

int cmd_crossval(const Globals& g, const std::string& pipeline_name, const std::string& input, std::size_t folds,
                 const std::string& fold_file, const std::string& export_folds, const std::string& embeddings_path) {
  auto config = run_config(g, pipeline_name);
  if (folds > 0) config.folds = folds;
  config.validate();
  const auto tweets = analyze_file(pick(input, config.train_path, "--input"), true);
  corpus::FoldAssignment assignment;
  if (!fold_file.empty()) {
    assignment = corpus::FoldAssignment::from_json(nlohmann::json::parse(util::read_file(fold_file)));
  } else {
    std::vector<std::string> ids;
    std::vector<int> labels;
    for (const auto& t : tweets) {
      ids.push_back(t.id);
      labels.push_back(*t.label);
    }
    assignment = corpus::stratified_kfold(ids, labels, config.folds, config.seed);
  }
  if (!export_folds.empty()) write_json(export_folds, assignment.to_json());
  const auto table = load_table(embeddings_path.empty() ? config.embeddings_path : embeddings_path);
  const auto report = eval::crossvalidate([&] { return eval::make_pipeline(config, table); }, tweets, assignment);
  auto j = report.to_json();
  j["pipeline"] = config.pipeline;
  j["seed"] = config.seed;
  j["folds_k"] = assignment.k;
  j["config_fingerprint"] = config.fingerprint();
  write_json(out_path(g, "", "crossval_report.json"), j);
  std::vector<std::pair<std::string, eval::MetricsReport>> rows;
  for (const auto& f : report.folds) rows.emplace_back("fold " + std::to_string(f.fold), f.report);
  rows.emplace_back(config.pipeline + " mean", report.mean);
  std::cout << eval::format_table(rows);
  return 0;
}

int cmd_embed(const Globals& g, bool train, const std::string& load, const std::string& input, const std::string& output,
              std::size_t dim) {
  if (train == !load.empty()) throw UsageError("embed needs exactly one of --train-sgns or --load");
  nlohmann::json summary;
  if (train) {
    auto config = run_config(g);
    if (dim > 0) config.sgns.dim = dim;
    const auto tweets = analyze_file(pick(input, config.train_path, "--input"), false);
    const auto result = embeddings::train_sgns(
        [&] {
          std::vector<std::vector<std::string>> s;
          for (const auto& t : tweets) s.push_back(t.words());
          return s;
        }(),
        config.sgns);
    const auto path = out_path(g, output, "vectors.txt");
    util::write_file(path, result.table.to_text());
    summary = {{"output", path.string()},
               {"words", result.table.size()},
               {"dim", result.table.dim()},
               {"epoch_loss", result.epoch_loss},
               {"seed", config.sgns.seed},
               {"fingerprint", result.table.fingerprint()}};
  } else {
    const auto table = embeddings::load_embeddings(load, dim > 0 ? std::optional<std::size_t>(dim) : std::nullopt);
    summary = {{"input", load}, {"words", table.size()}, {"dim", table.dim()}, {"fingerprint", table.fingerprint()}};
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_synth(const Globals& g, const std::string& output, synth::SynthConfig sc, bool split, double test_fraction) {
  if (g.seed) sc.seed = *g.seed;
  const auto tweets = synth::generate(sc);
  const auto path = out_path(g, output, "synth.jsonl");
  util::write_file(path, corpus::to_jsonl(tweets));
  nlohmann::json summary = {{"output", path.string()}, {"count", tweets.size()}, {"seed", sc.seed}};
  if (split) {
    const auto parts = synth::holdout_split(tweets, test_fraction, sc.seed);
    const auto dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    util::write_file(dir / "synth_train.jsonl", corpus::to_jsonl(parts.train));
    util::write_file(dir / "synth_test.jsonl", corpus::to_jsonl(parts.test));
    summary["train"] = (dir / "synth_train.jsonl").string();
    summary["test"] = (dir / "synth_test.jsonl").string();
    summary["test_size"] = parts.test.size();
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numsarc: numerical sarcasm detection toolkit"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config_path, "TOML or JSON run configuration")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed_value, "random seed for every stochastic step");
  app.add_option("--output-dir", g.output_dir, "directory for reports and default outputs");

  std::string input, output, dataset, strategy, embeddings_path, repo, units_from, model, pipeline, fold_file,
      export_folds, load;
  std::size_t folds = 0, dim = 0;
  bool train_sgns = false, split = false;
  double test_fraction = 0.2;
  synth::SynthConfig sc;

  auto* ingest = app.add_subcommand("ingest", "label, normalize and deduplicate raw tweets");
  ingest->add_option("--input", input, "raw JSONL")->required();
  ingest->add_option("--output", output, "labeled JSONL");
  ingest->add_option("--dataset", dataset, "sample a preset: d1, d2, d3 or test");

  auto* analyze = app.add_subcommand("analyze", "tokenize, tag, chunk and extract numeric mentions");
  analyze->add_option("--input", input, "JSONL tweets")->required();
  analyze->add_option("--output", output, "analyzed JSONL");

  auto* build_repo = app.add_subcommand("build-repo", "build sarcastic and non-sarcastic repositories");
  build_repo->add_option("--input", input, "labeled training JSONL");
  build_repo->add_option("--output", output, "repository artifact");
  build_repo->add_option("--strategy", strategy, "exact or cosine")->check(CLI::IsMember({"exact", "cosine"}));
  build_repo->add_option("--embeddings", embeddings_path, "word vectors for the cosine strategy");

  auto* predict_rule = app.add_subcommand("predict-rule", "apply the rule cascade");
  predict_rule->add_option("--repo", repo, "repository artifact")->required();
  predict_rule->add_option("--input", input, "JSONL tweets")->required();
  predict_rule->add_option("--output", output, "prediction JSONL");

  auto* featurize = app.add_subcommand("featurize", "write the feature matrix as CSV");
  featurize->add_option("--input", input, "JSONL tweets");
  featurize->add_option("--output", output, "CSV path");
  featurize->add_option("--units-from", units_from, "training JSONL that fixes the unit vocabulary");
  featurize->add_option("--embeddings", embeddings_path, "word vectors for tweet embedding features");

  auto* train = app.add_subcommand("train", "fit a pipeline and save it");
  train->add_option("--model", model, "pipeline name")->check(CLI::IsMember(
      std::vector<std::string>(std::begin(kPipelines), std::end(kPipelines))));
  train->add_option("--input", input, "labeled training JSONL");
  train->add_option("--output", output, "model artifact");
  train->add_option("--embeddings", embeddings_path, "pretrained word vectors");

  auto* evaluate = app.add_subcommand("evaluate", "score a saved pipeline on labeled tweets");
  evaluate->add_option("--model", model, "model artifact")->required();
  evaluate->add_option("--input", input, "labeled test JSONL");

  auto* crossval = app.add_subcommand("crossval", "stratified k-fold cross-validation");
  crossval->add_option("--pipeline", pipeline, "pipeline name")->check(CLI::IsMember(
      std::vector<std::string>(std::begin(kPipelines), std::end(kPipelines))));
  crossval->add_option("--input", input, "labeled JSONL");
  crossval->add_option("--folds", folds, "number of folds");
  crossval->add_option("--fold-file", fold_file, "reuse a saved fold assignment");
  crossval->add_option("--export-folds", export_folds, "save the fold assignment");
  crossval->add_option("--embeddings", embeddings_path, "pretrained word vectors");

  auto* embed = app.add_subcommand("embed", "train or load word vectors");
  embed->add_flag("--train-sgns", train_sgns, "train skip-gram vectors on --input");
  embed->add_option("--load", load, "vector file to validate");
  embed->add_option("--input", input, "JSONL tweets for training");
  embed->add_option("--output", output, "vector file to write");
  embed->add_option("--dim", dim, "vector dimension");

  auto* synth_cmd = app.add_subcommand("synth", "generate the synthetic corpus");
  synth_cmd->add_option("--output", output, "JSONL path");
  synth_cmd->add_option("--count", sc.count, "number of tweets");
  synth_cmd->add_option("--sigma", sc.sigma, "per-unit standard deviation");
  synth_cmd->add_option("--separation", sc.separation, "class mean distance in sigmas (>= 6)");
  synth_cmd->add_flag("--split", split, "also write a stratified train/test split");
  synth_cmd->add_option("--test-fraction", test_fraction, "held-out share for --split");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (*ingest) return cmd_ingest(g, input, output, dataset);
    if (*analyze) return cmd_analyze(g, input, output);
    if (*build_repo) return cmd_build_repo(g, input, output, strategy, embeddings_path);
    if (*predict_rule) return cmd_predict_rule(g, repo, input, output);
    if (*featurize) return cmd_featurize(g, input, output, units_from, embeddings_path);
    if (*train) return cmd_train(g, model, input, output, embeddings_path);
    if (*evaluate) return cmd_evaluate(g, model, input);
    if (*crossval) return cmd_crossval(g, pipeline, input, folds, fold_file, export_folds, embeddings_path);
    if (*embed) return cmd_embed(g, train_sgns, load, input, output, dim);
    if (*synth_cmd) return cmd_synth(g, output, sc, split, test_fraction);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DivergenceError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
