#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "numsarc/classic_ml.hpp"
#include "numsarc/corpus.hpp"
#include "numsarc/eval.hpp"
#include "numsarc/neural.hpp"
#include "numsarc/pipeline.hpp"
#include "numsarc/rng.hpp"
#include "numsarc/rulebase.hpp"
#include "numsarc/synth.hpp"
#include "numsarc/text.hpp"
#include "numsarc/util.hpp"

namespace fs = std::filesystem;
using namespace numsarc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1

Outcome metric_fixtures() {
  const double s1 = 1843, s0 = 8317;
  struct Case {
    const char* what;
    double got;
    double want;
  };
  const Case cases[] = {
      {"buschmeier P(avg)", eval::weighted_average(0.19, 0.98, s1, s0), 0.84},
      {"cnn-ff P(avg)", eval::weighted_average(0.88, 0.94, s1, s0), 0.93},
      {"cnn-ff F(avg)", eval::weighted_average(0.79, 0.96, s1, s0), 0.93},
      {"joshi F(avg)", eval::weighted_average(0.33, 0.23, s1, s0), 0.25},
      {"cnn-ff F(1) from P, R", eval::f_score(0.88, 0.71), 0.79},
  };
  Outcome out{true, ""};
  for (const auto& c : cases) {
    const bool ok = std::abs(c.got - c.want) <= 0.01;
    out.pass = out.pass && ok;
    out.detail += std::string(out.detail.empty() ? "" : ", ") + c.what + "=" + fmt(c.got, 3);
  }
  return out;
}

// ---- 2a

const text::Analyzer& analyzer() {
  static const text::Analyzer a;
  return a;
}

struct Handcrafted {
  const char* text;
  int label;
};

const Handcrafted kRuleCorpus[] = {
    {"i love writing my thesis paper at 3.5 am", 1},
    {"love working on my paper at 4 am", 1},
    {"great my phone battery lasted 2 hours", 1},
    {"awesome battery backup of 3 hours", 1},
    {"so glad my commute took 90 minutes", 1},
    {"nothing beats a 95 minutes commute", 1},
    {"best day ever , waited 5 hours at the dentist", 1},
    {"just 1 day of vacation , amazing", 1},
    {"love paying 20 dollars for coffee", 1},
    {"wow the train was only 45 minutes late", 1},
    {"the meeting ran 3 hours , so fun", 1},
    {"i am so productive when my room is 81 degrees", 1},
    {"paper at 545", 1},
    {"battery died after 30 minutes", 1},
    {"my room is a comfortable 21.27 degrees", 0},
    {"room temperature at 22 degrees today", 0},
    {"phone battery still at 10 hours", 0},
    {"battery backup of 12 hours is decent", 0},
    {"commute took 20 minutes today", 0},
    {"the train was 5 minutes late", 0},
    {"coffee costs 3 dollars here", 0},
    {"vacation of 14 days starts now", 0},
    {"finished the paper at 11 pm", 0},
    {"meeting at 10 am tomorrow", 0},
    {"slept 8 hours last night", 0},
    {"bought 3 apples", 0},
    {"i love writing this paper at 11 am", 0},
    {"cats chase 3 mice", 0},
    {"no numbers here at all", 0},
    {"the dentist took 2 days", 0},
};

struct OracleResult {
  int label = 0;
  rulebase::Path path = rulebase::Path::NoMatch;
  bool unit_fallthrough = false;
};

// Exhaustive cascade: scan every entry of each class, pick the largest word-set overlap (first wins),
// then test unit equality and the z-interval over all same-unit entries of that class.
OracleResult oracle(const text::AnalyzedTweet& test, const std::vector<const text::AnalyzedTweet*>& sarcastic,
                    const std::vector<const text::AnalyzedTweet*>& non_sarcastic, double z) {
  OracleResult r;
  const auto* mention = test.first_mention();
  if (mention == nullptr || !mention->unit) return r;
  const std::set<std::string> query(test.noun_phrase_words.begin(), test.noun_phrase_words.end());
  const std::pair<const std::vector<const text::AnalyzedTweet*>*, int> repos[] = {{&sarcastic, 1}, {&non_sarcastic, 0}};
  for (const auto& [tweets, label] : repos) {
    const text::AnalyzedTweet* best = nullptr;
    std::size_t best_overlap = 0;
    for (const auto* t : *tweets) {
      if (t->first_mention() == nullptr) continue;
      const std::set<std::string> words(t->noun_phrase_words.begin(), t->noun_phrase_words.end());
      std::size_t overlap = 0;
      for (const auto& w : words) overlap += query.count(w);
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = t;
      }
    }
    if (best == nullptr) continue;
    if (best->first_mention()->unit != mention->unit) {
      r.unit_fallthrough = true;
      continue;
    }
    std::vector<double> values;
    for (const auto* t : *tweets) {
      if (t->first_mention() != nullptr && t->first_mention()->unit == mention->unit) {
        values.push_back(t->first_mention()->value);
      }
    }
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(values.size()));
    const bool inside = std::abs(mention->value - mean) <= z * sd;
    r.label = inside ? label : 1 - label;
    using rulebase::Path;
    r.path = label == 1 ? (inside ? Path::SarcMatchIn : Path::SarcMatchOut)
                        : (inside ? Path::NonsarcMatchIn : Path::NonsarcMatchOut);
    return r;
  }
  return r;
}

Outcome rule_oracle() {
  std::vector<text::AnalyzedTweet> all;
  for (std::size_t i = 0; i < std::size(kRuleCorpus); ++i) {
    all.push_back(analyzer().analyze("r" + std::to_string(i), kRuleCorpus[i].text, kRuleCorpus[i].label));
  }
  std::size_t agree = 0;
  std::set<rulebase::Path> paths;
  std::size_t fallthroughs = 0;
  for (std::size_t held = 0; held < all.size(); ++held) {
    std::vector<text::AnalyzedTweet> pos, neg;
    std::vector<const text::AnalyzedTweet*> pos_ptr, neg_ptr;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (i == held) continue;
      (*all[i].label == 1 ? pos : neg).push_back(all[i]);
    }
    for (const auto& t : pos) pos_ptr.push_back(&t);
    for (const auto& t : neg) neg_ptr.push_back(&t);
    const auto sarc = rulebase::build_repository(pos, 1);
    const auto non = rulebase::build_repository(neg, 0);
    const auto got = rulebase::predict_rule(all[held], sarc, non, rulebase::RuleConfig{});
    const auto want = oracle(all[held], pos_ptr, neg_ptr, rulebase::kDefaultZ);
    agree += got.label == want.label && got.path == want.path;
    paths.insert(want.path);
    fallthroughs += want.unit_fallthrough;
  }

  // The two worked examples against single-tweet repositories.
  const auto sarc = rulebase::build_repository({analyzer().analyze("s", kRuleCorpus[0].text, 1)}, 1);
  const auto non = rulebase::build_repository({analyzer().analyze("n", kRuleCorpus[14].text, 0)}, 0);
  const auto am = rulebase::predict_rule(analyzer().analyze("a", "i love writing this paper at 11 am"), sarc, non, {});
  const auto deg =
      rulebase::predict_rule(analyzer().analyze("d", "i am so productive when my room is 81 degrees"), sarc, non, {});
  const bool worked = am.label == 0 && deg.label == 1;

  Outcome out;
  out.pass = agree == all.size() && paths.size() == 5 && fallthroughs > 0 && worked;
  out.detail = "oracle agreement " + std::to_string(agree) + "/" + std::to_string(all.size()) + ", paths covered " +
               std::to_string(paths.size()) + "/5, unit fall-throughs " + std::to_string(fallthroughs) +
               ", worked examples " + (worked ? "ok" : "WRONG");
  return out;
}

// ---- 2b

std::vector<text::AnalyzedTweet> analyze_all(const std::vector<corpus::LabeledTweet>& tweets) {
  std::vector<text::AnalyzedTweet> out;
  for (const auto& t : tweets) out.push_back(analyzer().analyze(t.id, t.text, t.label, t.surface));
  return out;
}

Outcome synthetic_end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tweets = synth::generate(synth::SynthConfig{});
  const auto split = synth::holdout_split(tweets, 0.2, 1);
  const auto train = analyze_all(split.train);
  const auto test = analyze_all(split.test);
  const auto golds = eval::gold_labels(test);
  auto score = [&](const RunConfig& config) {
    auto p = eval::make_pipeline(config);
    p->fit(train);
    return eval::MetricsReport::from_confusion(eval::confusion(p->predict(test), golds)).f_avg;
  };
  RunConfig rule;
  rule.set_pipeline("rule-exact");
  const double rule_f = score(rule);

  RunConfig cnn;
  cnn.set_pipeline("cnn-ff");
  cnn.model.embedding_dim = 32;
  cnn.model.filters_per_width = 16;
  cnn.training.epochs = 10;
  cnn.training.batch_size = 16;
  const double cnn_f = score(cnn);
  const double secs = elapsed_since(t0);
  return {rule_f >= 0.95 && cnn_f >= 0.90 && secs < 300,
          "rule-exact F(avg)=" + fmt(rule_f) + ", cnn-ff d=32 F(avg)=" + fmt(cnn_f) + ", " + fmt(secs, 3) + " s"};
}

// ---- 3

neural::ModelConfig tiny_model(neural::Architecture a) {
  auto c = neural::ModelConfig::preset(a);
  c.embedding_dim = 4;
  c.sequence_length = 6;
  c.filter_widths = {2, 3};
  c.filters_per_width = 2;
  c.hidden = 3;
  c.cnn_lstm_filters = 3;
  c.cnn_lstm_width = 3;
  c.pool_size = 2;
  return c;
}

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto vocab = neural::Vocabulary::from_sentences({{"good", "great", "bad", "awful", "the", "day", "was"}});
  Rng rng(3);
  double worst = 0;
  std::string detail;
  for (auto a : {neural::Architecture::CnnFf, neural::Architecture::LstmFf, neural::Architecture::CnnLstmFf}) {
    neural::Model model(tiny_model(a), vocab, 11);
    double arch_worst = 0;
    for (int label : {0, 1}) {
      neural::PaddedTweet t;
      t.indices.assign(6, neural::kPadIndex);
      for (std::size_t i = 0; i < 4; ++i) t.indices[i] = 1 + rng.below(vocab.size() - 1);
      arch_worst = std::max(arch_worst, neural::grad_check(model, t, label, 1e-4));
    }
    worst = std::max(worst, arch_worst);
    detail += neural::architecture_name(a) + "=" + fmt(arch_worst, 2) + " ";
  }
  const double secs = elapsed_since(t0);
  return {worst < 1e-4 && secs < 30, detail + "(" + fmt(secs, 2) + " s)"};
}

// ---- 4

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Outcome lstm_equivalence() {
  Rng rng(4);
  double worst = 0;
  for (int step = 0; step < 1000; ++step) {
    const std::size_t h = 1 + rng.below(4), d = 1 + rng.below(4), n = h + d;
    auto cell = neural::LstmCell::zeros(h, d);
    for (auto* W : {&cell.W_i, &cell.W_f, &cell.W_C, &cell.W_o}) {
      for (auto& v : W->data) v = rng.normal(0, 0.8);
    }
    for (auto* b : {&cell.b_i, &cell.b_f, &cell.b_C, &cell.b_o}) {
      for (auto& v : *b) v = rng.normal(0, 0.5);
    }
    std::vector<double> x(d), hp(h), cp(h);
    for (auto& v : x) v = rng.normal();
    for (auto& v : hp) v = rng.normal(0, 0.5);
    for (auto& v : cp) v = rng.normal();
    const auto got = neural::lstm_step(cell, x, {hp, cp});
    for (std::size_t j = 0; j < h; ++j) {
      auto gate = [&](const autodiff::Tensor& W, const std::vector<double>& b) {
        double z = b[j];
        for (std::size_t c = 0; c < n; ++c) z += W.data[j * n + c] * (c < h ? hp[c] : x[c - h]);
        return z;
      };
      const double f = sigmoid(gate(cell.W_f, cell.b_f));
      const double i = sigmoid(gate(cell.W_i, cell.b_i));
      const double cand = std::tanh(gate(cell.W_C, cell.b_C));
      const double c_new = f * cp[j] + i * cand;
      const double o = sigmoid(gate(cell.W_o, cell.b_o));
      const double h_new = o * std::tanh(c_new);
      worst = std::max({worst, std::abs(got.C[j] - c_new), std::abs(got.h[j] - h_new)});
    }
  }
  return {worst < 1e-10, "1000 steps, max abs difference " + fmt(worst, 3)};
}

// ---- 5

int knn_brute_force(const classic_ml::Matrix& X, const std::vector<int>& y, std::size_t k, const std::vector<double>& q) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double s = 0;
    for (std::size_t c = 0; c < q.size(); ++c) s += (X[i][c] - q[c]) * (X[i][c] - q[c]);
    d.emplace_back(s, i);
  }
  std::sort(d.begin(), d.end());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < std::min(k, d.size()); ++i) ones += y[d[i].second] == 1;
  return 2 * ones > std::min(k, d.size()) ? 1 : 0;
}

double max_kkt_violation(const classic_ml::SvmModel& model, const classic_ml::Matrix& X, const std::vector<int>& y) {
  std::vector<double> alpha(X.size(), 0.0);
  for (std::size_t s = 0; s < model.support_indices.size(); ++s) alpha[model.support_indices[s]] = std::abs(model.dual_coef[s]);
  double worst = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double m = y[i] * model.decision(X[i]);
    const double v = alpha[i] <= 0 ? std::max(0.0, 1 - m) : alpha[i] >= model.C ? std::max(0.0, m - 1) : std::abs(m - 1);
    worst = std::max(worst, v);
  }
  return worst;
}

double train_accuracy(const classic_ml::SvmModel& model, const classic_ml::Matrix& X, const std::vector<int>& y) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < X.size(); ++i) ok += classic_ml::svm_predict(model, X[i]) == (y[i] == 1 ? 1 : 0);
  return static_cast<double>(ok) / static_cast<double>(X.size());
}

Outcome classical_oracles() {
  Rng rng(5);
  std::size_t knn_agree = 0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 5 + rng.below(40), d = 1 + rng.below(5), k = 1 + rng.below(7);
    classic_ml::Matrix X;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(d);
      // Coarse grid values make distance ties common.
      for (auto& v : row) v = static_cast<double>(rng.below(4));
      X.push_back(row);
      y.push_back(static_cast<int>(rng.below(2)));
    }
    std::vector<double> q(d);
    for (auto& v : q) v = static_cast<double>(rng.below(4));
    const auto model = classic_ml::knn_fit(X, y, k);
    knn_agree += classic_ml::knn_classify(model, q) == knn_brute_force(X, y, k, q);
  }

  classic_ml::Matrix blobs;
  std::vector<int> blob_y;
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2 ? 1 : -1;
    blobs.push_back({rng.normal(label * 1.5, 0.4), rng.normal(label * 1.5, 0.4)});
    blob_y.push_back(label);
  }
  const auto blob_model = classic_ml::svm_train(blobs, blob_y);
  const classic_ml::Matrix xor_x{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<int> xor_y{-1, -1, 1, 1};
  const auto xor_model = classic_ml::svm_train(xor_x, xor_y, {1.0, 1.0, 1e-3, 10});
  const double blob_acc = train_accuracy(blob_model, blobs, blob_y);
  const double xor_acc = train_accuracy(xor_model, xor_x, xor_y);
  const double blob_kkt = max_kkt_violation(blob_model, blobs, blob_y);
  const double xor_kkt = max_kkt_violation(xor_model, xor_x, xor_y);

  classic_ml::Matrix line;
  std::vector<int> line_y;
  for (int i = 0; i < 300; ++i) {
    const double v = rng.uniform();
    line.push_back({v});
    line_y.push_back(v > 0.4 ? 1 : 0);
  }
  const auto forest = classic_ml::forest_train(line, line_y, {25, 0, 2, 5});

  const bool ok = knn_agree == 100 && blob_acc == 1.0 && xor_acc == 1.0 && blob_kkt < 1e-3 && xor_kkt < 1e-3 &&
                  forest.oob_accuracy >= 0.95;
  return {ok, "knn " + std::to_string(knn_agree) + "/100, svm blobs acc " + fmt(blob_acc) + " kkt " + fmt(blob_kkt, 2) +
                  ", xor acc " + fmt(xor_acc) + " kkt " + fmt(xor_kkt, 2) + ", forest oob " + fmt(forest.oob_accuracy)};
}

// ---- 6

Outcome shapes() {
  const auto vocab = neural::Vocabulary::from_sentences({{"a", "b"}});
  neural::Model cnn(neural::ModelConfig::preset(neural::Architecture::CnnFf), vocab, 1);
  const auto cl = neural::ModelConfig::preset(neural::Architecture::CnnLstmFf);
  const std::size_t steps = (cl.sequence_length - cl.cnn_lstm_width + 1) / cl.pool_size;
  auto cl_small = cl;
  cl_small.embedding_dim = 8;
  neural::Model cnn_lstm(cl_small, vocab, 1);
  const bool lstm_input_ok = cnn_lstm.parameter("lstm.W_i").value.cols == cl.hidden + cl.cnn_lstm_filters;
  bool lstm_ok = true;
  std::string hidden;
  for (std::size_t h : {20, 40, 128}) {
    auto c = neural::ModelConfig::preset(neural::Architecture::LstmFf);
    c.embedding_dim = 8;
    c.hidden = h;
    neural::Model m(c, vocab, 1);
    lstm_ok = lstm_ok && m.feature_length() == h;
    hidden += std::to_string(m.feature_length()) + " ";
  }
  const bool ok = cnn.feature_length() == 384 && steps == 8 && lstm_input_ok && lstm_ok;
  return {ok, "cnn-ff concat " + std::to_string(cnn.feature_length()) + ", cnn-lstm-ff steps " + std::to_string(steps) +
                  ", lstm-ff pooled " + hidden};
}

// ---- 7

Outcome golden_nlp() {
  auto nps = [](const char* s) { return text::extract_noun_phrases(text::pos_tag(text::tokenize(s))); };
  const bool np1 = nps("this phone has an awesome battery back-up of 2 hours") ==
                   std::vector<std::string>{"phone", "awesome", "battery", "backup", "hours"};
  const bool np2 = nps("8:30 am meetings are the best way to start birthday weekend") ==
                   std::vector<std::string>{"meetings", "way", "birthday", "weekend"};

  auto mentions = [](const char* s) { return text::extract_numeric_mentions(text::pos_tag(text::tokenize(s))).mentions; };
  const auto m1 = mentions("this phone has an awesome battery back-up of 2 hours");
  const auto m2 = mentions("i love waking up at 545");
  const auto m3 = mentions("$34.04 for a 10 mile trip that takes 19 minutes");
  const bool mention1 = m1.size() == 1 && m1[0].value == 2.0 && m1[0].unit == "hours";
  const bool mention2 = m2.size() == 1 && m2[0].value == 545.0 && !m2[0].unit;
  const bool mention3 = m3.size() == 3 && std::abs(m3[0].value - 34.04) < 1e-12 && !m3[0].unit &&
                        m3[1].value == 10.0 && m3[1].unit == "miles" && m3[2].value == 19.0 &&
                        m3[2].unit == "minutes";

  std::vector<corpus::LabeledTweet> corpus;
  corpus.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    const std::string body = i < 11488 ? "waited 3 hours for the bus" : "waited forever for the bus";
    corpus.push_back({std::to_string(i), body, body, 0});
  }
  const double fraction = corpus::numeric_fraction(corpus);
  const bool ok = np1 && np2 && mention1 && mention2 && mention3 && fraction == 0.11488;
  return {ok, std::string("noun phrases ") + (np1 && np2 ? "ok" : "WRONG") + ", mentions " +
                  (mention1 && mention2 && mention3 ? "ok" : "WRONG") + ", numeric_fraction " + fmt(fraction, 10)};
}

// ---- 8

int run(const std::string& command) { return std::system((command + " > /dev/null 2>&1").c_str()); }

Outcome determinism(const std::string& cli, const fs::path& work) {
  if (cli.empty() || !fs::exists(cli)) return {false, "numsarc binary not given or missing"};
  fs::remove_all(work);
  fs::create_directories(work);
  const auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  const auto config = work / "tiny.toml";
  util::write_file(config,
                   "[neural.model]\nembedding_dim = 16\nfilters_per_width = 8\n"
                   "[neural.training]\nepochs = 3\nbatch_size = 16\n[forest]\nn_estimators = 5\n");
  const std::string base = q(cli) + " --seed 9 --config " + q(config);
  if (run(base + " --output-dir " + q(work) + " synth --count 400") != 0) return {false, "synth failed"};
  const auto data = work / "synth.jsonl";
  std::vector<std::string> compared;
  for (int rep : {1, 2}) {
    const auto out = work / ("run" + std::to_string(rep));
    if (run(base + " --output-dir " + q(out) + " train --model cnn-ff --input " + q(data)) != 0) return {false, "train failed"};
    if (run(base + " --output-dir " + q(out) + " crossval --pipeline forest --folds 3 --input " + q(data)) != 0) {
      return {false, "crossval failed"};
    }
    if (run(base + " --output-dir " + q(out / "cosine") + " crossval --pipeline rule-cosine --folds 3 --input " + q(data)) != 0) {
      return {false, "crossval rule-cosine failed"};
    }
  }
  bool same = true;
  std::size_t files = 0;
  for (const auto* name : {"train_report.json", "model.json", "loss_curve.csv", "crossval_report.json",
                           "cosine/crossval_report.json"}) {
    const auto a = util::read_file(work / "run1" / name);
    const auto b = util::read_file(work / "run2" / name);
    same = same && a == b && !a.empty();
    ++files;
  }
  return {same, std::to_string(files) + " report files compared byte for byte"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "numsarc_acceptance";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric-arithmetic fixtures", metric_fixtures},
      {"rule oracle and synthetic end-to-end",
       [] {
         const auto a = rule_oracle();
         const auto b = synthetic_end_to_end();
         return Outcome{a.pass && b.pass, "(a) " + a.detail + "; (b) " + b.detail};
       }},
      {"gradient verification", gradient_check},
      {"lstm step equivalence", lstm_equivalence},
      {"classical-model oracles", classical_oracles},
      {"shape invariants", shapes},
      {"golden nlp tests", golden_nlp},
      {"determinism", [&] { return determinism(cli, work); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
