#include "numsarc/eval.hpp"

#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "numsarc/error.hpp"
#include "numsarc/util.hpp"

namespace numsarc::eval {

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> golds) {
  if (preds.size() != golds.size()) {
    throw UsageError("confusion: " + std::to_string(preds.size()) + " predictions for " +
                     std::to_string(golds.size()) + " gold labels");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int p = preds[i];
    const int g = golds[i];
    if ((p != 0 && p != 1) || (g != 0 && g != 1)) throw UsageError("confusion: labels must be 0 or 1");
    if (p == 1 && g == 1) ++cm.tp;
    else if (p == 1) ++cm.fp;
    else if (g == 1) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

double f_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(std::size_t hit, std::size_t false_alarm, std::size_t miss) {
  ClassMetrics m;
  m.precision = ratio(hit, hit + false_alarm);
  m.recall = ratio(hit, hit + miss);
  m.f1 = f_score(m.precision, m.recall);
  m.support = hit + miss;
  return m;
}

nlohmann::json class_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

}  // namespace

PerClass prf_per_class(const ConfusionMatrix& cm) {
  return {class_metrics(cm.tp, cm.fp, cm.fn), class_metrics(cm.tn, cm.fn, cm.fp)};
}

double weighted_average(double metric1, double metric0, double support1, double support0) {
  if (support1 < 0 || support0 < 0) throw UsageError("weighted_average: negative support");
  const double total = support1 + support0;
  if (total <= 0) throw UsageError("weighted_average: zero total support");
  return (metric1 * support1 + metric0 * support0) / total;
}

MetricsReport MetricsReport::from_confusion(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.cm = cm;
  r.classes = prf_per_class(cm);
  if (cm.total() == 0) return r;
  const double s1 = static_cast<double>(r.classes.sarcastic.support);
  const double s0 = static_cast<double>(r.classes.non_sarcastic.support);
  r.precision_avg = weighted_average(r.classes.sarcastic.precision, r.classes.non_sarcastic.precision, s1, s0);
  r.recall_avg = weighted_average(r.classes.sarcastic.recall, r.classes.non_sarcastic.recall, s1, s0);
  r.f_avg = weighted_average(r.classes.sarcastic.f1, r.classes.non_sarcastic.f1, s1, s0);
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  return r;
}

nlohmann::json MetricsReport::to_json() const {
  return {{"class_1", class_json(classes.sarcastic)},
          {"class_0", class_json(classes.non_sarcastic)},
          {"precision_avg", precision_avg},
          {"recall_avg", recall_avg},
          {"f_avg", f_avg},
          {"accuracy", accuracy},
          {"confusion", {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}}}};
}

MetricsReport mean_report(const std::vector<MetricsReport>& reports) {
  MetricsReport out;
  if (reports.empty()) return out;
  const double n = static_cast<double>(reports.size());
  auto add_class = [n](ClassMetrics& acc, const ClassMetrics& m) {
    acc.precision += m.precision / n;
    acc.recall += m.recall / n;
    acc.f1 += m.f1 / n;
    acc.support += m.support;
  };
  for (const auto& r : reports) {
    add_class(out.classes.sarcastic, r.classes.sarcastic);
    add_class(out.classes.non_sarcastic, r.classes.non_sarcastic);
    out.precision_avg += r.precision_avg / n;
    out.recall_avg += r.recall_avg / n;
    out.f_avg += r.f_avg / n;
    out.accuracy += r.accuracy / n;
    out.cm.tp += r.cm.tp;
    out.cm.fp += r.cm.fp;
    out.cm.fn += r.cm.fn;
    out.cm.tn += r.cm.tn;
  }
  return out;
}

std::string format_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::size_t width = 8;
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  std::ostringstream out;
  auto cell = [&out](double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, " %6.2f", util::round_half_up(v, 2));
    out << buf;
  };
  out << std::string(width, ' ');
  for (const char* h : {"P(1)", "P(0)", "P(avg)", "R(1)", "R(0)", "R(avg)", "F(1)", "F(0)", "F(avg)"}) {
    char buf[16];
    std::snprintf(buf, sizeof buf, " %6s", h);
    out << buf;
  }
  out << '\n';
  for (const auto& [name, r] : rows) {
    out << name << std::string(width - name.size(), ' ');
    cell(r.classes.sarcastic.precision);
    cell(r.classes.non_sarcastic.precision);
    cell(r.precision_avg);
    cell(r.classes.sarcastic.recall);
    cell(r.classes.non_sarcastic.recall);
    cell(r.recall_avg);
    cell(r.classes.sarcastic.f1);
    cell(r.classes.non_sarcastic.f1);
    cell(r.f_avg);
    out << '\n';
  }
  return out.str();
}

std::vector<int> gold_labels(const std::vector<text::AnalyzedTweet>& tweets) {
  std::vector<int> y;
  y.reserve(tweets.size());
  for (const auto& t : tweets) {
    if (!t.label) throw DataError("tweet '" + t.id + "' has no label");
    y.push_back(*t.label);
  }
  return y;
}

nlohmann::json CrossValReport::to_json() const {
  nlohmann::json per_fold = nlohmann::json::array();
  for (const auto& f : folds) {
    per_fold.push_back({{"fold", f.fold},
                        {"train_size", f.train_size},
                        {"test_size", f.test_size},
                        {"metrics", f.report.to_json()},
                        {"fingerprints", f.fingerprints}});
  }
  return {{"folds", per_fold}, {"mean", mean.to_json()}};
}

CrossValReport crossvalidate(const PipelineFactory& factory, const std::vector<text::AnalyzedTweet>& dataset,
                             const corpus::FoldAssignment& folds) {
  if (folds.ids.size() != folds.folds.size()) throw DataError("fold assignment: ids and folds differ in length");
  if (folds.k < 2) throw UsageError("crossvalidate needs at least 2 folds");
  std::unordered_map<std::string, std::size_t> fold_of;
  for (std::size_t i = 0; i < folds.ids.size(); ++i) {
    if (folds.folds[i] >= folds.k) throw DataError("fold assignment: fold index out of range for '" + folds.ids[i] + "'");
    if (!fold_of.emplace(folds.ids[i], folds.folds[i]).second) {
      throw DataError("fold assignment: duplicate id '" + folds.ids[i] + "'");
    }
  }
  std::set<std::string> dataset_ids;
  for (const auto& t : dataset) {
    if (!dataset_ids.insert(t.id).second) throw DataError("dataset: duplicate id '" + t.id + "'");
    if (!fold_of.count(t.id)) throw DataError("fold assignment does not cover tweet '" + t.id + "'");
  }
  for (const auto& id : folds.ids) {
    if (!dataset_ids.count(id)) throw DataError("fold assignment references unknown id '" + id + "'");
  }
  gold_labels(dataset);

  CrossValReport out;
  std::vector<MetricsReport> reports;
  for (std::size_t f = 0; f < folds.k; ++f) {
    std::vector<text::AnalyzedTweet> train;
    std::vector<text::AnalyzedTweet> test;
    for (const auto& t : dataset) (fold_of.at(t.id) == f ? test : train).push_back(t);
    if (test.empty() || train.empty()) throw DataError("fold " + std::to_string(f) + " is empty");
    auto pipeline = factory();
    pipeline->fit(train);
    const auto preds = pipeline->predict(test);
    const auto golds = gold_labels(test);
    FoldResult r;
    r.fold = f;
    r.train_size = train.size();
    r.test_size = test.size();
    r.report = MetricsReport::from_confusion(confusion(preds, golds));
    r.fingerprints = pipeline->fingerprints();
    reports.push_back(r.report);
    out.folds.push_back(std::move(r));
  }
  out.mean = mean_report(reports);
  return out;
}

}  // namespace numsarc::eval
