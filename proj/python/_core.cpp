#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "numsarc/config.hpp"
#include "numsarc/corpus.hpp"
#include "numsarc/error.hpp"
#include "numsarc/eval.hpp"
#include "numsarc/pipeline.hpp"
#include "numsarc/synth.hpp"
#include "numsarc/text.hpp"

namespace py = pybind11;
using namespace numsarc;

namespace {

const text::Analyzer& analyzer() {
  static const text::Analyzer a;
  return a;
}

// Tweets cross the boundary as JSON arrays of {"id", "text", "label"?, "surface"?}.
std::vector<text::AnalyzedTweet> analyze_tweets(const std::string& tweets_json) {
  const auto arr = nlohmann::json::parse(tweets_json);
  if (!arr.is_array()) throw DataError("expected a list of tweets");
  std::vector<text::AnalyzedTweet> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& j = arr[i];
    const auto body = j.at("text").get<std::string>();
    std::optional<int> label;
    if (j.contains("label") && !j["label"].is_null()) label = j["label"].get<int>();
    const auto id = j.contains("id") ? j["id"].get<std::string>() : std::to_string(i);
    out.push_back(analyzer().analyze(id, body, label, j.value("surface", body)));
  }
  return out;
}

std::string analyze_json(const std::string& body) {
  const auto t = analyzer().analyze("", body);
  nlohmann::json tokens = nlohmann::json::array(), tags = nlohmann::json::array(), mentions = nlohmann::json::array();
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    tokens.push_back(t.tokens[i].surface);
    tags.push_back(std::string(text::tag_name(t.tags[i])));
  }
  for (const auto& m : t.mentions) {
    mentions.push_back({{"value", m.value},
                        {"unit", m.unit ? nlohmann::json(*m.unit) : nlohmann::json()},
                        {"position", m.position}});
  }
  return nlohmann::json{{"tokens", tokens}, {"tags", tags}, {"noun_phrases", t.noun_phrase_words}, {"mentions", mentions}}
      .dump();
}

RunConfig config_from(const std::string& name, const std::string& overrides_json, std::uint64_t seed) {
  auto j = overrides_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(overrides_json);
  j["pipeline"] = name;
  j["seed"] = seed;
  return RunConfig::from_json(j);
}

class PyPipeline {
 public:
  PyPipeline(const std::string& name, const std::string& overrides_json, std::uint64_t seed)
      : pipeline_(eval::make_pipeline(config_from(name, overrides_json, seed))) {}
  explicit PyPipeline(std::unique_ptr<eval::Pipeline> p) : pipeline_(std::move(p)) {}

  std::string name() const { return pipeline_->name(); }
  void fit(const std::string& tweets_json) { pipeline_->fit(analyze_tweets(tweets_json)); }
  std::vector<int> predict(const std::string& tweets_json) const { return pipeline_->predict(analyze_tweets(tweets_json)); }
  std::string to_json() const { return pipeline_->to_json().dump(); }
  std::string fingerprints() const { return nlohmann::json(pipeline_->fingerprints()).dump(); }

 private:
  std::unique_ptr<eval::Pipeline> pipeline_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "numerical sarcasm detection core";
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);

  m.def("normalize_tweet", [](const std::string& body, bool keep_case) {
    return corpus::normalize_tweet({"", body, std::nullopt}, corpus::label_hashtags(), keep_case);
  }, py::arg("text"), py::arg("keep_case") = false);
  m.def("label_by_hashtag", &corpus::label_by_hashtag, py::arg("text"));
  m.def("analyze_json", &analyze_json, py::arg("text"));
  m.def("numeric_fraction", [](const std::vector<std::string>& texts) {
    std::vector<corpus::LabeledTweet> c;
    for (const auto& t : texts) c.push_back({"", t, t, 0});
    return corpus::numeric_fraction(c);
  }, py::arg("texts"));

  m.def("metrics_json", [](const std::vector<int>& preds, const std::vector<int>& golds) {
    return eval::MetricsReport::from_confusion(eval::confusion(preds, golds)).to_json().dump();
  }, py::arg("preds"), py::arg("golds"));
  m.def("weighted_average", &eval::weighted_average, py::arg("metric1"), py::arg("metric0"), py::arg("support1"),
        py::arg("support0"));
  m.def("f_score", &eval::f_score, py::arg("precision"), py::arg("recall"));

  m.def("synth_json", [](std::size_t count, std::uint64_t seed, double sigma, double separation) {
    synth::SynthConfig sc{count, 0.5, sigma, separation, seed};
    return corpus::to_jsonl(synth::generate(sc));
  }, py::arg("count") = 2000, py::arg("seed") = 1, py::arg("sigma") = 1.0, py::arg("separation") = 8.0);

  m.def("crossval_json", [](const std::string& name, const std::string& tweets_json, std::size_t folds,
                            std::uint64_t seed, const std::string& overrides_json) {
    const auto config = config_from(name, overrides_json, seed);
    const auto tweets = analyze_tweets(tweets_json);
    std::vector<std::string> ids;
    std::vector<int> labels;
    for (const auto& t : tweets) {
      ids.push_back(t.id);
      labels.push_back(t.label.value_or(0));
    }
    const auto assignment = corpus::stratified_kfold(ids, labels, folds, seed);
    return eval::crossvalidate([&] { return eval::make_pipeline(config); }, tweets, assignment).to_json().dump();
  }, py::arg("pipeline"), py::arg("tweets_json"), py::arg("folds") = 5, py::arg("seed") = 1,
     py::arg("overrides_json") = "");

  py::class_<PyPipeline>(m, "_Pipeline")
      .def(py::init<const std::string&, const std::string&, std::uint64_t>(), py::arg("name"),
           py::arg("overrides_json") = "", py::arg("seed") = 1)
      .def_property_readonly("name", &PyPipeline::name)
      .def("fit", &PyPipeline::fit)
      .def("predict", &PyPipeline::predict)
      .def("to_json", &PyPipeline::to_json)
      .def("fingerprints", &PyPipeline::fingerprints);
  m.def("_load_pipeline", [](const std::string& artifact) {
    return PyPipeline(eval::load_pipeline(nlohmann::json::parse(artifact)));
  });
}
