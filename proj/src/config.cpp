#include "numsarc/config.hpp"

#include <algorithm>
#include <charconv>

#include "numsarc/error.hpp"
#include "numsarc/fingerprint.hpp"
#include "numsarc/util.hpp"

namespace numsarc {

bool is_pipeline_name(std::string_view name) {
  return std::find(std::begin(kPipelines), std::end(kPipelines), name) != std::end(kPipelines);
}

bool is_neural_pipeline(std::string_view name) {
  return name == "cnn-ff" || name == "lstm-ff" || name == "cnn-lstm-ff";
}

void RunConfig::set_pipeline(const std::string& name) {
  if (!is_pipeline_name(name)) {
    throw UsageError("unknown pipeline '" + name +
                     "' (expected rule-exact, rule-cosine, knn, svm, forest, cnn-ff, lstm-ff or cnn-lstm-ff)");
  }
  pipeline = name;
  if (is_neural_pipeline(name)) {
    const auto arch = neural::parse_architecture(name);
    model = neural::ModelConfig::preset(arch);
    training = neural::TrainingConfig::preset(arch);
  }
  rule.strategy = name == "rule-cosine" ? rulebase::Strategy::Cosine : rulebase::Strategy::Exact;
}

void RunConfig::set_seed(std::uint64_t value) {
  seed = value;
  sgns.seed = value;
  forest.seed = value;
  training.seed = value;
}

void RunConfig::validate() const {
  if (!is_pipeline_name(pipeline)) throw UsageError("unknown pipeline '" + pipeline + "'");
  if (folds < 2) throw UsageError("folds must be at least 2");
  if (!(rule.z > 0)) throw UsageError("rule z must be positive");
  if (knn_k == 0) throw UsageError("knn k must be positive");
  features.validate();
  sgns.validate();
  if (is_neural_pipeline(pipeline)) {
    model.validate();
    training.validate();
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json features_json = features.to_json();
  features_json.erase("units");
  return {{"pipeline", pipeline},
          {"seed", seed},
          {"folds", folds},
          {"data", {{"train", train_path}, {"test", test_path}, {"embeddings", embeddings_path}}},
          {"rule", {{"z", rule.z}, {"min_similarity", rule.min_similarity}}},
          {"sgns",
           {{"dim", sgns.dim},
            {"window", sgns.window},
            {"negatives", sgns.negatives},
            {"epochs", sgns.epochs},
            {"learning_rate", sgns.learning_rate},
            {"min_count", sgns.min_count},
            {"seed", sgns.seed}}},
          {"features", features_json},
          {"knn", {{"k", knn_k}}},
          {"svm", {{"C", svm.C}, {"gamma", svm.gamma}, {"tol", svm.tol}, {"max_iter_factor", svm.max_iter_factor}, {"grid_search", svm_grid_search}}},
          {"forest",
           {{"n_estimators", forest.n_estimators},
            {"max_features", forest.max_features},
            {"min_samples_split", forest.min_samples_split}}},
          {"neural", {{"model", model.to_json()}, {"training", training.to_json()}}}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("config must be an object");
  RunConfig c;
  try {
    c.set_pipeline(j.value("pipeline", c.pipeline));
    c.set_seed(j.value("seed", c.seed));
    c.folds = j.value("folds", c.folds);
    if (j.contains("data")) {
      const auto& d = j.at("data");
      c.train_path = d.value("train", c.train_path);
      c.test_path = d.value("test", c.test_path);
      c.embeddings_path = d.value("embeddings", c.embeddings_path);
    }
    if (j.contains("rule")) {
      c.rule.z = j["rule"].value("z", c.rule.z);
      c.rule.min_similarity = j["rule"].value("min_similarity", c.rule.min_similarity);
    }
    if (j.contains("sgns")) {
      const auto& s = j.at("sgns");
      c.sgns.dim = s.value("dim", c.sgns.dim);
      c.sgns.window = s.value("window", c.sgns.window);
      c.sgns.negatives = s.value("negatives", c.sgns.negatives);
      c.sgns.epochs = s.value("epochs", c.sgns.epochs);
      c.sgns.learning_rate = s.value("learning_rate", c.sgns.learning_rate);
      c.sgns.min_count = s.value("min_count", c.sgns.min_count);
      c.sgns.seed = s.value("seed", c.sgns.seed);
    }
    if (j.contains("features")) {
      auto merged = c.features.to_json();
      merged.update(j.at("features"));
      c.features = features::FeatureConfig::from_json(merged);
    }
    if (j.contains("knn")) c.knn_k = j["knn"].value("k", c.knn_k);
    if (j.contains("svm")) {
      const auto& s = j.at("svm");
      c.svm.C = s.value("C", c.svm.C);
      c.svm.gamma = s.value("gamma", c.svm.gamma);
      c.svm.tol = s.value("tol", c.svm.tol);
      c.svm.max_iter_factor = s.value("max_iter_factor", c.svm.max_iter_factor);
      c.svm_grid_search = s.value("grid_search", c.svm_grid_search);
    }
    if (j.contains("forest")) {
      const auto& f = j.at("forest");
      c.forest.n_estimators = f.value("n_estimators", c.forest.n_estimators);
      c.forest.max_features = f.value("max_features", c.forest.max_features);
      c.forest.min_samples_split = f.value("min_samples_split", c.forest.min_samples_split);
    }
    if (j.contains("neural")) {
      const auto& n = j.at("neural");
      if (n.contains("model")) {
        auto merged = c.model.to_json();
        merged.update(n.at("model"));
        merged["architecture"] = c.model.to_json()["architecture"];
        c.model = neural::ModelConfig::from_json(merged);
      }
      if (n.contains("training")) {
        auto merged = c.training.to_json();
        merged.update(n.at("training"));
        c.training = neural::TrainingConfig::from_json(merged);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed config: ") + e.what());
  }
  if (!j.contains("sgns") || !j["sgns"].contains("seed")) c.sgns.seed = c.seed;
  c.forest.seed = c.seed;
  c.training.seed = c.seed;
  c.validate();
  return c;
}

std::string RunConfig::fingerprint() const {
  Fingerprint fp;
  fp.add(std::string_view(to_json().dump()));
  return fp.hex();
}

namespace {

[[noreturn]] void toml_error(std::size_t line, const std::string& message) {
  throw DataError("config line " + std::to_string(line) + ": " + message);
}

std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

nlohmann::json parse_toml_value(std::string_view raw, std::size_t line) {
  const std::string v = std::string(util::trim(raw));
  if (v.empty()) toml_error(line, "missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') toml_error(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        const char e = v[++i];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
      } else {
        out += v[i];
      }
    }
    return out;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '[') {
    if (v.back() != ']') toml_error(line, "unterminated array");
    nlohmann::json arr = nlohmann::json::array();
    std::string inner = v.substr(1, v.size() - 2);
    std::string item;
    bool in_string = false;
    for (char ch : inner + ",") {
      if (ch == '"') in_string = !in_string;
      if (ch == ',' && !in_string) {
        if (!util::trim(item).empty()) arr.push_back(parse_toml_value(item, line));
        item.clear();
      } else {
        item += ch;
      }
    }
    return arr;
  }
  std::string digits;
  for (char ch : v) {
    if (ch != '_') digits += ch;
  }
  const bool is_float = digits.find_first_of(".eE") != std::string::npos;
  if (!is_float) {
    std::int64_t iv = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), iv);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return iv;
  }
  double dv = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), dv);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) toml_error(line, "cannot parse value '" + v + "'");
  return dv;
}

}  // namespace

nlohmann::json parse_toml(std::string_view content) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;
  std::size_t line_no = 0;
  for (const auto& raw_line : util::split_lines(content)) {
    ++line_no;
    const std::string line = std::string(util::trim(strip_comment(raw_line)));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) toml_error(line_no, "malformed table header");
      table = &root;
      std::string name = std::string(util::trim(std::string_view(line).substr(1, line.size() - 2)));
      std::size_t start = 0;
      while (start <= name.size()) {
        const auto dot = name.find('.', start);
        const std::string part = std::string(util::trim(std::string_view(name).substr(start, dot == std::string::npos ? std::string::npos : dot - start)));
        if (part.empty()) toml_error(line_no, "empty table name segment");
        auto& next = (*table)[part];
        if (next.is_null()) next = nlohmann::json::object();
        if (!next.is_object()) toml_error(line_no, "'" + part + "' is not a table");
        table = &next;
        if (dot == std::string::npos) break;
        start = dot + 1;
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) toml_error(line_no, "expected key = value");
    std::string key = std::string(util::trim(std::string_view(line).substr(0, eq)));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    if (key.empty()) toml_error(line_no, "empty key");
    if (table->contains(key)) toml_error(line_no, "duplicate key '" + key + "'");
    (*table)[key] = parse_toml_value(std::string_view(line).substr(eq + 1), line_no);
  }
  return root;
}

nlohmann::json read_config_json(const std::filesystem::path& path) {
  const std::string content = util::read_file(path);
  if (util::to_lower(path.extension().string()) == ".toml") return parse_toml(content);
  try {
    return nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("cannot parse config " + path.string() + ": " + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) { return RunConfig::from_json(read_config_json(path)); }

}  // namespace numsarc
