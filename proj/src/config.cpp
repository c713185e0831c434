#include "emtl/config.hpp"

#include <fstream>
#include <sstream>

#include "emtl/errors.hpp"
#include "emtl/prng.hpp"
#include "json.hpp"

namespace emtl {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("config: key \"") + key + "\" has the wrong type");
  }
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidInput(origin + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw InvalidInput(origin + ": config must be a JSON object");

  ExperimentConfig cfg;
  if (!doc.contains("train_path") || !doc["train_path"].is_string())
    throw InvalidInput(origin + ": missing required key \"train_path\"");
  cfg.train_path = doc["train_path"].get<std::string>();
  cfg.test_path = get_or<std::string>(doc, "test_path", "");
  cfg.cross_test_path = get_or<std::string>(doc, "cross_test_path", "");
  cfg.auxiliary = aux_task_from(get_or<std::string>(doc, "auxiliary", "none"));
  cfg.seed = get_or<std::uint64_t>(doc, "seed", 0);
  cfg.out_dir = get_or<std::string>(doc, "out_dir", "");

  if (doc.contains("encoder")) {
    const json& enc = doc["encoder"];
    if (!enc.is_object()) throw InvalidInput(origin + ": \"encoder\" must be an object");
    cfg.encoder.kind = encoder_kind_from(get_or<std::string>(enc, "kind", "lstm"));
    cfg.encoder.embedding_dim = get_or<int>(enc, "embedding_dim", cfg.encoder.embedding_dim);
    cfg.encoder.cnn_filters = get_or<int>(enc, "cnn_filters", cfg.encoder.cnn_filters);
    cfg.encoder.cnn_width = get_or<int>(enc, "cnn_width", cfg.encoder.cnn_width);
    cfg.encoder.lstm_units = get_or<int>(enc, "lstm_units", cfg.encoder.lstm_units);
    cfg.encoder.max_len = get_or<int>(enc, "max_len", cfg.encoder.max_len);
  }

  if (doc.contains("train")) {
    const json& tr = doc["train"];
    if (!tr.is_object()) throw InvalidInput(origin + ": \"train\" must be an object");
    cfg.train.epochs = get_or<int>(tr, "epochs", cfg.train.epochs);
    cfg.train.batch_size = get_or<int>(tr, "batch_size", cfg.train.batch_size);
    cfg.train.lr = get_or<double>(tr, "lr", cfg.train.lr);
    cfg.train.weights = LossWeights(get_or<double>(tr, "alpha", 0.0));
    if (tr.contains("early_stopping")) {
      const json& es = tr["early_stopping"];
      if (!es.is_object()) throw InvalidInput(origin + ": \"early_stopping\" must be an object");
      cfg.train.early_stopping.enabled = get_or<bool>(es, "enabled", false);
      cfg.train.early_stopping.patience = get_or<int>(es, "patience", 1);
      cfg.train.early_stopping.min_delta = get_or<double>(es, "min_delta", 0.0);
    }
  }
  cfg.train.seed = cfg.seed;

  if (doc.contains("sweep") && !doc["sweep"].is_null()) {
    const json& sw = doc["sweep"];
    if (!sw.is_object()) throw InvalidInput(origin + ": \"sweep\" must be an object");
    SweepRange range;
    range.alpha_start = get_or<double>(sw, "start", range.alpha_start);
    range.alpha_step = get_or<double>(sw, "step", range.alpha_step);
    range.alpha_end = get_or<double>(sw, "end", range.alpha_end);
    cfg.sweep = range;
  }
  return cfg;
}

void apply_overrides(ExperimentConfig& config,
                     const std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : overrides) {
    try {
      if (key == "seed") {
        config.seed = std::stoull(value);
        config.train.seed = config.seed;
      } else if (key == "alpha") {
        config.train.weights = LossWeights(std::stod(value));
      } else if (key == "epochs") {
        config.train.epochs = std::stoi(value);
      } else {
        throw InvalidInput("unknown override \"" + key + "\" (supported: seed, alpha, epochs)");
      }
    } catch (const std::logic_error&) {
      throw InvalidInput("override " + key + "=" + value + " is not a valid number");
    }
  }
}

std::string config_snapshot(const ExperimentConfig& config,
                            const std::map<std::string, std::string>& overrides) {
  ordered_json doc;
  doc["train_path"] = config.train_path;
  if (!config.test_path.empty()) doc["test_path"] = config.test_path;
  if (!config.cross_test_path.empty()) doc["cross_test_path"] = config.cross_test_path;
  doc["auxiliary"] = aux_task_name(config.auxiliary);
  doc["encoder"] = {{"kind", encoder_kind_name(config.encoder.kind)},
                    {"embedding_dim", config.encoder.embedding_dim},
                    {"cnn_filters", config.encoder.cnn_filters},
                    {"cnn_width", config.encoder.cnn_width},
                    {"lstm_units", config.encoder.lstm_units},
                    {"max_len", config.encoder.max_len}};
  doc["train"] = {{"epochs", config.train.epochs},
                  {"batch_size", config.train.batch_size},
                  {"lr", config.train.lr},
                  {"alpha", config.train.weights.alpha},
                  {"early_stopping",
                   {{"enabled", config.train.early_stopping.enabled},
                    {"patience", config.train.early_stopping.patience},
                    {"min_delta", config.train.early_stopping.min_delta}}}};
  if (config.sweep)
    doc["sweep"] = {{"start", config.sweep->alpha_start},
                    {"step", config.sweep->alpha_step},
                    {"end", config.sweep->alpha_end}};
  doc["seed"] = config.seed;
  doc["out_dir"] = config.out_dir;
  if (!overrides.empty()) {
    ordered_json ov;
    for (const auto& [key, value] : overrides) ov[key] = value;
    doc["overrides"] = std::move(ov);
  }
  return doc.dump(1) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  return RngStream::fnv1a(config_snapshot(config, {}));
}

}  // namespace emtl
