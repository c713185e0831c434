#include "emtl/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "emtl/analysis.hpp"
#include "emtl/errors.hpp"
#include "emtl/plot.hpp"
#include "json.hpp"

namespace emtl {

namespace fs = std::filesystem;

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kTestFraction = 0.2;        // when no test_path is given
constexpr double kValidationFraction = 0.1;  // carved from the train split

struct PreparedData {
  Corpus train_corpus;  // before the validation carve
  std::string dataset_name;
  Vocabulary vocab;
  ContractionDict dict;
  std::map<std::string, int> domain_index;
  int n_aux = 0;
  EncodedCorpus train, validation, test;
};

// Loads corpora, builds the vocabulary from the training corpus only and
// encodes everything. The test split comes from test_path when present,
// otherwise from a stratified carve. Validation is carved from the train
// split when class sizes allow it.
PreparedData prepare(const ExperimentConfig& config) {
  PreparedData d;
  d.dict = default_contractions();

  Corpus full = load_corpus(config.train_path);
  d.dataset_name = full.name;
  Corpus test_corpus;
  if (!config.test_path.empty()) {
    d.train_corpus = std::move(full);
    test_corpus = load_corpus(config.test_path);
  } else {
    auto [train_part, test_part] = stratified_split(full, kTestFraction, config.seed);
    d.train_corpus = std::move(train_part);
    test_corpus = std::move(test_part);
  }

  if (config.auxiliary == AuxTask::Domain) {
    d.domain_index = build_domain_index(d.train_corpus);
    d.n_aux = static_cast<int>(d.domain_index.size());
    if (d.n_aux < 2)
      throw InvalidInput("domain auxiliary task needs at least 2 distinct domain tags, found " +
                         std::to_string(d.n_aux));
  } else if (config.auxiliary == AuxTask::EmotionEkman) {
    d.n_aux = 6;
  } else if (config.auxiliary == AuxTask::EmotionPlutchik) {
    d.n_aux = 8;
  }

  d.vocab = build_vocab(d.train_corpus, d.dict);

  Corpus train_part = d.train_corpus;
  Corpus val_part;
  try {
    auto [tr, val] = stratified_split(d.train_corpus, kValidationFraction, config.seed);
    train_part = std::move(tr);
    val_part = std::move(val);
  } catch (const InvalidInput&) {
    // too few samples per class for a carve: train without validation
  }

  const auto* dom = d.domain_index.empty() ? nullptr : &d.domain_index;
  d.train = encode_corpus(train_part, d.dict, d.vocab, config.encoder.max_len, dom);
  d.validation = encode_corpus(val_part, d.dict, d.vocab, config.encoder.max_len, dom);
  d.test = encode_corpus(test_corpus, d.dict, d.vocab, config.encoder.max_len, dom);
  return d;
}

void require_out_dir(const ExperimentConfig& config) {
  if (config.out_dir.empty()) throw InvalidInput("config: \"out_dir\" is required");
  fs::create_directories(config.out_dir);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

ordered_json metrics_to_json(const ResultsRow& row, const EvalResult& eval, int train_size,
                             int test_size, const FitResult* fit_result) {
  ordered_json doc;
  doc["format"] = "emtl-metrics/1";
  doc["dataset"] = row.dataset;
  doc["model"] = row.model;
  doc["setting"] = row.setting;
  doc["seed"] = row.seed;
  doc["alpha"] = row.alpha;
  doc["accuracy"] = row.metrics.accuracy;
  doc["precision"] = row.metrics.precision;
  doc["recall"] = row.metrics.recall;
  doc["f1"] = row.metrics.f1;
  doc["confusion"] = {{"tp", eval.cm.tp}, {"tn", eval.cm.tn}, {"fp", eval.cm.fp}, {"fn", eval.cm.fn}};
  doc["flags"] = {{"precision_degenerate", row.metrics.precision_degenerate},
                  {"recall_degenerate", row.metrics.recall_degenerate},
                  {"f1_degenerate", row.metrics.f1_degenerate},
                  {"empty", row.metrics.empty}};
  if (row.aux_accuracy >= 0.0) doc["aux_accuracy"] = row.aux_accuracy;
  doc["train_size"] = train_size;
  doc["test_size"] = test_size;
  if (fit_result) {
    doc["best_epoch"] = fit_result->best_epoch;
    doc["stopped_early"] = fit_result->stopped_early;
    doc["epochs_run"] = static_cast<int>(fit_result->history.size());
  }
  return doc;
}

ResultsRow make_row(const ExperimentConfig& config, const std::string& dataset,
                    const EvalResult& eval) {
  ResultsRow row;
  row.dataset = dataset;
  row.model = encoder_kind_name(config.encoder.kind);
  row.setting = setting_name(config.auxiliary);
  row.metrics = eval.metrics;
  row.aux_accuracy = eval.aux_accuracy;
  row.seed = config.seed;
  row.alpha = config.auxiliary == AuxTask::None ? 0.0 : config.train.weights.alpha;
  return row;
}

int setting_rank(const std::string& setting) {
  if (setting == "STL") return 0;
  if (setting == "MTL (Ekman)") return 1;
  if (setting == "MTL (Plutchik)") return 2;
  if (setting == "MTL (Domain)") return 3;
  return 4;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string results_csv_header() { return "dataset,model,setting,accuracy,precision,recall,f1"; }

std::string results_row_csv(const ResultsRow& row) {
  return row.dataset + "," + row.model + "," + row.setting + "," + metrics_csv_row(row.metrics);
}

ResultsRow cmd_run(const ExperimentConfig& base,
                   const std::map<std::string, std::string>& overrides) {
  ExperimentConfig config = base;
  apply_overrides(config, overrides);
  require_out_dir(config);

  PreparedData data = prepare(config);
  MtlModel model =
      build_model(config.encoder, config.auxiliary, data.n_aux, data.vocab.size(), config.seed);
  FitResult fit_result = fit(model, data.train, data.validation, config.train);
  const LossWeights weights = model.multi_task() ? config.train.weights : LossWeights();
  EvalResult eval = evaluate(model, data.test, weights, config.train.batch_size);

  ResultsRow row = make_row(config, data.dataset_name, eval);

  const fs::path out(config.out_dir);
  write_text((out / "config.json").string(), config_snapshot(config, overrides));
  write_history_csv(fit_result.history, (out / "history.csv").string());
  write_text((out / "metrics.json").string(),
             metrics_to_json(row, eval, data.train.size(), data.test.size(), &fit_result).dump(1) +
                 "\n");
  save_checkpoint(model, (out / "checkpoint.json").string(), config_hash(config));
  save_vocab(data.vocab, (out / "vocab.json").string());
  return row;
}

std::vector<ResultsRow> cmd_cross(const ExperimentConfig& base,
                                  const std::map<std::string, std::string>& overrides) {
  ExperimentConfig config = base;
  apply_overrides(config, overrides);
  if (config.cross_test_path.empty())
    throw InvalidInput("cross-domain evaluation needs \"cross_test_path\"");
  if (config.auxiliary == AuxTask::Domain)
    throw InvalidInput("domain auxiliary task is in-domain only (domain tags do not transfer)");
  require_out_dir(config);

  PreparedData data = prepare(config);
  MtlModel model =
      build_model(config.encoder, config.auxiliary, data.n_aux, data.vocab.size(), config.seed);
  FitResult fit_result = fit(model, data.train, data.validation, config.train);
  const LossWeights weights = model.multi_task() ? config.train.weights : LossWeights();

  EvalResult in_domain = evaluate(model, data.test, weights, config.train.batch_size);

  // the vocabulary is sealed: the cross corpus is encoded with it, unseen
  // tokens fall to <unk>, and nothing is added anywhere
  Corpus cross_corpus = load_corpus(config.cross_test_path);
  EncodedCorpus cross =
      encode_corpus(cross_corpus, data.dict, data.vocab, config.encoder.max_len, nullptr);
  EvalResult cross_eval =
      evaluate(model, cross, weights, config.train.batch_size, /*task_only=*/true);

  ResultsRow row_in = make_row(config, data.dataset_name, in_domain);
  ResultsRow row_cross =
      make_row(config, data.dataset_name + "->" + cross_corpus.name, cross_eval);

  const fs::path out(config.out_dir);
  write_text((out / "config.json").string(), config_snapshot(config, overrides));
  write_history_csv(fit_result.history, (out / "history.csv").string());
  write_text((out / "metrics_indomain.json").string(),
             metrics_to_json(row_in, in_domain, data.train.size(), data.test.size(), &fit_result)
                     .dump(1) +
                 "\n");
  write_text((out / "metrics_cross.json").string(),
             metrics_to_json(row_cross, cross_eval, data.train.size(), cross.size(), &fit_result)
                     .dump(1) +
                 "\n");
  save_checkpoint(model, (out / "checkpoint.json").string(), config_hash(config));
  save_vocab(data.vocab, (out / "vocab.json").string());
  return {row_in, row_cross};
}

std::map<std::string, std::vector<SweepPoint>> cmd_sweep(
    const ExperimentConfig& base, std::vector<EncoderKind> kinds,
    const std::map<std::string, std::string>& overrides) {
  ExperimentConfig config = base;
  apply_overrides(config, overrides);
  if (!config.sweep) throw InvalidInput("sweep: config has no \"sweep\" section");
  if (config.auxiliary == AuxTask::None)
    throw InvalidInput("sweep: an auxiliary task is required (alpha weights its branch)");
  require_out_dir(config);
  if (kinds.empty()) kinds.push_back(config.encoder.kind);

  PreparedData data = prepare(config);
  const fs::path out(config.out_dir);
  write_text((out / "config.json").string(), config_snapshot(config, overrides));

  std::map<std::string, std::vector<SweepPoint>> results;
  std::vector<SweepSeries> series;
  for (EncoderKind kind : kinds) {
    EncoderConfig enc = config.encoder;
    enc.kind = kind;
    SweepConfig sweep{*config.sweep, config.train};
    sweep.base.seed = config.seed;

    auto factory = [&]() {
      return build_model(enc, config.auxiliary, data.n_aux, data.vocab.size(), config.seed);
    };
    std::vector<SweepPoint> points =
        sweep_alpha(sweep, factory, data.train, data.validation, data.test);

    const std::string kind_name = encoder_kind_name(kind);
    const std::string csv_name = kinds.size() == 1 ? "sweep.csv" : "sweep_" + kind_name + ".csv";
    write_sweep_csv(points, (out / csv_name).string());

    SweepSeries s;
    s.name = kind_name;
    double best_alpha = points.front().alpha, best_acc = points.front().metrics.accuracy;
    for (const SweepPoint& p : points) {
      s.points.emplace_back(p.alpha, p.metrics.accuracy);
      if (p.metrics.accuracy > best_acc) {
        best_acc = p.metrics.accuracy;
        best_alpha = p.alpha;
      }
    }
    std::cout << kind_name << ": best accuracy " << fmt6(best_acc) << " at alpha "
              << fmt6(best_alpha) << "\n";
    series.push_back(std::move(s));
    results.emplace(kind_name, std::move(points));
  }
  write_sweep_svg(series, (out / "sweep.svg").string());
  return results;
}

void cmd_pca(const PcaArgs& args) {
  if (args.corpus_path.empty()) throw InvalidInput("pca: corpus path is required");
  if (args.schemes.empty()) throw InvalidInput("pca: at least one scheme is required");
  if (args.embeddings_path.empty() == args.run_dir.empty())
    throw InvalidInput("pca: exactly one feature source (embeddings file or run dir) is required");
  if (args.out_dir.empty()) throw InvalidInput("pca: out_dir is required");
  fs::create_directories(args.out_dir);

  Corpus corpus = load_corpus(args.corpus_path);
  if (corpus.size() < 2) throw InvalidInput("pca: corpus has fewer than 2 samples");

  FeatureMatrix features;
  std::string source_label;
  if (!args.embeddings_path.empty()) {
    FeatureMatrix loaded = load_embeddings(args.embeddings_path);
    std::map<std::string, int> row_of;
    for (int i = 0; i < loaded.count(); ++i) row_of[loaded.ids[static_cast<std::size_t>(i)]] = i;

    features.rows = Tensor::zeros({corpus.size(), loaded.dim()});
    std::vector<std::string> missing;
    for (int i = 0; i < corpus.size(); ++i) {
      const std::string& id = corpus.samples[static_cast<std::size_t>(i)].id;
      auto it = row_of.find(id);
      if (it == row_of.end()) {
        missing.push_back(id);
        continue;
      }
      for (int j = 0; j < loaded.dim(); ++j)
        features.rows.at(i, j) = loaded.rows.at(it->second, j);
      features.ids.push_back(id);
    }
    if (!missing.empty()) {
      std::string msg = "pca: embeddings missing for " + std::to_string(missing.size()) +
                        " sample(s):";
      for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
      throw InvalidInput(msg);
    }
    features.source = FeatureSource::ImportedEmbeddings;
    source_label = "imported embeddings";
  } else {
    const fs::path run(args.run_dir);
    MtlModel model = load_checkpoint((run / "checkpoint.json").string());
    Vocabulary vocab = load_vocab((run / "vocab.json").string());
    ContractionDict dict = default_contractions();
    EncodedCorpus encoded = encode_corpus(corpus, dict, vocab, model.encoder.max_len, nullptr);

    features.rows = Tensor::zeros({corpus.size(), model.representation_dim()});
    const int batch_size = 64;
    for (int start = 0; start < encoded.size(); start += batch_size) {
      std::vector<int> idx;
      for (int i = start; i < std::min(encoded.size(), start + batch_size); ++i) idx.push_back(i);
      Batch batch = make_batch(encoded, idx, AuxTask::None);
      Tape tape;
      ModelVars vars = leaf_params(tape, model);
      ForwardVars fw = model_forward(tape, model, vars, batch);
      const Tensor& rep = tape.value(fw.representation);
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (int j = 0; j < rep.dim(1); ++j)
          features.rows.at(idx[r], j) = rep.at(static_cast<int>(r), j);
    }
    for (const Sample& s : corpus.samples) features.ids.push_back(s.id);
    features.source = FeatureSource::EncoderRepresentation;
    source_label = "encoder representations";
  }

  PcaResult pca = fit_pca(features, args.components);
  Tensor coords = project(features, pca);

  const fs::path out(args.out_dir);
  for (const std::string& scheme_name : args.schemes) {
    const EmotionScheme& scheme = scheme_by_name(scheme_name);
    LegitimacyEmotionViews views = legitimacy_emotion_view(corpus, coords, scheme);
    const std::string stem = "pca_" + scheme.name;
    write_scatter_csv(views, scheme, (out / (stem + "_points.csv")).string());
    write_scatter_svg(views.view0, scheme,
                      corpus.name + " label 0 (" + scheme.name + ", " + source_label + ")",
                      (out / (stem + "_label0.svg")).string());
    write_scatter_svg(views.view1, scheme,
                      corpus.name + " label 1 (" + scheme.name + ", " + source_label + ")",
                      (out / (stem + "_label1.svg")).string());
  }
}

ReportSummary cmd_report(const std::string& dir) {
  if (!fs::is_directory(dir)) throw InvalidInput("report: not a directory: " + dir);

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("metrics", 0) == 0 && entry.path().extension() == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  struct Entry {
    ResultsRow row;
  };
  std::vector<Entry> entries;
  for (const fs::path& file : files) {
    std::ifstream in(file);
    json doc;
    try {
      in >> doc;
    } catch (const json::exception&) {
      continue;  // not a metrics file
    }
    if (doc.value("format", "") != "emtl-metrics/1") continue;
    Entry e;
    e.row.dataset = doc.at("dataset").get<std::string>();
    e.row.model = doc.at("model").get<std::string>();
    e.row.setting = doc.at("setting").get<std::string>();
    e.row.metrics.accuracy = doc.at("accuracy").get<double>();
    e.row.metrics.precision = doc.at("precision").get<double>();
    e.row.metrics.recall = doc.at("recall").get<double>();
    e.row.metrics.f1 = doc.at("f1").get<double>();
    e.row.seed = doc.at("seed").get<std::uint64_t>();
    e.row.alpha = doc.at("alpha").get<double>();
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw InvalidInput("report: no completed runs found under " + dir);

  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.row.dataset != b.row.dataset) return a.row.dataset < b.row.dataset;
    if (a.row.model != b.row.model) return a.row.model < b.row.model;
    return setting_rank(a.row.setting) < setting_rank(b.row.setting);
  });

  ReportSummary summary;
  summary.rows = static_cast<int>(entries.size());
  const fs::path base(dir);
  summary.csv_path = (base / "results.csv").string();
  summary.md_path = (base / "results.md").string();

  std::string csv = results_csv_header() + "\n";
  for (const Entry& e : entries) csv += results_row_csv(e.row) + "\n";
  write_text(summary.csv_path, csv);

  // per (dataset, model) group, bold the best value of each metric column
  std::string md = "| Dataset | Model | Setting | Accuracy | Precision | Recall | F1 |\n";
  md += "|---|---|---|---|---|---|---|\n";
  auto metric = [](const ResultsRow& r, int m) {
    switch (m) {
      case 0: return r.metrics.accuracy;
      case 1: return r.metrics.precision;
      case 2: return r.metrics.recall;
      default: return r.metrics.f1;
    }
  };
  std::size_t group_start = 0;
  while (group_start < entries.size()) {
    std::size_t group_end = group_start;
    while (group_end < entries.size() &&
           entries[group_end].row.dataset == entries[group_start].row.dataset &&
           entries[group_end].row.model == entries[group_start].row.model)
      ++group_end;
    std::array<double, 4> best{};
    for (int m = 0; m < 4; ++m) {
      best[static_cast<std::size_t>(m)] = metric(entries[group_start].row, m);
      for (std::size_t i = group_start; i < group_end; ++i)
        best[static_cast<std::size_t>(m)] =
            std::max(best[static_cast<std::size_t>(m)], metric(entries[i].row, m));
    }
    for (std::size_t i = group_start; i < group_end; ++i) {
      const ResultsRow& r = entries[i].row;
      md += "| " + r.dataset + " | " + r.model + " | " + r.setting + " |";
      for (int m = 0; m < 4; ++m) {
        double v = metric(r, m);
        std::string cell = fmt6(v);
        if (v == best[static_cast<std::size_t>(m)]) cell = "**" + cell + "**";
        md += " " + cell + " |";
      }
      md += "\n";
    }
    group_start = group_end;
  }
  write_text(summary.md_path, md);
  return summary;
}

}  // namespace emtl
