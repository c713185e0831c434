#pragma once

#include <map>
#include <string>
#include <vector>

#include "emtl/config.hpp"
#include "emtl/metrics.hpp"
#include "emtl/models.hpp"
#include "emtl/training.hpp"

namespace emtl {

struct ResultsRow {
  std::string dataset;
  std::string model;    // encoder kind
  std::string setting;  // STL | MTL (Ekman) | MTL (Plutchik) | MTL (Domain)
  MetricsReport metrics;
  double aux_accuracy = -1.0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
};

// Trains per config, evaluates on the test split and writes config.json,
// history.csv, metrics.json, checkpoint.json and vocab.json into out_dir.
ResultsRow cmd_run(const ExperimentConfig& config,
                   const std::map<std::string, std::string>& overrides = {});

// Trains on the train corpus, evaluates in-domain (its test split) and on the
// full cross corpus with the vocabulary sealed before evaluation. Returns the
// in-domain row followed by the train->cross row.
std::vector<ResultsRow> cmd_cross(const ExperimentConfig& config,
                                  const std::map<std::string, std::string>& overrides = {});

// One sweep per encoder kind (defaults to the config's); emits per-kind curve
// CSVs and one SVG with a series per kind. Returns points keyed by kind name.
std::map<std::string, std::vector<SweepPoint>> cmd_sweep(
    const ExperimentConfig& config, std::vector<EncoderKind> kinds = {},
    const std::map<std::string, std::string>& overrides = {});

struct PcaArgs {
  std::string corpus_path;
  std::vector<std::string> schemes;  // "ekman" and/or "plutchik"
  std::string embeddings_path;       // imported vectors, or
  std::string run_dir;               // checkpoint.json + vocab.json from a run
  std::string out_dir;
  int components = 3;
};

// Fits PCA over the whole corpus and writes, per scheme, a scatter CSV plus
// one SVG per veracity label view.
void cmd_pca(const PcaArgs& args);

struct ReportSummary {
  int rows = 0;
  std::string csv_path;
  std::string md_path;
};

// Aggregates every metrics*.json under dir into results.csv and results.md
// (best per (dataset, model) bolded per metric column).
ReportSummary cmd_report(const std::string& dir);

std::string results_csv_header();
std::string results_row_csv(const ResultsRow& row);

}  // namespace emtl
