#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "emtl/models.hpp"
#include "emtl/training.hpp"

namespace emtl {

// One experiment = one immutable config snapshot. JSON keys:
//   train_path, test_path?, cross_test_path?, auxiliary, encoder{kind,
//   embedding_dim, cnn_filters, cnn_width, lstm_units, max_len},
//   train{epochs, batch_size, lr, alpha, early_stopping{enabled, patience,
//   min_delta}}, sweep{start, step, end}?, seed, out_dir
struct ExperimentConfig {
  std::string train_path;
  std::string test_path;        // empty: carve a stratified 20% test split
  std::string cross_test_path;  // empty unless cross-domain evaluation
  AuxTask auxiliary = AuxTask::None;
  EncoderConfig encoder;
  TrainConfig train;
  std::optional<SweepRange> sweep;
  std::uint64_t seed = 0;
  std::string out_dir;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text, const std::string& origin);

// Scalar CLI overrides recorded into the snapshot: keys seed, alpha, epochs.
void apply_overrides(ExperimentConfig& config,
                     const std::map<std::string, std::string>& overrides);

// Snapshot of the exact configuration; overridden keys are listed under
// "overrides" so a rerun of the snapshot reproduces the run bitwise.
std::string config_snapshot(const ExperimentConfig& config,
                            const std::map<std::string, std::string>& overrides);

std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace emtl
