#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "emtl/corpus.hpp"
#include "emtl/engine.hpp"

namespace emtl {

enum class EncoderKind { MeanPool, Cnn, Lstm, CnnLstm };

std::string encoder_kind_name(EncoderKind kind);
EncoderKind encoder_kind_from(const std::string& name);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::Lstm;
  int embedding_dim = 50;
  int cnn_filters = 32;
  int cnn_width = 5;
  int lstm_units = 100;
  int max_len = 64;
};

enum class AuxTask { None, EmotionEkman, EmotionPlutchik, Domain };

std::string aux_task_name(AuxTask aux);            // none | ekman | plutchik | domain
AuxTask aux_task_from(const std::string& name);
std::string setting_name(AuxTask aux);             // STL | MTL (Ekman) | ...

// Shared encoder with a 2-logit veracity head and, for multi-task models, an
// n-logit auxiliary head over the same representation. Parameters are plain
// named tensors; each training batch leafs them onto a fresh tape.
struct MtlModel {
  EncoderConfig encoder;
  AuxTask aux = AuxTask::None;
  int n_aux = 0;
  int vocab_size = 0;
  std::uint64_t seed = 0;
  std::map<std::string, Tensor> params;

  bool multi_task() const { return aux != AuxTask::None; }
  int representation_dim() const;
};

// Deterministic init: every parameter draws from its own named stream, so the
// shared encoder and veracity head of an STL and an MTL model built from the
// same seed are bitwise identical.
MtlModel build_model(const EncoderConfig& encoder, AuxTask aux, int n_aux, int vocab_size,
                     std::uint64_t seed);

struct Batch {
  int batch_size = 0;
  int max_len = 0;
  std::vector<int> token_ids;   // [B * max_len]
  std::vector<int> lengths;     // [B]
  std::vector<int> labels;      // [B]
  std::vector<int> aux_labels;  // [B] for multi-task batches, else empty
};

Batch make_batch(const EncodedCorpus& corpus, const std::vector<int>& indices, AuxTask aux);

struct ModelVars {
  std::map<std::string, Var> params;
};
ModelVars leaf_params(Tape& tape, const MtlModel& model);

struct ForwardVars {
  Var representation;
  Var z_t, y_t;
  Var z_e, y_e;  // ids stay -1 for single-task models
};
ForwardVars model_forward(Tape& tape, const MtlModel& model, const ModelVars& vars,
                          const Batch& batch);

// Inference helper: runs a forward pass on an internal tape and returns the
// logits and probability rows.
struct BatchOutput {
  Tensor z_t, y_t;
  Tensor z_e, y_e;  // empty for single-task models
};
BatchOutput forward(const MtlModel& model, const Batch& batch);

// argmax with ties broken toward the lowest index
int predict_row(const Tensor& dist, int row);
std::vector<int> predict(const Tensor& dist);

void save_checkpoint(const MtlModel& model, const std::string& path, std::uint64_t config_hash);
MtlModel load_checkpoint(const std::string& path);

}  // namespace emtl
