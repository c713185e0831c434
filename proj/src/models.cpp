#include "emtl/models.hpp"

#include <fstream>

#include "emtl/errors.hpp"
#include "json.hpp"

namespace emtl {

namespace {
using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;
}  // namespace

std::string encoder_kind_name(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::MeanPool: return "mean_pool";
    case EncoderKind::Cnn: return "cnn";
    case EncoderKind::Lstm: return "lstm";
    case EncoderKind::CnnLstm: return "cnn_lstm";
  }
  return "?";
}

EncoderKind encoder_kind_from(const std::string& name) {
  if (name == "mean_pool") return EncoderKind::MeanPool;
  if (name == "cnn") return EncoderKind::Cnn;
  if (name == "lstm") return EncoderKind::Lstm;
  if (name == "cnn_lstm") return EncoderKind::CnnLstm;
  throw InvalidInput("unknown encoder kind \"" + name +
                     "\" (expected mean_pool, cnn, lstm or cnn_lstm)");
}

std::string aux_task_name(AuxTask aux) {
  switch (aux) {
    case AuxTask::None: return "none";
    case AuxTask::EmotionEkman: return "ekman";
    case AuxTask::EmotionPlutchik: return "plutchik";
    case AuxTask::Domain: return "domain";
  }
  return "?";
}

AuxTask aux_task_from(const std::string& name) {
  if (name == "none") return AuxTask::None;
  if (name == "ekman") return AuxTask::EmotionEkman;
  if (name == "plutchik") return AuxTask::EmotionPlutchik;
  if (name == "domain") return AuxTask::Domain;
  throw InvalidInput("unknown auxiliary task \"" + name +
                     "\" (expected none, ekman, plutchik or domain)");
}

std::string setting_name(AuxTask aux) {
  switch (aux) {
    case AuxTask::None: return "STL";
    case AuxTask::EmotionEkman: return "MTL (Ekman)";
    case AuxTask::EmotionPlutchik: return "MTL (Plutchik)";
    case AuxTask::Domain: return "MTL (Domain)";
  }
  return "?";
}

int MtlModel::representation_dim() const {
  switch (encoder.kind) {
    case EncoderKind::MeanPool: return encoder.embedding_dim;
    case EncoderKind::Cnn: return encoder.cnn_filters;
    case EncoderKind::Lstm: return encoder.lstm_units;
    case EncoderKind::CnnLstm: return encoder.lstm_units;
  }
  return 0;
}

namespace {

void validate_encoder(const EncoderConfig& e) {
  if (e.embedding_dim <= 0 || e.max_len <= 0)
    throw InvalidInput("encoder: embedding_dim and max_len must be positive");
  bool has_cnn = e.kind == EncoderKind::Cnn || e.kind == EncoderKind::CnnLstm;
  bool has_lstm = e.kind == EncoderKind::Lstm || e.kind == EncoderKind::CnnLstm;
  if (has_cnn) {
    if (e.cnn_filters <= 0 || e.cnn_width <= 0)
      throw InvalidInput("encoder: cnn_filters and cnn_width must be positive");
    if (e.max_len < e.cnn_width)
      throw InvalidInput("encoder: max_len " + std::to_string(e.max_len) +
                         " shorter than cnn_width " + std::to_string(e.cnn_width));
  }
  if (has_lstm && e.lstm_units <= 0) throw InvalidInput("encoder: lstm_units must be positive");
  if (e.kind == EncoderKind::CnnLstm && (e.max_len - e.cnn_width + 1) / 2 < 1)
    throw InvalidInput("encoder: cnn_lstm needs at least one pooled step");
}

}  // namespace

MtlModel build_model(const EncoderConfig& encoder, AuxTask aux, int n_aux, int vocab_size,
                     std::uint64_t seed) {
  validate_encoder(encoder);
  if (vocab_size < 2) throw InvalidInput("build_model: vocabulary size must be at least 2");
  switch (aux) {
    case AuxTask::None:
      if (n_aux != 0)
        throw InvalidInput("build_model: single-task model cannot have n_aux=" +
                           std::to_string(n_aux));
      break;
    case AuxTask::EmotionEkman:
      if (n_aux != 6) throw InvalidInput("build_model: ekman auxiliary head needs n_aux=6");
      break;
    case AuxTask::EmotionPlutchik:
      if (n_aux != 8) throw InvalidInput("build_model: plutchik auxiliary head needs n_aux=8");
      break;
    case AuxTask::Domain:
      if (n_aux < 2)
        throw InvalidInput("build_model: domain auxiliary head needs n_aux >= 2, got " +
                           std::to_string(n_aux));
      break;
  }

  MtlModel m;
  m.encoder = encoder;
  m.aux = aux;
  m.n_aux = n_aux;
  m.vocab_size = vocab_size;
  m.seed = seed;

  auto param = [&](const std::string& name, std::vector<int> shape) {
    m.params.emplace(name, init_uniform(std::move(shape), seed, name));
  };

  const int E = encoder.embedding_dim;
  param("embedding", {vocab_size, E});

  int rep_in = E;  // channel width feeding the lstm, when present
  if (encoder.kind == EncoderKind::Cnn || encoder.kind == EncoderKind::CnnLstm) {
    param("conv.kernel", {encoder.cnn_filters, encoder.cnn_width, E});
    param("conv.bias", {encoder.cnn_filters});
    rep_in = encoder.cnn_filters;
  }
  if (encoder.kind == EncoderKind::Lstm || encoder.kind == EncoderKind::CnnLstm) {
    const int H = encoder.lstm_units;
    param("lstm.wx", {rep_in, 4 * H});
    param("lstm.wh", {H, 4 * H});
    param("lstm.bias", {4 * H});
  }

  const int R = m.representation_dim();
  param("head_task.w", {R, 2});
  param("head_task.b", {2});
  if (aux != AuxTask::None) {
    param("head_aux.w", {R, n_aux});
    param("head_aux.b", {n_aux});
  }
  return m;
}

Batch make_batch(const EncodedCorpus& corpus, const std::vector<int>& indices, AuxTask aux) {
  Batch b;
  b.batch_size = static_cast<int>(indices.size());
  b.max_len = corpus.max_len;
  b.token_ids.reserve(static_cast<std::size_t>(b.batch_size) * b.max_len);
  for (int idx : indices) {
    const EncodedSample& s = corpus.samples[static_cast<std::size_t>(idx)];
    b.token_ids.insert(b.token_ids.end(), s.token_ids.begin(), s.token_ids.end());
    b.lengths.push_back(s.true_length);
    b.labels.push_back(s.label);
    if (aux != AuxTask::None) {
      int tag = aux == AuxTask::EmotionEkman      ? s.emotion_ekman
                : aux == AuxTask::EmotionPlutchik ? s.emotion_plutchik
                                                  : s.domain_index;
      if (tag < 0)
        throw InvalidInput("make_batch: sample \"" + s.id + "\" lacks the " + aux_task_name(aux) +
                           " tag");
      b.aux_labels.push_back(tag);
    }
  }
  return b;
}

ModelVars leaf_params(Tape& tape, const MtlModel& model) {
  ModelVars vars;
  for (const auto& [name, tensor] : model.params) vars.params.emplace(name, tape.leaf(tensor, name));
  return vars;
}

ForwardVars model_forward(Tape& tape, const MtlModel& model, const ModelVars& vars,
                          const Batch& batch) {
  auto p = [&](const char* name) {
    auto it = vars.params.find(name);
    if (it == vars.params.end())
      throw std::invalid_argument(std::string("model_forward: missing parameter ") + name);
    return it->second;
  };
  if (batch.max_len != model.encoder.max_len)
    throw std::invalid_argument("model_forward: batch max_len " + std::to_string(batch.max_len) +
                                " != encoder max_len " + std::to_string(model.encoder.max_len));

  ForwardVars out;
  Var emb = tape.embedding_lookup(p("embedding"), batch.token_ids, batch.batch_size, batch.max_len);

  switch (model.encoder.kind) {
    case EncoderKind::MeanPool:
      out.representation = tape.mean_pool(emb, batch.lengths);
      break;
    case EncoderKind::Cnn: {
      Var conv = tape.conv1d(emb, p("conv.kernel"), p("conv.bias"));
      int lo = batch.max_len - model.encoder.cnn_width + 1;
      Var pooled = tape.max_pool1d(conv, lo);  // global max over time
      out.representation = tape.reshape(pooled, {batch.batch_size, model.encoder.cnn_filters});
      break;
    }
    case EncoderKind::Lstm:
      out.representation = tape.lstm_sequence(emb, p("lstm.wx"), p("lstm.wh"), p("lstm.bias"));
      break;
    case EncoderKind::CnnLstm: {
      Var conv = tape.conv1d(emb, p("conv.kernel"), p("conv.bias"));
      Var pooled = tape.max_pool1d(conv, 2);
      out.representation =
          tape.lstm_sequence(pooled, p("lstm.wx"), p("lstm.wh"), p("lstm.bias"));
      break;
    }
  }

  out.z_t = tape.dense(out.representation, p("head_task.w"), p("head_task.b"));
  out.y_t = tape.softmax(out.z_t);
  if (model.multi_task()) {
    out.z_e = tape.dense(out.representation, p("head_aux.w"), p("head_aux.b"));
    out.y_e = tape.softmax(out.z_e);
  }
  return out;
}

BatchOutput forward(const MtlModel& model, const Batch& batch) {
  Tape tape;
  ModelVars vars = leaf_params(tape, model);
  ForwardVars fw = model_forward(tape, model, vars, batch);
  BatchOutput out;
  out.z_t = tape.value(fw.z_t);
  out.y_t = tape.value(fw.y_t);
  if (model.multi_task()) {
    out.z_e = tape.value(fw.z_e);
    out.y_e = tape.value(fw.y_e);
  }
  return out;
}

int predict_row(const Tensor& dist, int row) {
  const int K = dist.rank() == 2 ? dist.dim(1) : dist.dim(0);
  const double* p = dist.data() + static_cast<long>(row) * K;
  int best = 0;
  for (int k = 1; k < K; ++k)
    if (p[k] > p[best]) best = k;
  return best;
}

std::vector<int> predict(const Tensor& dist) {
  const int B = dist.rank() == 2 ? dist.dim(0) : 1;
  std::vector<int> out(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) out[static_cast<std::size_t>(b)] = predict_row(dist, b);
  return out;
}

void save_checkpoint(const MtlModel& model, const std::string& path, std::uint64_t config_hash) {
  ordered_json doc;
  doc["format"] = "emtl-checkpoint/1";
  doc["engine_version"] = kEngineVersion;
  doc["seed"] = model.seed;
  doc["config_hash"] = config_hash;
  doc["encoder"] = {{"kind", encoder_kind_name(model.encoder.kind)},
                    {"embedding_dim", model.encoder.embedding_dim},
                    {"cnn_filters", model.encoder.cnn_filters},
                    {"cnn_width", model.encoder.cnn_width},
                    {"lstm_units", model.encoder.lstm_units},
                    {"max_len", model.encoder.max_len}};
  doc["auxiliary"] = aux_task_name(model.aux);
  doc["n_aux"] = model.n_aux;
  doc["vocab_size"] = model.vocab_size;
  ordered_json params;
  for (const auto& [name, tensor] : model.params) {
    params[name] = {{"shape", tensor.shape}, {"values", tensor.v}};
  }
  doc["params"] = std::move(params);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << doc.dump(1) << "\n";
}

MtlModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open checkpoint: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": malformed checkpoint: " + e.what());
  }
  if (doc.value("format", "") != "emtl-checkpoint/1")
    throw InvalidInput(path + ": not an emtl checkpoint");

  MtlModel m;
  const auto& enc = doc.at("encoder");
  m.encoder.kind = encoder_kind_from(enc.at("kind").get<std::string>());
  m.encoder.embedding_dim = enc.at("embedding_dim").get<int>();
  m.encoder.cnn_filters = enc.at("cnn_filters").get<int>();
  m.encoder.cnn_width = enc.at("cnn_width").get<int>();
  m.encoder.lstm_units = enc.at("lstm_units").get<int>();
  m.encoder.max_len = enc.at("max_len").get<int>();
  m.aux = aux_task_from(doc.at("auxiliary").get<std::string>());
  m.n_aux = doc.at("n_aux").get<int>();
  m.vocab_size = doc.at("vocab_size").get<int>();
  m.seed = doc.at("seed").get<std::uint64_t>();
  for (const auto& [name, entry] : doc.at("params").items()) {
    std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
    std::vector<double> values = entry.at("values").get<std::vector<double>>();
    m.params.emplace(name, Tensor(std::move(shape), std::move(values)));
  }
  return m;
}

}  // namespace emtl
