#include "emtl/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "emtl/engine.hpp"
#include "emtl/errors.hpp"
#include "emtl/prng.hpp"

namespace emtl {

LossWeights::LossWeights(double a) : alpha(a), beta(1.0 - a) {
  if (!(a >= 0.0 && a <= 1.0))
    throw InvalidInput("LossWeights: alpha must lie in [0,1], got " + std::to_string(a));
}

LossBreakdown combined_loss(double loss_e, double loss_t, const LossWeights& weights) {
  if (!std::isfinite(loss_e) || !std::isfinite(loss_t))
    throw std::domain_error("combined_loss: non-finite branch loss");
  if (!(weights.alpha >= 0.0 && weights.alpha <= 1.0))
    throw InvalidInput("combined_loss: alpha must lie in [0,1]");
  LossBreakdown b;
  b.loss_t = loss_t;
  b.loss_e = loss_e;
  b.total = weights.alpha * loss_e + weights.beta * loss_t;
  return b;
}

namespace {

void require_aux_tags(const MtlModel& model, const EncodedCorpus& data, const char* which) {
  if (!model.multi_task()) return;
  for (const EncodedSample& s : data.samples) {
    int tag = model.aux == AuxTask::EmotionEkman      ? s.emotion_ekman
              : model.aux == AuxTask::EmotionPlutchik ? s.emotion_plutchik
                                                      : s.domain_index;
    if (tag < 0)
      throw InvalidInput(std::string("fit: ") + which + " sample \"" + s.id + "\" lacks the " +
                         aux_task_name(model.aux) + " tag required by the multi-task model");
    if (tag >= model.n_aux)
      throw InvalidInput(std::string("fit: ") + which + " sample \"" + s.id + "\" has " +
                         aux_task_name(model.aux) + " tag " + std::to_string(tag) +
                         " outside the model's " + std::to_string(model.n_aux) + " classes");
  }
}

// forward + losses on a prepared batch; returns the loss breakdown and,
// optionally via out params, the prediction rows
struct BatchEval {
  LossBreakdown loss;
  std::vector<int> task_pred;
  std::vector<int> aux_pred;
};

BatchEval eval_batch(Tape& tape, const MtlModel& model, const ModelVars& vars, const Batch& batch,
                     const LossWeights& weights, Var* total_out) {
  ForwardVars fw = model_forward(tape, model, vars, batch);
  Var loss_t = tape.cross_entropy(fw.y_t, batch.labels);

  BatchEval ev;
  if (model.multi_task() && !batch.aux_labels.empty()) {
    Var loss_e = tape.cross_entropy(fw.y_e, batch.aux_labels);
    Var total = tape.add(tape.scale(loss_e, weights.alpha), tape.scale(loss_t, weights.beta));
    ev.loss.loss_t = tape.value(loss_t)[0];
    ev.loss.loss_e = tape.value(loss_e)[0];
    ev.loss.total = tape.value(total)[0];
    if (total_out) *total_out = total;
    ev.aux_pred = predict(tape.value(fw.y_e));
  } else {
    ev.loss.loss_t = tape.value(loss_t)[0];
    ev.loss.loss_e = 0.0;
    ev.loss.total = ev.loss.loss_t;
    if (total_out) *total_out = loss_t;
  }
  ev.task_pred = predict(tape.value(fw.y_t));
  return ev;
}

std::vector<std::vector<int>> make_batches(int n, int batch_size, const std::vector<int>& order) {
  std::vector<std::vector<int>> batches;
  for (int start = 0; start < n; start += batch_size) {
    int end = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

}  // namespace

EvalResult evaluate(const MtlModel& model, const EncodedCorpus& data, const LossWeights& weights,
                    int batch_size, bool task_only) {
  EvalResult result;
  if (data.samples.empty()) {
    result.metrics = compute_metrics(ConfusionMatrix{});
    return result;
  }
  const bool with_aux = model.multi_task() && !task_only;
  std::vector<int> order(static_cast<std::size_t>(data.size()));
  std::iota(order.begin(), order.end(), 0);

  std::vector<int> preds, labels, aux_preds, aux_labels;
  double sum_t = 0.0, sum_e = 0.0;
  for (const auto& idx : make_batches(data.size(), batch_size, order)) {
    Batch batch = make_batch(data, idx, with_aux ? model.aux : AuxTask::None);
    Tape tape;
    ModelVars vars = leaf_params(tape, model);
    BatchEval ev = eval_batch(tape, model, vars, batch, weights, nullptr);
    const double w = static_cast<double>(batch.batch_size);
    sum_t += ev.loss.loss_t * w;
    sum_e += ev.loss.loss_e * w;
    preds.insert(preds.end(), ev.task_pred.begin(), ev.task_pred.end());
    labels.insert(labels.end(), batch.labels.begin(), batch.labels.end());
    if (with_aux) {
      aux_preds.insert(aux_preds.end(), ev.aux_pred.begin(), ev.aux_pred.end());
      aux_labels.insert(aux_labels.end(), batch.aux_labels.begin(), batch.aux_labels.end());
    }
  }
  const double n = static_cast<double>(data.size());
  result.loss = combined_loss(sum_e / n, sum_t / n, with_aux ? weights : LossWeights());
  result.cm = confusion(preds, labels);
  result.metrics = compute_metrics(result.cm);
  if (with_aux) result.aux_accuracy = multiclass_accuracy(aux_preds, aux_labels);
  return result;
}

FitResult fit(MtlModel& model, const EncodedCorpus& train, const EncodedCorpus& validation,
              const TrainConfig& config) {
  if (config.epochs <= 0 || config.batch_size <= 0)
    throw InvalidInput("fit: epochs and batch_size must be positive");
  if (config.early_stopping.enabled && config.early_stopping.patience < 1)
    throw InvalidInput("fit: early stopping patience must be >= 1");
  if (train.samples.empty()) throw InvalidInput("fit: empty training corpus");
  if (train.max_len != model.encoder.max_len)
    throw InvalidInput("fit: corpus encoded with max_len " + std::to_string(train.max_len) +
                       " but model expects " + std::to_string(model.encoder.max_len));
  require_aux_tags(model, train, "training");
  require_aux_tags(model, validation, "validation");

  const LossWeights weights = model.multi_task() ? config.weights : LossWeights();
  AdamOptimizer adam({config.lr});
  RngStream shuffle_rng(config.seed, "shuffle");

  FitResult result;
  const bool has_validation = !validation.samples.empty();
  double best_val = 0.0;
  std::map<std::string, Tensor> best_params;
  int epochs_without_improvement = 0;

  std::vector<int> order(static_cast<std::size_t>(train.size()));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    seeded_shuffle(order, shuffle_rng);

    double sum_t = 0.0, sum_e = 0.0;
    for (const auto& idx : make_batches(train.size(), config.batch_size, order)) {
      Batch batch = make_batch(train, idx, model.aux);
      Tape tape;
      ModelVars vars = leaf_params(tape, model);
      Var total{};
      BatchEval ev = eval_batch(tape, model, vars, batch, weights, &total);
      tape.backward(total);

      std::map<std::string, Tensor> grads;
      for (const auto& [name, var] : vars.params) grads.emplace(name, tape.grad(var));
      adam.step(model.params, grads);

      const double w = static_cast<double>(batch.batch_size);
      sum_t += ev.loss.loss_t * w;
      sum_e += ev.loss.loss_e * w;
    }

    EpochStats stats;
    stats.epoch = epoch;
    const double n = static_cast<double>(train.size());
    stats.train_loss = combined_loss(sum_e / n, sum_t / n, weights);

    if (has_validation) {
      EvalResult val = evaluate(model, validation, weights, config.batch_size);
      stats.val_accuracy = val.metrics.accuracy;
      stats.val_f1 = val.metrics.f1;
      stats.val_total_loss = val.loss.total;
    }
    result.history.push_back(stats);

    if (has_validation) {
      const bool improved =
          result.best_epoch == 0 || stats.val_total_loss < best_val - config.early_stopping.min_delta;
      if (improved) {
        best_val = stats.val_total_loss;
        result.best_epoch = epoch;
        best_params = model.params;
        epochs_without_improvement = 0;
      } else {
        ++epochs_without_improvement;
        if (config.early_stopping.enabled &&
            epochs_without_improvement >= config.early_stopping.patience) {
          result.stopped_early = true;
          break;
        }
      }
    }
  }

  if (result.best_epoch > 0) model.params = std::move(best_params);
  return result;
}

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write history file: " + path);
  out << "epoch,loss_t,loss_e,total,val_accuracy,val_f1\n";
  char buf[256];
  for (const EpochStats& e : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.9f,%.9f,%.9f,%.6f,%.6f\n", e.epoch, e.train_loss.loss_t,
                  e.train_loss.loss_e, e.train_loss.total, e.val_accuracy, e.val_f1);
    out << buf;
  }
}

std::vector<double> sweep_grid(const SweepRange& range) {
  if (range.alpha_step <= 0.0) throw InvalidInput("sweep: alpha_step must be positive");
  if (range.alpha_start > range.alpha_end)
    throw InvalidInput("sweep: alpha_start must not exceed alpha_end");
  if (range.alpha_start < 0.0 || range.alpha_end > 1.0)
    throw InvalidInput("sweep: alpha grid must stay within [0,1]");
  // tolerance keeps 0.20..0.80 by 0.05 at exactly 13 points despite rounding
  const int count =
      static_cast<int>(std::floor((range.alpha_end - range.alpha_start) / range.alpha_step + 1e-9)) +
      1;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) grid.push_back(range.alpha_start + i * range.alpha_step);
  return grid;
}

std::vector<SweepPoint> sweep_alpha(const SweepConfig& sweep,
                                    const std::function<MtlModel()>& model_factory,
                                    const EncodedCorpus& train, const EncodedCorpus& validation,
                                    const EncodedCorpus& test) {
  std::vector<double> grid = sweep_grid(sweep.range);
  if (grid.empty()) throw InvalidInput("sweep: empty alpha grid");

  std::vector<SweepPoint> points;
  points.reserve(grid.size());
  for (double alpha : grid) {
    MtlModel model = model_factory();  // fresh identical initialization per point
    TrainConfig cfg = sweep.base;
    cfg.weights = LossWeights(alpha);
    fit(model, train, validation, cfg);
    EvalResult ev = evaluate(model, test, cfg.weights, cfg.batch_size);

    SweepPoint p;
    p.alpha = alpha;
    p.beta = cfg.weights.beta;
    p.metrics = ev.metrics;
    p.test_loss = ev.loss;
    points.push_back(p);
  }
  return points;
}

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sweep file: " + path);
  out << "alpha,beta,accuracy,precision,recall,f1\n";
  char buf[256];
  for (const SweepPoint& p : points) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,", p.alpha, p.beta);
    out << buf << metrics_csv_row(p.metrics) << "\n";
  }
}

}  // namespace emtl
