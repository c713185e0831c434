#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "emtl/corpus.hpp"
#include "emtl/metrics.hpp"
#include "emtl/models.hpp"

namespace emtl {

// alpha weights the auxiliary (emotion) branch, beta the veracity branch;
// beta is always exactly 1 - alpha.
struct LossWeights {
  double alpha = 0.0;
  double beta = 1.0;

  LossWeights() = default;
  explicit LossWeights(double a);
};

struct LossBreakdown {
  double loss_t = 0.0;
  double loss_e = 0.0;
  double total = 0.0;
};

// total = alpha * loss_e + (1 - alpha) * loss_t
LossBreakdown combined_loss(double loss_e, double loss_t, const LossWeights& weights);

struct EarlyStopping {
  bool enabled = false;
  int patience = 1;
  double min_delta = 0.0;
};

struct TrainConfig {
  int epochs = 5;
  int batch_size = 64;
  double lr = 2e-5;
  std::uint64_t seed = 0;
  EarlyStopping early_stopping;
  LossWeights weights;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  LossBreakdown train_loss;
  double val_accuracy = 0.0;
  double val_f1 = 0.0;
  double val_total_loss = 0.0;
};

struct FitResult {
  std::vector<EpochStats> history;
  int best_epoch = 0;      // 1-based; 0 when no validation data
  bool stopped_early = false;
};

struct EvalResult {
  LossBreakdown loss;
  MetricsReport metrics;     // veracity task
  double aux_accuracy = -1;  // -1 for single-task models
  ConfusionMatrix cm;
};

// Loss and metrics over a corpus without touching any parameter. task_only
// skips the auxiliary branch loss, allowing evaluation of a multi-task model
// on corpora that carry no auxiliary tags (inference needs none).
EvalResult evaluate(const MtlModel& model, const EncodedCorpus& data, const LossWeights& weights,
                    int batch_size, bool task_only = false);

// Seeded shuffled batches, Adam updates, per-epoch validation. Early stopping
// watches the weighted total validation loss and restores the best epoch's
// parameters; with validation data present the best epoch is restored even
// when early stopping is off. Multi-task models require every train and
// validation sample to carry the auxiliary tag (checked before training).
FitResult fit(MtlModel& model, const EncodedCorpus& train, const EncodedCorpus& validation,
              const TrainConfig& config);

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path);

struct SweepRange {
  double alpha_start = 0.20;
  double alpha_step = 0.05;
  double alpha_end = 0.80;
};

struct SweepConfig {
  SweepRange range;
  TrainConfig base;
};

// floor((end-start)/step)+1 values, inclusive of both ends when reachable
std::vector<double> sweep_grid(const SweepRange& range);

struct SweepPoint {
  double alpha = 0.0;
  double beta = 0.0;
  MetricsReport metrics;
  LossBreakdown test_loss;
};

// One independent run per grid point, each built fresh from the same base
// seed so only alpha varies. Results are ordered by alpha.
std::vector<SweepPoint> sweep_alpha(const SweepConfig& sweep,
                                    const std::function<MtlModel()>& model_factory,
                                    const EncodedCorpus& train, const EncodedCorpus& validation,
                                    const EncodedCorpus& test);

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path);

}  // namespace emtl
