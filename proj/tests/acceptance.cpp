// Acceptance suite: one criterion per function, one pass/fail line each.
// Run directly or through ctest; exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "emtl/analysis.hpp"
#include "emtl/corpus.hpp"
#include "emtl/engine.hpp"
#include "emtl/metrics.hpp"
#include "emtl/models.hpp"
#include "emtl/prng.hpp"
#include "emtl/synth.hpp"
#include "emtl/training.hpp"

using namespace emtl;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_data_dir = EMTL_DATA_DIR;

Tensor random_tensor(std::vector<int> shape, std::uint64_t seed, const char* name, double lo,
                     double hi) {
  RngStream rng(seed, name);
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.v) v = rng.uniform(lo, hi);
  return t;
}

struct Failure {
  std::string detail;
};

void expect(bool ok, const std::string& detail) {
  if (!ok) throw Failure{detail};
}

// ---------------------------------------------------------------- criterion 1

void check_primitive_gradients() {
  auto start = Clock::now();
  double worst = 0.0;
  auto track = [&](double err, const char* what, std::uint64_t seed) {
    worst = std::max(worst, err);
    expect(err <= 1e-4, std::string(what) + " gradient error " + std::to_string(err) +
                            " at seed " + std::to_string(seed));
  };

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    // dense, w.r.t. input and weights
    Tensor x = random_tensor({3, 4}, seed, "dx", -1, 1);
    track(grad_check(
              [seed](Tape& t, Var in) {
                Var w = t.leaf(random_tensor({4, 3}, seed, "dw", -1, 1));
                Var b = t.leaf(random_tensor({3}, seed, "db", -1, 1));
                return t.sum(t.dense(in, w, b));
              },
              x),
          "dense/x", seed);
    Tensor w0 = random_tensor({4, 3}, seed, "dw0", -1, 1);
    track(grad_check(
              [seed](Tape& t, Var w) {
                Var in = t.leaf(random_tensor({3, 4}, seed, "dx0", -1, 1));
                Var b = t.leaf(random_tensor({3}, seed, "db0", -1, 1));
                return t.sum(t.dense(in, w, b));
              },
              w0),
          "dense/w", seed);

    // conv1d + max-pool composite, w.r.t. input and kernels
    Tensor cx = random_tensor({2, 7, 3}, seed, "cx", -1, 1);
    track(grad_check(
              [seed](Tape& t, Var in) {
                Var k = t.leaf(random_tensor({4, 3, 3}, seed, "ck", -0.7, 0.7));
                Var b = t.leaf(random_tensor({4}, seed, "cb", -0.7, 0.7));
                return t.sum(t.max_pool1d(t.conv1d(in, k, b), 2));
              },
              cx),
          "conv1d+maxpool/x", seed);
    Tensor k0 = random_tensor({4, 3, 3}, seed, "ck0", -0.7, 0.7);
    track(grad_check(
              [seed](Tape& t, Var k) {
                Var in = t.leaf(random_tensor({2, 7, 3}, seed, "cx0", -1, 1));
                Var b = t.leaf(random_tensor({4}, seed, "cb0", -0.7, 0.7));
                return t.sum(t.conv1d(in, k, b));
              },
              k0),
          "conv1d/k", seed);

    // lstm, w.r.t. input, both weight matrices and bias
    const int T = 3, C = 2, H = 3;
    Tensor lx = random_tensor({2, T, C}, seed, "lx", -1, 1);
    auto lstm_loss = [seed](Tape& t, Var in, Var wx, Var wh, Var b) {
      (void)seed;
      return t.sum(t.lstm_sequence(in, wx, wh, b));
    };
    track(grad_check(
              [&](Tape& t, Var in) {
                Var wx = t.leaf(random_tensor({C, 4 * H}, seed, "lwx", -0.6, 0.6));
                Var wh = t.leaf(random_tensor({H, 4 * H}, seed, "lwh", -0.6, 0.6));
                Var b = t.leaf(random_tensor({4 * H}, seed, "lb", -0.6, 0.6));
                return lstm_loss(t, in, wx, wh, b);
              },
              lx),
          "lstm/x", seed);
    Tensor wh0 = random_tensor({H, 4 * H}, seed, "lwh0", -0.6, 0.6);
    track(grad_check(
              [&](Tape& t, Var wh) {
                Var in = t.leaf(random_tensor({2, T, C}, seed, "lx0", -1, 1));
                Var wx = t.leaf(random_tensor({C, 4 * H}, seed, "lwx0", -0.6, 0.6));
                Var b = t.leaf(random_tensor({4 * H}, seed, "lb0", -0.6, 0.6));
                return lstm_loss(t, in, wx, wh, b);
              },
              wh0),
          "lstm/wh", seed);

    // embedding, w.r.t. the table (repeated ids included)
    Tensor table = random_tensor({6, 3}, seed, "et", -1, 1);
    track(grad_check(
              [](Tape& t, Var tab) {
                std::vector<int> ids = {0, 2, 5, 2, 1, 0};
                Var w = t.leaf(Tensor::full({2, 3, 3}, 0.37));
                return t.sum(t.mul(t.embedding_lookup(tab, ids, 2, 3), w));
              },
              table),
          "embedding/table", seed);

    // softmax against a fixed projection, then the softmax+CE composite
    Tensor z = random_tensor({6}, seed, "sz", -2, 2);
    track(grad_check(
              [seed](Tape& t, Var zz) {
                Var w = t.leaf(random_tensor({6}, seed, "sw", -1, 1));
                return t.sum(t.mul(t.softmax(zz), w));
              },
              z),
          "softmax", seed);
    track(grad_check([](Tape& t, Var zz) { return t.cross_entropy(t.softmax(zz), {3}); }, z),
          "softmax+cross_entropy", seed);

    // cross-entropy directly on probabilities
    Tensor probs = random_tensor({4}, seed, "pp", 0.1, 1.0);
    track(grad_check([](Tape& t, Var p) { return t.cross_entropy(p, {1}); }, probs),
          "cross_entropy", seed);

    // the full multi-task composite: cnn_lstm encoder, both heads, weighted
    // total loss; checked w.r.t. every parameter tensor
    EncoderConfig enc;
    enc.kind = EncoderKind::CnnLstm;
    enc.embedding_dim = 3;
    enc.cnn_filters = 3;
    enc.cnn_width = 2;
    enc.lstm_units = 3;
    enc.max_len = 6;
    MtlModel model = build_model(enc, AuxTask::EmotionEkman, 6, 10, seed);

    EncodedCorpus data;
    data.max_len = enc.max_len;
    RngStream rng(seed, "acc1");
    for (int i = 0; i < 3; ++i) {
      EncodedSample s;
      s.id = "g" + std::to_string(i);
      s.true_length = enc.max_len;
      for (int t = 0; t < enc.max_len; ++t) s.token_ids.push_back(rng.uniform_int(10));
      s.label = rng.uniform_int(2);
      s.emotion_ekman = rng.uniform_int(6);
      data.samples.push_back(std::move(s));
    }
    Batch batch = make_batch(data, {0, 1, 2}, AuxTask::EmotionEkman);
    const LossWeights weights(0.4);

    for (const auto& [pname, ptensor] : model.params) {
      auto fn = [&, pname](Tape& t, Var replaced) {
        ModelVars vars;
        for (const auto& [n2, t2] : model.params)
          vars.params.emplace(n2, n2 == pname ? replaced : t.leaf(t2, n2));
        ForwardVars fw = model_forward(t, model, vars, batch);
        Var lt = t.cross_entropy(fw.y_t, batch.labels);
        Var le = t.cross_entropy(fw.y_e, batch.aux_labels);
        return t.add(t.scale(le, weights.alpha), t.scale(lt, weights.beta));
      };
      track(grad_check(fn, ptensor), ("mtl_composite/" + pname).c_str(), seed);
    }
  }

  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  expect(secs < 60.0, "runtime " + std::to_string(secs) + "s exceeds 60s");
  std::printf("      (20 seeds, worst relative error %.3g, %.1fs)\n", worst, secs);
}

// ---------------------------------------------------------------- criterion 2

void check_loss_weighting() {
  std::vector<double> grid = sweep_grid({0.20, 0.05, 0.80});
  expect(grid.size() == 13, "grid has " + std::to_string(grid.size()) + " points, wanted 13");
  RngStream rng(7, "acc2");
  for (double alpha : grid) {
    LossWeights w(alpha);
    expect(w.beta == 1.0 - alpha, "beta != 1 - alpha at alpha=" + std::to_string(alpha));
    for (int trial = 0; trial < 10; ++trial) {
      double le = rng.uniform(0.0, 5.0), lt = rng.uniform(0.0, 5.0);
      LossBreakdown b = combined_loss(le, lt, w);
      double direct = alpha * le + (1.0 - alpha) * lt;
      expect(std::abs(b.total - direct) <= 1e-12,
             "total deviates from the weighted sum at alpha=" + std::to_string(alpha));
    }
  }
}

// ---------------------------------------------------------------- criterion 3

void check_zero_weight_equivalence() {
  SynthConfig cfg;
  cfg.n = 200;
  cfg.seed = 303;
  Corpus corpus = synth_corpus(cfg);
  Vocabulary vocab = build_vocab(corpus, default_contractions());
  const int max_len = 14;
  EncodedCorpus train = encode_corpus(corpus, default_contractions(), vocab, max_len, nullptr);

  EncoderConfig enc;
  enc.kind = EncoderKind::MeanPool;
  enc.embedding_dim = 12;
  enc.max_len = max_len;

  TrainConfig tc;
  tc.epochs = 5;
  tc.batch_size = 32;
  tc.lr = 0.02;
  tc.seed = 303;

  // step-1 gradients on the identical first batch
  MtlModel stl = build_model(enc, AuxTask::None, 0, vocab.size(), 303);
  MtlModel mtl = build_model(enc, AuxTask::EmotionEkman, 6, vocab.size(), 303);
  std::vector<int> first(32);
  std::iota(first.begin(), first.end(), 0);

  Tape ts;
  ModelVars vs = leaf_params(ts, stl);
  Batch bs = make_batch(train, first, AuxTask::None);
  ts.backward(ts.cross_entropy(model_forward(ts, stl, vs, bs).y_t, bs.labels));

  Tape tm;
  ModelVars vm = leaf_params(tm, mtl);
  Batch bm = make_batch(train, first, AuxTask::EmotionEkman);
  ForwardVars fw = model_forward(tm, mtl, vm, bm);
  Var lt = tm.cross_entropy(fw.y_t, bm.labels);
  Var le = tm.cross_entropy(fw.y_e, bm.aux_labels);
  tm.backward(tm.add(tm.scale(le, 0.0), tm.scale(lt, 1.0)));

  for (const auto& [name, var] : vs.params) {
    const Tensor& gs = ts.grad(var);
    const Tensor& gm = tm.grad(vm.params.at(name));
    for (int i = 0; i < gs.size(); ++i)
      expect(gs[i] == gm[i], "step-1 gradient of " + name + " differs at element " +
                                 std::to_string(i));
  }

  // 5-epoch loss_t trajectories
  EncodedCorpus no_val;
  no_val.max_len = max_len;
  FitResult fs_ = fit(stl, train, no_val, tc);
  TrainConfig tc0 = tc;
  tc0.weights = LossWeights(0.0);
  FitResult fm_ = fit(mtl, train, no_val, tc0);
  expect(fs_.history.size() == 5 && fm_.history.size() == 5, "expected 5 epochs");
  double worst = 0.0;
  for (std::size_t e = 0; e < 5; ++e) {
    double diff = std::abs(fs_.history[e].train_loss.loss_t - fm_.history[e].train_loss.loss_t);
    worst = std::max(worst, diff);
    expect(diff <= 1e-8, "epoch " + std::to_string(e + 1) + " loss_t differs by " +
                             std::to_string(diff));
  }
  std::printf("      (max epoch loss_t difference %.3g)\n", worst);
}

// ---------------------------------------------------------------- criterion 4

void check_metrics_oracle() {
  RngStream rng(404, "acc4");
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> preds(1000), labels(1000);
    for (int i = 0; i < 1000; ++i) {
      preds[static_cast<std::size_t>(i)] = rng.uniform_int(2);
      labels[static_cast<std::size_t>(i)] = rng.uniform_int(2);
    }
    long tp = 0, tn = 0, fp = 0, fn = 0;
    for (int i = 0; i < 1000; ++i) {
      int p = preds[static_cast<std::size_t>(i)], y = labels[static_cast<std::size_t>(i)];
      if (p == 1 && y == 1) ++tp;
      if (p == 0 && y == 0) ++tn;
      if (p == 1 && y == 0) ++fp;
      if (p == 0 && y == 1) ++fn;
    }
    ConfusionMatrix cm = confusion(preds, labels);
    expect(cm.tp == tp && cm.tn == tn && cm.fp == fp && cm.fn == fn,
           "confusion counts differ from the oracle at trial " + std::to_string(trial));
    MetricsReport r = compute_metrics(cm);
    expect(r.accuracy == static_cast<double>(tp + tn) / 1000.0, "accuracy differs");
    expect(tp + fp == 0 || r.precision == static_cast<double>(tp) / (tp + fp), "precision differs");
    expect(tp + fn == 0 || r.recall == static_cast<double>(tp) / (tp + fn), "recall differs");
    expect(r.f1 == static_cast<double>(2 * tp) / (2 * tp + fp + fn), "f1 differs");
  }

  MetricsReport worked = compute_metrics(ConfusionMatrix{3, 2, 1, 2});
  expect(std::abs(worked.accuracy - 0.625) <= 1e-12, "worked accuracy");
  expect(std::abs(worked.precision - 0.75) <= 1e-12, "worked precision");
  expect(std::abs(worked.recall - 0.6) <= 1e-12, "worked recall");
  expect(std::abs(worked.f1 - 6.0 / 9.0) <= 1e-12, "worked f1");
}

// ---------------------------------------------------------------- criterion 5

struct SweepFixture {
  Vocabulary vocab;
  EncodedCorpus train, val, test;
};

SweepFixture sweep_fixture() {
  SynthConfig cfg;
  cfg.n = 80;
  cfg.seed = 505;
  Corpus corpus = synth_corpus(cfg);
  auto [train_c, test_c] = stratified_split(corpus, 0.2, 505);
  auto [fit_c, val_c] = stratified_split(train_c, 0.125, 505);
  SweepFixture f;
  f.vocab = build_vocab(train_c, default_contractions());
  const int max_len = 14;
  f.train = encode_corpus(fit_c, default_contractions(), f.vocab, max_len, nullptr);
  f.val = encode_corpus(val_c, default_contractions(), f.vocab, max_len, nullptr);
  f.test = encode_corpus(test_c, default_contractions(), f.vocab, max_len, nullptr);
  return f;
}

void check_sweep_harness() {
  SweepFixture f = sweep_fixture();
  EncoderConfig enc;
  enc.kind = EncoderKind::MeanPool;
  enc.embedding_dim = 8;
  enc.max_len = 14;

  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 16;
  tc.lr = 0.05;
  tc.seed = 505;

  SweepConfig sweep{SweepRange{}, tc};  // defaults: 0.20 / 0.05 / 0.80
  auto factory = [&]() { return build_model(enc, AuxTask::EmotionEkman, 6, f.vocab.size(), 505); };

  std::vector<SweepPoint> run1 = sweep_alpha(sweep, factory, f.train, f.val, f.test);
  expect(run1.size() == 13, "sweep produced " + std::to_string(run1.size()) + " runs, wanted 13");
  for (const SweepPoint& p : run1)
    expect(p.beta == 1.0 - p.alpha, "beta != 1 - alpha in sweep output");

  fs::path dir = fs::temp_directory_path() / "emtl-acceptance-sweep";
  fs::create_directories(dir);
  write_sweep_csv(run1, (dir / "sweep1.csv").string());

  std::vector<SweepPoint> run2 = sweep_alpha(sweep, factory, f.train, f.val, f.test);
  write_sweep_csv(run2, (dir / "sweep2.csv").string());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string csv1 = slurp(dir / "sweep1.csv");
  expect(csv1 == slurp(dir / "sweep2.csv"), "rerun CSV differs byte-wise");
  int rows = -1;  // header does not count
  for (char c : csv1)
    if (c == '\n') ++rows;
  expect(rows == 13, "CSV has " + std::to_string(rows) + " data rows, wanted 13");
  fs::remove_all(dir);
}

// ---------------------------------------------------------------- criterion 6

void check_directional_gain() {
  auto start = Clock::now();

  // fidelity 0.5 makes the direct label tokens pure noise: the only usable
  // legitimacy signal flows through the planted emotion correlation
  SynthConfig cfg;
  cfg.n = 1000;
  cfg.emotion_label_corr = 0.8;
  cfg.label_noise = 0.10;
  cfg.label_tokens = 1;
  cfg.label_token_fidelity = 0.5;
  cfg.seed = 606;
  Corpus corpus = synth_corpus(cfg);

  auto [train_c, test_c] = stratified_split(corpus, 0.2, 606);
  Vocabulary vocab = build_vocab(train_c, default_contractions());
  const int max_len = 14;
  EncodedCorpus train = encode_corpus(train_c, default_contractions(), vocab, max_len, nullptr);
  EncodedCorpus test = encode_corpus(test_c, default_contractions(), vocab, max_len, nullptr);
  EncodedCorpus no_val;
  no_val.max_len = max_len;

  EncoderConfig enc;
  enc.kind = EncoderKind::MeanPool;
  enc.embedding_dim = 16;
  enc.max_len = max_len;

  double gain_sum = 0.0;
  for (std::uint64_t seed = 11; seed <= 15; ++seed) {
    TrainConfig tc;
    tc.epochs = 5;
    tc.batch_size = 32;
    tc.lr = 0.04;
    tc.seed = seed;

    MtlModel stl = build_model(enc, AuxTask::None, 0, vocab.size(), seed);
    fit(stl, train, no_val, tc);
    double stl_acc = evaluate(stl, test, LossWeights(), tc.batch_size).metrics.accuracy;

    MtlModel mtl = build_model(enc, AuxTask::EmotionEkman, 6, vocab.size(), seed);
    TrainConfig tm = tc;
    tm.weights = LossWeights(0.4);
    fit(mtl, train, no_val, tm);
    double mtl_acc = evaluate(mtl, test, tm.weights, tc.batch_size).metrics.accuracy;

    expect(stl_acc >= 0.70, "STL accuracy " + std::to_string(stl_acc) + " below 0.70 at seed " +
                                std::to_string(seed));
    expect(mtl_acc >= 0.70, "MTL accuracy " + std::to_string(mtl_acc) + " below 0.70 at seed " +
                                std::to_string(seed));
    gain_sum += mtl_acc - stl_acc;
    std::printf("      seed %llu: STL %.4f, MTL(0.4) %.4f\n",
                static_cast<unsigned long long>(seed), stl_acc, mtl_acc);
  }
  double mean_gain = gain_sum / 5.0;
  expect(mean_gain >= 0.0, "mean MTL-STL gain " + std::to_string(mean_gain) + " is negative");

  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  expect(secs < 300.0, "runtime " + std::to_string(secs) + "s exceeds 5 minutes");
  std::printf("      (mean gain %+0.4f over 5 seeds, %.1fs)\n", mean_gain, secs);
}

// ---------------------------------------------------------------- criterion 7

void check_cross_domain() {
  SynthConfig a;
  a.n = 300;
  a.seed = 707;
  a.domain = "alpha";
  SynthConfig b = a;
  b.seed = 708;
  b.domain = "beta";
  Corpus corpus_a = synth_corpus(a);
  Corpus corpus_b = synth_corpus(b);

  auto [train_c, test_c] = stratified_split(corpus_a, 0.2, 707);
  Vocabulary vocab = build_vocab(train_c, default_contractions());
  const int vocab_size_sealed = vocab.size();
  const int max_len = 14;
  EncodedCorpus train = encode_corpus(train_c, default_contractions(), vocab, max_len, nullptr);
  EncodedCorpus test = encode_corpus(test_c, default_contractions(), vocab, max_len, nullptr);
  EncodedCorpus cross = encode_corpus(corpus_b, default_contractions(), vocab, max_len, nullptr);
  EncodedCorpus no_val;
  no_val.max_len = max_len;

  EncoderConfig enc;
  enc.kind = EncoderKind::MeanPool;
  enc.embedding_dim = 12;
  enc.max_len = max_len;

  for (AuxTask aux : {AuxTask::None, AuxTask::EmotionEkman}) {
    TrainConfig tc;
    tc.epochs = 6;
    tc.batch_size = 32;
    tc.lr = 0.05;
    tc.seed = 707;
    if (aux != AuxTask::None) tc.weights = LossWeights(0.4);

    MtlModel model = build_model(enc, aux, aux == AuxTask::None ? 0 : 6, vocab.size(), 707);
    fit(model, train, no_val, tc);
    double in_acc = evaluate(model, test, tc.weights, tc.batch_size).metrics.accuracy;
    double cross_acc =
        evaluate(model, cross, tc.weights, tc.batch_size, /*task_only=*/true).metrics.accuracy;
    std::printf("      %s: in-domain %.4f, cross-domain %.4f\n", setting_name(aux).c_str(),
                in_acc, cross_acc);
    expect(in_acc > cross_acc, setting_name(aux) + ": no accuracy drop across domains");
  }

  // sealing, structurally: the vocabulary is unchanged and every content
  // token of the cross corpus maps to <unk>
  expect(vocab.size() == vocab_size_sealed, "vocabulary grew during evaluation");
  ContractionDict dict = default_contractions();
  for (const Sample& s : corpus_b.samples)
    for (const std::string& tok : preprocess_text(s.text, dict))
      expect(vocab.id(tok) == Vocabulary::kUnk,
             "cross-corpus token \"" + tok + "\" found in the sealed vocabulary");
}

// ---------------------------------------------------------------- criterion 8

void check_pca_oracle() {
  for (auto [n, d, seed] :
       {std::tuple<int, int, unsigned>{5, 4, 1}, {10, 6, 2}, {20, 10, 3}, {20, 10, 4}}) {
    FeatureMatrix fm;
    fm.rows = random_tensor({n, d}, seed, "acc8", -2.0, 2.0);
    for (int i = 0; i < n; ++i) fm.ids.push_back("r" + std::to_string(i));
    const int k = 3;
    PcaResult pca = fit_pca(fm, k);

    // oracle: power iteration with deflation on the explicit covariance
    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] += fm.rows.at(i, j);
    for (double& m : mean) m /= n;
    std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
          cov[static_cast<std::size_t>(p) * d + q] +=
              (fm.rows.at(i, p) - mean[static_cast<std::size_t>(p)]) *
              (fm.rows.at(i, q) - mean[static_cast<std::size_t>(q)]) / (n - 1);

    for (int comp = 0; comp < k; ++comp) {
      std::vector<double> v(static_cast<std::size_t>(d));
      RngStream rng(900 + static_cast<std::uint64_t>(comp), "power");
      for (double& x : v) x = rng.uniform(-1.0, 1.0);
      double lambda = 0.0;
      for (int iter = 0; iter < 20000; ++iter) {
        std::vector<double> w(static_cast<std::size_t>(d), 0.0);
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q)
            w[static_cast<std::size_t>(p)] +=
                cov[static_cast<std::size_t>(p) * d + q] * v[static_cast<std::size_t>(q)];
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) break;
        for (int p = 0; p < d; ++p) v[static_cast<std::size_t>(p)] = w[static_cast<std::size_t>(p)] / norm;
        lambda = norm;
      }
      expect(std::abs(pca.explained_variance[static_cast<std::size_t>(comp)] - lambda) <= 1e-8,
             "explained variance " + std::to_string(comp) + " deviates from the oracle");
      double dot = 0.0;
      for (int p = 0; p < d; ++p)
        dot += pca.components[static_cast<std::size_t>(comp)][static_cast<std::size_t>(p)] *
               v[static_cast<std::size_t>(p)];
      double angle = std::acos(std::min(1.0, std::abs(dot)));
      expect(angle <= 1e-6, "principal angle " + std::to_string(angle) + " exceeds 1e-6");
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
          cov[static_cast<std::size_t>(p) * d + q] -=
              lambda * v[static_cast<std::size_t>(p)] * v[static_cast<std::size_t>(q)];
    }

    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        double dot = 0.0;
        for (int p = 0; p < d; ++p)
          dot += pca.components[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] *
                 pca.components[static_cast<std::size_t>(j)][static_cast<std::size_t>(p)];
        expect(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-8, "components not orthonormal");
      }
  }

  // legitimacy views partition the corpus exactly
  Corpus corpus;
  corpus.name = "acc8";
  RngStream rng(808, "views");
  for (int i = 0; i < 25; ++i) {
    Sample s;
    s.id = "s" + std::to_string(i);
    s.text = "x";
    s.label = rng.uniform_int(2);
    s.emotion_ekman = rng.uniform_int(6);
    corpus.samples.push_back(s);
  }
  Tensor coords = random_tensor({25, 3}, 8, "coords", -1, 1);
  LegitimacyEmotionViews views = legitimacy_emotion_view(corpus, coords, ekman6());
  std::set<std::string> seen;
  for (const LegitimacyView* view : {&views.view0, &views.view1}) {
    int hist_sum = 0;
    for (int c : view->emotion_histogram) hist_sum += c;
    expect(hist_sum == static_cast<int>(view->points.size()), "histogram does not sum to view");
    for (const ViewPoint& p : view->points)
      expect(seen.insert(p.id).second, "sample in both views: " + p.id);
  }
  expect(static_cast<int>(seen.size()) == corpus.size(), "views do not cover the corpus");
}

// ---------------------------------------------------------------- criterion 9

void check_fixture_statistics() {
  Corpus pheme = load_corpus(g_data_dir + "/fixtures/pheme_counts.jsonl");
  CorpusStats stats = pheme.stats();
  expect(stats.label_counts[1] == 2402,
         "rumours: " + std::to_string(stats.label_counts[1]) + ", wanted 2402");
  expect(stats.label_counts[0] == 4023,
         "non-rumours: " + std::to_string(stats.label_counts[0]) + ", wanted 4023");
  expect(stats.total == 6425, "total: " + std::to_string(stats.total) + ", wanted 6425");
  std::printf("      (2402 rumours / 4023 non-rumours / 6425 total)\n");
}

// --------------------------------------------------------------- criterion 10

void check_preprocessing_contract() {
  ContractionDict dict = default_contractions();
  std::vector<std::string> ill = preprocess_text("I'll", dict);
  expect(ill == std::vector<std::string>{"i", "will"}, "\"I'll\" did not become [i, will]");

  RngStream rng(1010, "acc10");
  const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,!?'\"#@:;()-[]/\t";
  for (int trial = 0; trial < 1000; ++trial) {
    std::string text;
    int len = rng.uniform_int(80);
    for (int i = 0; i < len; ++i)
      text.push_back(
          alphabet[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(alphabet.size())))]);

    std::vector<std::string> tokens = preprocess_text(text, dict);
    for (const std::string& tok : tokens) {
      expect(!tok.empty(), "empty token emitted");
      for (unsigned char c : tok)
        expect((c >= 'a' && c <= 'z') || c >= 0x80,
               "token \"" + tok + "\" contains uppercase, digit or punctuation");
    }
    std::string rejoined;
    for (const std::string& tok : tokens) {
      if (!rejoined.empty()) rejoined += " ";
      rejoined += tok;
    }
    expect(preprocess_text(rejoined, dict) == tokens,
           "pipeline is not idempotent on trial " + std::to_string(trial));
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness (all primitives + MTL composite, 20 seeds)",
       check_primitive_gradients},
      {2, "loss-weighting exactness over the 13-point alpha grid", check_loss_weighting},
      {3, "zero-weight equivalence (alpha=0 MTL vs STL)", check_zero_weight_equivalence},
      {4, "metrics against the pair-counting oracle", check_metrics_oracle},
      {5, "sweep harness: 13 runs, 13-row CSV, byte-identical rerun", check_sweep_harness},
      {6, "directional MTL gain on the planted-correlation corpus", check_directional_gain},
      {7, "cross-domain drop and vocabulary sealing", check_cross_domain},
      {8, "PCA against the eigensolver oracle; views partition", check_pca_oracle},
      {9, "PHEME fixture statistics", check_fixture_statistics},
      {10, "preprocessing contract", check_preprocessing_contract},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    try {
      c.run();
      std::printf("[PASS] %2d. %s\n", c.id, c.name);
    } catch (const Failure& f) {
      std::printf("[FAIL] %2d. %s: %s\n", c.id, c.name, f.detail.c_str());
      ++failures;
    } catch (const std::exception& e) {
      std::printf("[FAIL] %2d. %s: unexpected error: %s\n", c.id, c.name, e.what());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
