#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "emtl/tensor.hpp"

namespace emtl {

inline constexpr const char* kEngineVersion = "emtl-engine/1.0";

// Handle to a node on a Tape. Only meaningful together with the tape that
// produced it.
struct Var {
  int id = -1;
};

// Reverse-mode tape. Nodes are appended in evaluation order, which is a
// topological order by construction; backward() walks them once in reverse.
// A tape is single-threaded; training code builds a fresh tape per batch.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value, std::string name = {});

  // x: ids indexed [b*len + t], table [V,E] -> [B,len,E]
  Var embedding_lookup(Var table, const std::vector<int>& ids, int batch, int len);
  // x [B,L,C], kernels [F,W,C], bias [F] -> [B,L-W+1,F] (valid padding)
  Var conv1d(Var x, Var kernels, Var bias);
  // x [B,L,F] -> [B,L/width,F]; non-overlapping windows, remainder dropped
  Var max_pool1d(Var x, int width);
  // x [B,T,C], wx [C,4H], wh [H,4H], bias [4H] -> final hidden state [B,H]
  Var lstm_sequence(Var x, Var wx, Var wh, Var bias);
  // x [B,L,E], lengths per sample -> [B,E]; mean over the first length steps
  Var mean_pool(Var x, const std::vector<int>& lengths);
  // x [B,I], w [I,O], b [O] -> [B,O]
  Var dense(Var x, Var w, Var b);
  // rows sum to 1; max-subtracted; rank 1 or 2
  Var softmax(Var z);
  // mean over the batch of -log(probs[b, target_b]); probabilities below
  // 1e-12 are clamped to 1e-12 and counted in clamped_prob_events()
  Var cross_entropy(Var probs, const std::vector<int>& targets);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double s);
  Var sum(Var x);
  // same element count, new shape
  Var reshape(Var x, std::vector<int> shape);

  // loss must be scalar; accumulates gradients for every node, leaving
  // exact zeros on anything the loss does not reach
  void backward(Var loss);

  const Tensor& value(Var v) const;
  const Tensor& grad(Var v) const;
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int clamped_prob_events() const { return clamped_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::string name;
    std::function<void()> backprop;  // empty for leaves
  };

  Var push(Tensor value, std::string name = {});
  Node& node(Var v);
  const Node& node(Var v) const;
  void check_var(Var v, const char* op) const;

  std::vector<Node> nodes_;
  int clamped_ = 0;
};

// Standard Adam with bias correction. Moments are kept per parameter name so
// the optimizer survives parameters being re-leafed onto fresh tapes.
struct AdamConfig {
  double lr = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig cfg = {}) : cfg_(cfg) {}

  // one update over all parameters; throws on non-finite gradients
  void step(std::map<std::string, Tensor>& params, const std::map<std::string, Tensor>& grads);

  long step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::map<std::string, Tensor> m_, v_;
};

// Central finite differences against reverse mode. f builds a scalar loss
// from the input leaf on the given tape. Returns the max over elements of
// |analytic - numeric| / max(1, |numeric|). Elements are checked in parallel.
double grad_check(const std::function<Var(Tape&, Var)>& f, const Tensor& input,
                  double eps = 1e-5);

// uniform(lo,hi) init from the named stream "init/<name>" of the given seed
Tensor init_uniform(std::vector<int> shape, std::uint64_t seed, std::string_view name,
                    double lo = -0.05, double hi = 0.05);

}  // namespace emtl
