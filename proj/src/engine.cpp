#include "emtl/engine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "emtl/kernels.hpp"
#include "emtl/prng.hpp"

namespace emtl {

namespace {

constexpr double kProbFloor = 1e-12;

[[noreturn]] void shape_error(const char* op, const std::string& detail) {
  throw std::invalid_argument(std::string(op) + ": " + detail);
}

void require(bool ok, const char* op, const std::string& detail) {
  if (!ok) shape_error(op, detail);
}

}  // namespace

Var Tape::push(Tensor value, std::string name) {
  Node n;
  n.grad = Tensor::zeros(value.shape);
  n.value = std::move(value);
  n.name = std::move(name);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Node& Tape::node(Var v) { return nodes_[static_cast<std::size_t>(v.id)]; }
const Tape::Node& Tape::node(Var v) const { return nodes_[static_cast<std::size_t>(v.id)]; }

void Tape::check_var(Var v, const char* op) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    shape_error(op, "variable does not belong to this tape");
}

Var Tape::leaf(Tensor value, std::string name) {
  if (!value.all_finite())
    throw std::domain_error("leaf: non-finite values in tensor '" + name + "'");
  return push(std::move(value), std::move(name));
}

const Tensor& Tape::value(Var v) const {
  check_var(v, "value");
  return node(v).value;
}

const Tensor& Tape::grad(Var v) const {
  check_var(v, "grad");
  return node(v).grad;
}

Var Tape::embedding_lookup(Var table, const std::vector<int>& ids, int batch, int len) {
  check_var(table, "embedding_lookup");
  const Tensor& tab = node(table).value;
  require(tab.rank() == 2, "embedding_lookup", "table must be [V,E], got " + shape_str(tab.shape));
  require(static_cast<int>(ids.size()) == batch * len, "embedding_lookup",
          "ids size " + std::to_string(ids.size()) + " != batch*len");
  const int V = tab.dim(0), E = tab.dim(1);
  for (int id : ids)
    require(id >= 0 && id < V, "embedding_lookup", "token id " + std::to_string(id) + " out of range");

  Tensor out = Tensor::zeros({batch, len, E});
  kernels::embedding_forward(tab.data(), ids.data(), out.data(), batch * len, E);
  Var y = push(std::move(out));

  auto ids_keep = std::make_shared<std::vector<int>>(ids);
  node(y).backprop = [this, y, table, ids_keep, batch, len, E]() {
    kernels::embedding_backward(node(y).grad.data(), ids_keep->data(), node(table).grad.data(),
                                batch * len, E);
  };
  return y;
}

Var Tape::conv1d(Var x, Var kernels_var, Var bias) {
  check_var(x, "conv1d");
  check_var(kernels_var, "conv1d");
  check_var(bias, "conv1d");
  const Tensor& xv = node(x).value;
  const Tensor& kv = node(kernels_var).value;
  const Tensor& bv = node(bias).value;
  require(xv.rank() == 3, "conv1d", "input must be [B,L,C], got " + shape_str(xv.shape));
  require(kv.rank() == 3, "conv1d", "kernels must be [F,W,C], got " + shape_str(kv.shape));
  const int B = xv.dim(0), L = xv.dim(1), C = xv.dim(2);
  const int F = kv.dim(0), W = kv.dim(1);
  require(kv.dim(2) == C, "conv1d",
          "channel mismatch: input " + shape_str(xv.shape) + " vs kernels " + shape_str(kv.shape));
  require(bv.shape == std::vector<int>{F}, "conv1d", "bias must be [F], got " + shape_str(bv.shape));
  require(L >= W, "conv1d",
          "sequence length " + std::to_string(L) + " shorter than filter width " + std::to_string(W));

  const int Lo = L - W + 1;
  Tensor out = Tensor::zeros({B, Lo, F});
  kernels::conv1d_forward(xv.data(), kv.data(), bv.data(), out.data(), B, L, C, F, W);
  Var y = push(std::move(out));

  node(y).backprop = [this, y, x, kernels_var, bias, B, L, C, F, W, Lo]() {
    const double* dy = node(y).grad.data();
    kernels::conv1d_grad_x(dy, node(kernels_var).value.data(), node(x).grad.data(), B, L, C, F, W);
    kernels::conv1d_grad_k(node(x).value.data(), dy, node(kernels_var).grad.data(), B, L, C, F, W);
    kernels::conv1d_grad_bias(dy, node(bias).grad.data(), B, Lo, F);
  };
  return y;
}

Var Tape::max_pool1d(Var x, int width) {
  check_var(x, "max_pool1d");
  const Tensor& xv = node(x).value;
  require(xv.rank() == 3, "max_pool1d", "input must be [B,L,F], got " + shape_str(xv.shape));
  require(width >= 1, "max_pool1d", "width must be >= 1");
  const int B = xv.dim(0), L = xv.dim(1), F = xv.dim(2);
  require(L >= width, "max_pool1d",
          "sequence length " + std::to_string(L) + " shorter than pool width " + std::to_string(width));

  const int Lo = L / width;
  Tensor out = Tensor::zeros({B, Lo, F});
  auto argmax = std::make_shared<std::vector<int>>(static_cast<std::size_t>(B) * Lo * F);
  kernels::maxpool1d_forward(xv.data(), out.data(), argmax->data(), B, L, F, width);
  Var y = push(std::move(out));

  node(y).backprop = [this, y, x, argmax, B, L, Lo, F]() {
    kernels::maxpool1d_backward(node(y).grad.data(), argmax->data(), node(x).grad.data(), B, L, Lo,
                                F);
  };
  return y;
}

Var Tape::lstm_sequence(Var x, Var wx, Var wh, Var bias) {
  check_var(x, "lstm_sequence");
  check_var(wx, "lstm_sequence");
  check_var(wh, "lstm_sequence");
  check_var(bias, "lstm_sequence");
  const Tensor& xv = node(x).value;
  const Tensor& wxv = node(wx).value;
  const Tensor& whv = node(wh).value;
  const Tensor& bv = node(bias).value;
  require(xv.rank() == 3, "lstm_sequence", "input must be [B,T,C], got " + shape_str(xv.shape));
  const int B = xv.dim(0), T = xv.dim(1), C = xv.dim(2);
  require(whv.rank() == 2, "lstm_sequence", "wh must be [H,4H], got " + shape_str(whv.shape));
  const int H = whv.dim(0);
  require(whv.dim(1) == 4 * H, "lstm_sequence", "wh must be [H,4H], got " + shape_str(whv.shape));
  require(wxv.shape == std::vector<int>{C, 4 * H}, "lstm_sequence",
          "wx must be [C,4H]=" + shape_str({C, 4 * H}) + ", got " + shape_str(wxv.shape));
  require(bv.shape == std::vector<int>{4 * H}, "lstm_sequence",
          "bias must be [4H], got " + shape_str(bv.shape));
  require(T >= 1, "lstm_sequence", "empty sequence");

  auto gates = std::make_shared<Tensor>(Tensor::zeros({B, T, 4 * H}));
  auto cells = std::make_shared<Tensor>(Tensor::zeros({B, T, H}));
  auto hidden = std::make_shared<Tensor>(Tensor::zeros({B, T, H}));
  Tensor out = Tensor::zeros({B, H});
  kernels::lstm_seq_forward(xv.data(), wxv.data(), whv.data(), bv.data(), gates->data(),
                            cells->data(), hidden->data(), out.data(), B, T, C, H);
  Var y = push(std::move(out));

  node(y).backprop = [this, y, x, wx, wh, bias, gates, cells, hidden, B, T, C, H]() {
    Tensor dgates = Tensor::zeros({B, T, 4 * H});
    kernels::lstm_seq_backward(node(x).value.data(), node(wx).value.data(), node(wh).value.data(),
                               gates->data(), cells->data(), node(y).grad.data(), dgates.data(),
                               node(x).grad.data(), B, T, C, H);
    // weight gradients are plain reductions over the flattened (b,t) axis
    const int BT = B * T;
    kernels::matmul_grad_w(node(x).value.data(), dgates.data(), node(wx).grad.data(), BT, C, 4 * H);
    Tensor hprev = Tensor::zeros({B, T, H});
    for (int b = 0; b < B; ++b)
      for (int t = 1; t < T; ++t)
        for (int u = 0; u < H; ++u) hprev.at(b, t, u) = hidden->at(b, t - 1, u);
    kernels::matmul_grad_w(hprev.data(), dgates.data(), node(wh).grad.data(), BT, H, 4 * H);
    kernels::bias_grad(dgates.data(), node(bias).grad.data(), BT, 4 * H);
  };
  return y;
}

Var Tape::mean_pool(Var x, const std::vector<int>& lengths) {
  check_var(x, "mean_pool");
  const Tensor& xv = node(x).value;
  require(xv.rank() == 3, "mean_pool", "input must be [B,L,E], got " + shape_str(xv.shape));
  const int B = xv.dim(0), L = xv.dim(1), E = xv.dim(2);
  require(static_cast<int>(lengths.size()) == B, "mean_pool", "lengths size != batch");
  for (int l : lengths)
    require(l >= 0 && l <= L, "mean_pool", "length " + std::to_string(l) + " out of range");

  Tensor out = Tensor::zeros({B, E});
  kernels::meanpool_forward(xv.data(), lengths.data(), out.data(), B, L, E);
  Var y = push(std::move(out));

  auto len_keep = std::make_shared<std::vector<int>>(lengths);
  node(y).backprop = [this, y, x, len_keep, B, L, E]() {
    kernels::meanpool_backward(node(y).grad.data(), len_keep->data(), node(x).grad.data(), B, L, E);
  };
  return y;
}

Var Tape::dense(Var x, Var w, Var b) {
  check_var(x, "dense");
  check_var(w, "dense");
  check_var(b, "dense");
  const Tensor& xv = node(x).value;
  const Tensor& wv = node(w).value;
  const Tensor& bv = node(b).value;
  require(xv.rank() == 2, "dense", "input must be [B,I], got " + shape_str(xv.shape));
  require(wv.rank() == 2, "dense", "weight must be [I,O], got " + shape_str(wv.shape));
  const int B = xv.dim(0), I = xv.dim(1), O = wv.dim(1);
  require(wv.dim(0) == I, "dense",
          "weight rows != input width: " + shape_str(xv.shape) + " vs " + shape_str(wv.shape));
  require(bv.shape == std::vector<int>{O}, "dense", "bias must be [O], got " + shape_str(bv.shape));

  Tensor out = Tensor::zeros({B, O});
  kernels::matmul(xv.data(), wv.data(), out.data(), B, I, O);
  kernels::bias_add(bv.data(), out.data(), B, O);
  Var y = push(std::move(out));

  node(y).backprop = [this, y, x, w, b, B, I, O]() {
    const double* dy = node(y).grad.data();
    kernels::matmul_grad_x(dy, node(w).value.data(), node(x).grad.data(), B, I, O);
    kernels::matmul_grad_w(node(x).value.data(), dy, node(w).grad.data(), B, I, O);
    kernels::bias_grad(dy, node(b).grad.data(), B, O);
  };
  return y;
}

Var Tape::softmax(Var z) {
  check_var(z, "softmax");
  const Tensor& zv = node(z).value;
  require(zv.rank() == 1 || zv.rank() == 2, "softmax",
          "logits must be rank 1 or 2, got " + shape_str(zv.shape));
  if (!zv.all_finite()) throw std::domain_error("softmax: non-finite logits");
  const int B = zv.rank() == 2 ? zv.dim(0) : 1;
  const int K = zv.rank() == 2 ? zv.dim(1) : zv.dim(0);

  Tensor out = Tensor::zeros(zv.shape);
  kernels::softmax_rows(zv.data(), out.data(), B, K);
  Var y = push(std::move(out));

  node(y).backprop = [this, y, z, B, K]() {
    kernels::softmax_backward_rows(node(y).value.data(), node(y).grad.data(), node(z).grad.data(),
                                   B, K);
  };
  return y;
}

Var Tape::cross_entropy(Var probs, const std::vector<int>& targets) {
  check_var(probs, "cross_entropy");
  const Tensor& pv = node(probs).value;
  require(pv.rank() == 1 || pv.rank() == 2, "cross_entropy",
          "probs must be rank 1 or 2, got " + shape_str(pv.shape));
  const int B = pv.rank() == 2 ? pv.dim(0) : 1;
  const int K = pv.rank() == 2 ? pv.dim(1) : pv.dim(0);
  require(static_cast<int>(targets.size()) == B, "cross_entropy", "targets size != batch");
  for (int t : targets)
    require(t >= 0 && t < K, "cross_entropy", "target " + std::to_string(t) + " out of range");

  auto clamped_p = std::make_shared<std::vector<double>>(static_cast<std::size_t>(B));
  double total = 0.0;
  for (int b = 0; b < B; ++b) {
    double p = pv[b * K + targets[b]];
    if (p < kProbFloor) {
      p = kProbFloor;
      ++clamped_;
    }
    (*clamped_p)[static_cast<std::size_t>(b)] = p;
    total += -std::log(p);
  }
  Var y = push(Tensor::scalar(total / B));

  auto tgt = std::make_shared<std::vector<int>>(targets);
  node(y).backprop = [this, y, probs, tgt, clamped_p, B, K]() {
    double dloss = node(y).grad[0];
    Tensor& dp = node(probs).grad;
    for (int b = 0; b < B; ++b)
      dp[b * K + (*tgt)[static_cast<std::size_t>(b)]] +=
          dloss * (-1.0 / (*clamped_p)[static_cast<std::size_t>(b)]) / B;
  };
  return y;
}

Var Tape::add(Var a, Var b) {
  check_var(a, "add");
  check_var(b, "add");
  const Tensor& av = node(a).value;
  const Tensor& bv = node(b).value;
  require(av.same_shape(bv), "add",
          "shape mismatch " + shape_str(av.shape) + " vs " + shape_str(bv.shape));
  Tensor out = av;
  kernels::axpy(1.0, bv.data(), out.data(), out.size());
  Var y = push(std::move(out));
  node(y).backprop = [this, y, a, b]() {
    const Tensor& dy = node(y).grad;
    kernels::axpy(1.0, dy.data(), node(a).grad.data(), dy.size());
    kernels::axpy(1.0, dy.data(), node(b).grad.data(), dy.size());
  };
  return y;
}

Var Tape::mul(Var a, Var b) {
  check_var(a, "mul");
  check_var(b, "mul");
  const Tensor& av = node(a).value;
  const Tensor& bv = node(b).value;
  require(av.same_shape(bv), "mul",
          "shape mismatch " + shape_str(av.shape) + " vs " + shape_str(bv.shape));
  Tensor out = Tensor::zeros(av.shape);
  for (int i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  Var y = push(std::move(out));
  node(y).backprop = [this, y, a, b]() {
    const Tensor& dy = node(y).grad;
    Tensor& da = node(a).grad;
    Tensor& db = node(b).grad;
    const Tensor& av2 = node(a).value;
    const Tensor& bv2 = node(b).value;
    for (int i = 0; i < dy.size(); ++i) {
      da[i] += dy[i] * bv2[i];
      db[i] += dy[i] * av2[i];
    }
  };
  return y;
}

Var Tape::scale(Var a, double s) {
  check_var(a, "scale");
  if (!std::isfinite(s)) throw std::domain_error("scale: non-finite factor");
  const Tensor& av = node(a).value;
  Tensor out = Tensor::zeros(av.shape);
  kernels::axpy(s, av.data(), out.data(), out.size());
  Var y = push(std::move(out));
  node(y).backprop = [this, y, a, s]() {
    kernels::axpy(s, node(y).grad.data(), node(a).grad.data(), node(y).grad.size());
  };
  return y;
}

Var Tape::reshape(Var x, std::vector<int> shape) {
  check_var(x, "reshape");
  const Tensor& xv = node(x).value;
  require(shape_size(shape) == xv.size(), "reshape",
          "cannot reshape " + shape_str(xv.shape) + " to " + shape_str(shape));
  Tensor out(std::move(shape), xv.v);
  Var y = push(std::move(out));
  node(y).backprop = [this, y, x]() {
    kernels::axpy(1.0, node(y).grad.data(), node(x).grad.data(), node(y).grad.size());
  };
  return y;
}

Var Tape::sum(Var x) {
  check_var(x, "sum");
  const Tensor& xv = node(x).value;
  double s = 0.0;
  for (double e : xv.v) s += e;
  Var y = push(Tensor::scalar(s));
  node(y).backprop = [this, y, x]() {
    double dy = node(y).grad[0];
    Tensor& dx = node(x).grad;
    for (double& e : dx.v) e += dy;
  };
  return y;
}

void Tape::backward(Var loss) {
  check_var(loss, "backward");
  if (node(loss).value.size() != 1)
    throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                shape_str(node(loss).value.shape));
  node(loss).grad[0] = 1.0;
  for (int i = loss.id; i >= 0; --i)
    if (nodes_[static_cast<std::size_t>(i)].backprop) nodes_[static_cast<std::size_t>(i)].backprop();
}

void AdamOptimizer::step(std::map<std::string, Tensor>& params,
                         const std::map<std::string, Tensor>& grads) {
  ++t_;
  const double b1t = std::pow(cfg_.beta1, static_cast<double>(t_));
  const double b2t = std::pow(cfg_.beta2, static_cast<double>(t_));
  for (auto& [name, p] : params) {
    auto git = grads.find(name);
    if (git == grads.end())
      throw std::invalid_argument("adam: missing gradient for parameter '" + name + "'");
    const Tensor& g = git->second;
    if (!g.same_shape(p))
      throw std::invalid_argument("adam: gradient shape " + shape_str(g.shape) +
                                  " != parameter shape " + shape_str(p.shape) + " for '" + name +
                                  "'");
    if (!g.all_finite())
      throw std::domain_error("adam: non-finite gradient for parameter '" + name + "'");
    Tensor& m = m_.try_emplace(name, Tensor::zeros(p.shape)).first->second;
    Tensor& v = v_.try_emplace(name, Tensor::zeros(p.shape)).first->second;
    kernels::adam_update(p.data(), g.data(), m.data(), v.data(), p.size(), cfg_.lr, cfg_.beta1,
                         cfg_.beta2, cfg_.epsilon, b1t, b2t);
  }
}

double grad_check(const std::function<Var(Tape&, Var)>& f, const Tensor& input, double eps) {
  Tensor analytic;
  {
    Tape tape;
    Var x = tape.leaf(input, "grad_check_input");
    Var loss = f(tape, x);
    tape.backward(loss);
    analytic = tape.grad(x);
  }

  auto eval = [&f](const Tensor& in) {
    Tape tape;
    Var x = tape.leaf(in, "grad_check_input");
    return tape.value(f(tape, x))[0];
  };

  const int n = input.size();
  std::vector<double> rel(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Tensor plus = input;
    Tensor minus = input;
    plus[i] += eps;
    minus[i] -= eps;
    double numeric = (eval(plus) - eval(minus)) / (2.0 * eps);
    rel[static_cast<std::size_t>(i)] =
        std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric));
  }
  double worst = 0.0;
  for (double r : rel) worst = std::max(worst, r);
  return worst;
}

Tensor init_uniform(std::vector<int> shape, std::uint64_t seed, std::string_view name, double lo,
                    double hi) {
  RngStream rng(seed, std::string("init/") + std::string(name));
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& e : t.v) e = rng.uniform(lo, hi);
  return t;
}

}  // namespace emtl
