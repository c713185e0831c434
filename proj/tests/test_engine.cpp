#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "emtl/engine.hpp"
#include "test_util.hpp"

using emtl::AdamOptimizer;
using emtl::grad_check;
using emtl::Tape;
using emtl::Tensor;
using emtl::Var;
using testutil::random_tensor;

TEST_CASE("softmax closed forms and stability") {
  Tape tape;
  Var z = tape.leaf(Tensor({2}, {0.0, 0.0}));
  const Tensor& p = tape.value(tape.softmax(z));
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));

  Var z2 = tape.leaf(Tensor({2}, {std::log(2.0), 0.0}));
  const Tensor& p2 = tape.value(tape.softmax(z2));
  CHECK(p2[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p2[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  Var z3 = tape.leaf(Tensor({2}, {1000.0, 0.0}));
  const Tensor& p3 = tape.value(tape.softmax(z3));
  CHECK(p3.all_finite());
  CHECK(p3[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p3[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one and keep the argmax") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    Tensor z = random_tensor({4, 6}, seed, "z", -8.0, 8.0);
    Tape tape;
    const Tensor& p = tape.value(tape.softmax(tape.leaf(z)));
    for (int b = 0; b < 4; ++b) {
      double row_sum = 0.0;
      int argmax_z = 0, argmax_p = 0;
      for (int k = 0; k < 6; ++k) {
        row_sum += p.at(b, k);
        if (z.at(b, k) > z.at(b, argmax_z)) argmax_z = k;
        if (p.at(b, k) > p.at(b, argmax_p)) argmax_p = k;
      }
      CHECK(std::abs(row_sum - 1.0) <= 1e-9);
      CHECK(argmax_z == argmax_p);
    }
  }
}

TEST_CASE("cross entropy closed forms") {
  Tape tape;
  // one-hot at the target: zero loss
  Var onehot = tape.leaf(Tensor({3}, {0.0, 1.0, 0.0}));
  CHECK(tape.value(tape.cross_entropy(onehot, {1}))[0] == doctest::Approx(0.0));

  // uniform over two classes: ln 2
  Var uniform = tape.leaf(Tensor({2}, {0.5, 0.5}));
  CHECK(tape.value(tape.cross_entropy(uniform, {0}))[0] ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));

  // batch of {ln 2, 0}: mean ln(2)/2 = 0.34657359027997264 (hand arithmetic)
  Var batch = tape.leaf(Tensor({2, 2}, {0.5, 0.5, 0.0, 1.0}));
  CHECK(tape.value(tape.cross_entropy(batch, {0, 1}))[0] ==
        doctest::Approx(0.34657359027997264).epsilon(1e-12));
}

TEST_CASE("cross entropy clamps vanishing probabilities and flags it") {
  Tape tape;
  Var degenerate = tape.leaf(Tensor({2}, {1.0, 0.0}));
  CHECK(tape.clamped_prob_events() == 0);
  const Tensor& loss = tape.value(tape.cross_entropy(degenerate, {1}));
  CHECK(tape.clamped_prob_events() == 1);
  CHECK(loss[0] == doctest::Approx(-std::log(1e-12)).epsilon(1e-12));
}

TEST_CASE("backward basics") {
  {
    Tape tape;
    Var x = tape.leaf(Tensor::scalar(3.0));
    tape.backward(tape.sum(x));  // identity
    CHECK(tape.grad(x)[0] == 1.0);
  }
  {
    // f(x) = x^2 at x=3 -> gradient 6
    Tape tape;
    Var x = tape.leaf(Tensor::scalar(3.0));
    tape.backward(tape.sum(tape.mul(x, x)));
    CHECK(tape.grad(x)[0] == doctest::Approx(6.0).epsilon(1e-12));
  }
  {
    // a branch scaled by exactly 0 contributes exactly zero gradient
    Tape tape;
    Var x = tape.leaf(Tensor({3}, {1.0, -2.0, 5.0}));
    Var y = tape.leaf(Tensor({3}, {0.5, 0.5, 0.5}));
    Var loss = tape.add(tape.sum(tape.scale(x, 0.0)), tape.sum(y));
    tape.backward(loss);
    for (int i = 0; i < 3; ++i) CHECK(tape.grad(x)[i] == 0.0);
    for (int i = 0; i < 3; ++i) CHECK(tape.grad(y)[i] == 1.0);
  }
  {
    // parameters unreachable from the loss keep exact zero gradients
    Tape tape;
    Var used = tape.leaf(Tensor::scalar(2.0));
    Var unused = tape.leaf(Tensor({2}, {1.0, 1.0}));
    tape.backward(tape.sum(used));
    CHECK(tape.grad(unused)[0] == 0.0);
    CHECK(tape.grad(unused)[1] == 0.0);
  }
  {
    Tape tape;
    Var x = tape.leaf(Tensor({2}, {1.0, 2.0}));
    CHECK_THROWS_AS(tape.backward(x), std::invalid_argument);  // non-scalar loss
  }
}

TEST_CASE("forward primitive shapes and degenerate cases") {
  Tape tape;
  // conv1d valid padding: length L - W + 1
  Var x = tape.leaf(random_tensor({2, 10, 3}, 7, "x"));
  Var kern = tape.leaf(random_tensor({4, 5, 3}, 7, "k"));
  Var bias = tape.leaf(Tensor::zeros({4}));
  Var y = tape.conv1d(x, kern, bias);
  CHECK(tape.value(y).shape == std::vector<int>{2, 6, 4});

  // all-zero lstm weights and inputs give a zero hidden state
  Var lx = tape.leaf(Tensor::zeros({2, 4, 3}));
  Var wx = tape.leaf(Tensor::zeros({3, 8}));
  Var wh = tape.leaf(Tensor::zeros({2, 8}));
  Var lb = tape.leaf(Tensor::zeros({8}));
  const Tensor& h = tape.value(tape.lstm_sequence(lx, wx, wh, lb));
  CHECK(h.shape == std::vector<int>{2, 2});
  for (double v : h.v) CHECK(v == 0.0);

  // dense with identity weights and zero bias passes the input through
  Var dx = tape.leaf(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  Tensor eye = Tensor::zeros({3, 3});
  eye.at(0, 0) = eye.at(1, 1) = eye.at(2, 2) = 1.0;
  Var dy = tape.dense(dx, tape.leaf(eye), tape.leaf(Tensor::zeros({3})));
  for (int i = 0; i < 6; ++i) CHECK(tape.value(dy)[i] == tape.value(dx)[i]);

  // shape errors name the operation
  CHECK_THROWS_WITH_AS((void)tape.dense(dx, tape.leaf(Tensor::zeros({4, 3})),
                                        tape.leaf(Tensor::zeros({3}))),
                       doctest::Contains("dense"), std::invalid_argument);
  CHECK_THROWS_AS((void)tape.conv1d(tape.leaf(Tensor::zeros({1, 3, 2})),
                                    tape.leaf(Tensor::zeros({2, 5, 2})),
                                    tape.leaf(Tensor::zeros({2}))),
                  std::invalid_argument);  // L < W
}

TEST_CASE("mean pool respects true lengths") {
  Tape tape;
  Tensor x = Tensor::zeros({2, 3, 2});
  x.at(0, 0, 0) = 2.0;
  x.at(0, 1, 0) = 4.0;
  x.at(0, 2, 0) = 100.0;  // past the true length, must be ignored
  x.at(1, 0, 1) = 5.0;
  const Tensor& y = tape.value(tape.mean_pool(tape.leaf(x), {2, 1}));
  CHECK(y.at(0, 0) == doctest::Approx(3.0));
  CHECK(y.at(1, 1) == doctest::Approx(5.0));
}

TEST_CASE("gradient checks per primitive") {
  // linear function: essentially exact
  Tensor x0 = random_tensor({6}, 1, "lin");
  double err = grad_check(
      [](Tape& t, Var x) { return t.sum(t.scale(x, 3.25)); }, x0);
  CHECK(err <= 1e-10);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    // softmax + cross-entropy composite on 6 logits
    Tensor logits = random_tensor({6}, seed, "logits", -2.0, 2.0);
    err = grad_check(
        [](Tape& t, Var z) { return t.cross_entropy(t.softmax(z), {2}); }, logits);
    CHECK(err <= 1e-4);

    // lstm over a length-3 random sequence, gradient w.r.t. the input
    Tensor seq = random_tensor({2, 3, 3}, seed, "seq");
    err = grad_check(
        [seed](Tape& t, Var x) {
          Var wx = t.leaf(random_tensor({3, 16}, seed, "wx", -0.5, 0.5));
          Var wh = t.leaf(random_tensor({4, 16}, seed, "wh", -0.5, 0.5));
          Var b = t.leaf(random_tensor({16}, seed, "b", -0.5, 0.5));
          return t.sum(t.lstm_sequence(x, wx, wh, b));
        },
        seq);
    CHECK(err <= 1e-4);

    // lstm gradient w.r.t. the recurrent weights
    Tensor wh0 = random_tensor({4, 16}, seed, "wh0", -0.5, 0.5);
    err = grad_check(
        [seed](Tape& t, Var wh) {
          Var x = t.leaf(random_tensor({2, 3, 3}, seed, "xs"));
          Var wx = t.leaf(random_tensor({3, 16}, seed, "wxs", -0.5, 0.5));
          Var b = t.leaf(random_tensor({16}, seed, "bs", -0.5, 0.5));
          return t.sum(t.lstm_sequence(x, wx, wh, b));
        },
        wh0);
    CHECK(err <= 1e-4);

    // conv + maxpool composite
    Tensor cx = random_tensor({2, 8, 3}, seed, "cx");
    err = grad_check(
        [seed](Tape& t, Var x) {
          Var kern = t.leaf(random_tensor({4, 3, 3}, seed, "kk", -0.5, 0.5));
          Var bias = t.leaf(random_tensor({4}, seed, "kb", -0.5, 0.5));
          return t.sum(t.max_pool1d(t.conv1d(x, kern, bias), 2));
        },
        cx);
    CHECK(err <= 1e-4);

    // mean pool with mixed true lengths
    Tensor mx = random_tensor({3, 4, 2}, seed, "mx");
    err = grad_check(
        [seed](Tape& t, Var x) {
          Var w = t.leaf(random_tensor({3, 2}, seed, "mw"));
          return t.sum(t.mul(t.mean_pool(x, {4, 2, 1}), w));
        },
        mx);
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("adam update") {
  // zero gradients leave parameters untouched and advance the step counter
  AdamOptimizer adam({0.1});
  std::map<std::string, Tensor> params{{"w", Tensor({2}, {1.0, -2.0})}};
  std::map<std::string, Tensor> grads{{"w", Tensor::zeros({2})}};
  adam.step(params, grads);
  CHECK(adam.step_count() == 1);
  CHECK(params.at("w")[0] == 1.0);
  CHECK(params.at("w")[1] == -2.0);

  // step 1 with g=1, lr=0.1: bias-corrected update is 0.1 / (1 + 1e-8)
  AdamOptimizer adam2({0.1});
  std::map<std::string, Tensor> p2{{"w", Tensor::scalar(0.0)}};
  std::map<std::string, Tensor> g2{{"w", Tensor::scalar(1.0)}};
  adam2.step(p2, g2);
  const double expected = -0.1 * (1.0 / (1.0 + 1e-8));
  CHECK(p2.at("w")[0] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(p2.at("w")[0] == doctest::Approx(-0.1).epsilon(1e-6));

  // identical state and inputs give identical results
  AdamOptimizer a3({0.01}), a4({0.01});
  std::map<std::string, Tensor> p3{{"w", random_tensor({8}, 5, "p")}};
  std::map<std::string, Tensor> p4 = p3;
  std::map<std::string, Tensor> g3{{"w", random_tensor({8}, 6, "g")}};
  for (int i = 0; i < 3; ++i) {
    a3.step(p3, g3);
    a4.step(p4, g3);
  }
  CHECK(testutil::bitwise_equal(p3.at("w").v, p4.at("w").v));

  // non-finite gradient is an error
  std::map<std::string, Tensor> bad{{"w", Tensor::scalar(std::nan(""))}};
  Tensor t = Tensor::scalar(0.0);
  std::map<std::string, Tensor> pw{{"w", t}};
  CHECK_THROWS_AS(a3.step(pw, bad), std::domain_error);
}

TEST_CASE("leaf rejects non-finite values") {
  Tape tape;
  CHECK_THROWS_AS((void)tape.leaf(Tensor({1}, {std::numeric_limits<double>::infinity()})),
                  std::domain_error);
}
