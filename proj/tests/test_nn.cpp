#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "coin/nn/checkpoint.hpp"
#include "coin/nn/layers.hpp"
#include "coin/nn/loss.hpp"
#include "coin/nn/optim.hpp"
#include "support/oracles.hpp"

using namespace coin;
using namespace coin::nn;

namespace {

// Scalar probe: L = <dOut, f(x)> with a fixed random dOut.
double probe(const Tensor& y, const Tensor& weights) { return dot(y, weights); }

}  // namespace

TEST(Linear, IdentityInput) {
  const Param w(Tensor::from_rows({{1, 2}, {3, 4}}));
  const Param b(Tensor(1, 2));
  EXPECT_EQ(linear_forward(Tensor::from_rows({{1, 0}, {0, 1}}), w, b), Tensor::from_rows({{1, 2}, {3, 4}}));
}

TEST(Linear, BiasOnly) {
  const Param w(Tensor(3, 2, 1.0));
  const Param b(Tensor::from_rows({{5, 5}}));
  const auto y = linear_forward(Tensor(4, 3), w, b);
  for (double v : y.values()) EXPECT_EQ(v, 5.0);
}

TEST(Linear, BackwardOnesGivesXtOnes) {
  Rng rng(1);
  const Tensor x = oracle::random_tensor(5, 3, rng);
  Param w(oracle::random_tensor(3, 2, rng));
  Param b(Tensor(1, 2));
  linear_backward(x, w, b, Tensor(5, 2, 1.0));
  for (std::size_t i = 0; i < 3; ++i) {
    double col = 0.0;
    for (std::size_t r = 0; r < 5; ++r) col += x(r, i);
    EXPECT_NEAR(w.grad(i, 0), col, 1e-14);
    EXPECT_NEAR(w.grad(i, 1), col, 1e-14);
  }
  EXPECT_EQ(b.grad, Tensor(1, 2, 5.0));
}

TEST(Linear, FiniteDifferences) {
  Rng rng(2);
  Tensor x = oracle::random_tensor(6, 4, rng);
  Param w(oracle::random_tensor(4, 3, rng));
  Param b(oracle::random_tensor(1, 3, rng));
  const Tensor d_out = oracle::random_tensor(6, 3, rng);
  const auto loss = [&] { return probe(linear_forward(x, w, b), d_out); };
  const Tensor dx = linear_backward(x, w, b, d_out);
  EXPECT_LE(oracle::relative_error(dx, oracle::finite_difference(x, loss)), 1e-6);
  EXPECT_LE(oracle::relative_error(w.grad, oracle::finite_difference(w.value, loss)), 1e-6);
  EXPECT_LE(oracle::relative_error(b.grad, oracle::finite_difference(b.value, loss)), 1e-6);
}

TEST(Linear, SparseMatchesDense) {
  Rng rng(3);
  Tensor x = oracle::random_tensor(7, 5, rng);
  for (double& v : x.values()) v = v > 0.3 ? v : 0.0;
  Param w1(oracle::random_tensor(5, 2, rng));
  Param b1(oracle::random_tensor(1, 2, rng));
  Param w2 = w1;
  Param b2 = b1;
  const auto sx = SparseRows::from_dense(x);
  EXPECT_LE(max_abs_diff(linear_forward(sx, w1, b1), linear_forward(x, w2, b2)), 1e-15);
  const Tensor d_out = oracle::random_tensor(7, 2, rng);
  linear_backward_params(sx, w1, b1, d_out);
  linear_backward(x, w2, b2, d_out);
  EXPECT_LE(max_abs_diff(w1.grad, w2.grad), 1e-15);
  EXPECT_LE(max_abs_diff(b1.grad, b2.grad), 1e-15);
}

TEST(Linear, ShapeMismatch) {
  const Param w(Tensor(3, 2));
  const Param b(Tensor(1, 2));
  EXPECT_THROW(linear_forward(Tensor(2, 4), w, b), ShapeError);
}

TEST(Relu, ForwardAndGate) {
  const auto x = Tensor::from_rows({{-1, 0, 2}});
  EXPECT_EQ(relu_forward(x), Tensor::from_rows({{0, 0, 2}}));
  EXPECT_EQ(relu_backward(x, Tensor(1, 3, 1.0)), Tensor::from_rows({{0, 0, 1}}));
}

TEST(Relu, FiniteDifferencesAwayFromKink) {
  Rng rng(4);
  Tensor x = oracle::random_tensor(8, 5, rng);
  for (double& v : x.values()) {
    if (std::abs(v) < 1e-3) v = 0.5;
  }
  const Tensor d_out = oracle::random_tensor(8, 5, rng);
  const Tensor dx = relu_backward(x, d_out);
  EXPECT_LE(oracle::relative_error(dx, oracle::finite_difference(x, [&] { return probe(relu_forward(x), d_out); })),
            1e-6);
}

TEST(Softmax, Symmetric) { EXPECT_EQ(softmax_rows(Tensor::from_rows({{0, 0}})), Tensor::from_rows({{0.5, 0.5}})); }

TEST(Softmax, NoOverflow) {
  EXPECT_EQ(softmax_rows(Tensor::from_rows({{1000, 1000}})), Tensor::from_rows({{0.5, 0.5}}));
  const auto y = softmax_rows(Tensor::from_rows({{-1000, 1000}}));
  EXPECT_TRUE(y.all_finite());
  EXPECT_EQ(y(0, 1), 1.0);
}

TEST(Softmax, ExtendedPrecisionReference) {
  const auto y = softmax_rows(Tensor::from_rows({{1, 2, 3}}));
  long double z = 0;
  for (int k = 1; k <= 3; ++k) z += std::exp(static_cast<long double>(k));
  for (int k = 1; k <= 3; ++k) {
    const auto want = static_cast<double>(std::exp(static_cast<long double>(k)) / z);
    EXPECT_NEAR(y(0, static_cast<std::size_t>(k - 1)), want, 2.3e-16);
  }
}

TEST(Softmax, FiniteDifferences) {
  Rng rng(5);
  Tensor x = oracle::random_tensor(6, 4, rng, -3, 3);
  const Tensor d_out = oracle::random_tensor(6, 4, rng);
  const Tensor dx = softmax_backward(softmax_rows(x), d_out);
  EXPECT_LE(
      oracle::relative_error(dx, oracle::finite_difference(x, [&] { return probe(softmax_rows(x), d_out); })), 1e-6);
}

TEST(Nll, PerfectPrediction) {
  const auto u = Tensor::from_rows({{1, 0}, {0, 1}});
  EXPECT_EQ(nll_masked(u, {0, 1}, {0, 1}), 0.0);
}

TEST(Nll, HalfHalfIsLn2) {
  EXPECT_DOUBLE_EQ(nll_masked(Tensor::from_rows({{0.5, 0.5}}), {0}, {0}), std::numbers::ln2);
}

TEST(Nll, FiniteDifferences) {
  Rng rng(6);
  Tensor u = oracle::random_simplex_rows(10, 4, rng);
  std::vector<int> y(10);
  for (int& v : y) v = static_cast<int>(rng.below(4));
  const IndexSet mask{0, 2, 3, 7, 9};
  const Tensor g = nll_masked_backward(u, y, mask);
  EXPECT_LE(oracle::relative_error(g, oracle::finite_difference(u, [&] { return nll_masked(u, y, mask); })), 1e-5);
}

TEST(Nll, ClampedProbabilities) {
  const auto u = Tensor::from_rows({{0.0, 1.0}});
  EXPECT_DOUBLE_EQ(nll_masked(u, {0}, {0}), -std::log(kProbFloor));
  EXPECT_EQ(nll_clamped_count(u, {0}, {0}), 1u);
  EXPECT_TRUE(nll_masked_backward(u, {0}, {0}).all_finite());
}

TEST(Nll, RejectsEmptyMaskAndBadLabels) {
  const auto u = Tensor::from_rows({{0.5, 0.5}});
  EXPECT_THROW(nll_masked(u, {0}, {}), InputError);
  EXPECT_THROW(nll_masked(u, {-1}, {0}), InputError);
  EXPECT_THROW(nll_masked(u, {0}, {3}), ShapeError);
}

TEST(Mse, Analytic) {
  const auto pred = Tensor::from_rows({{1}, {3}});
  EXPECT_EQ(mse_masked(pred, pred, {0, 1}), 0.0);
  EXPECT_EQ(mse_masked(pred, Tensor(2, 1), {0, 1}), 5.0);
}

TEST(Mse, FiniteDifferences) {
  Rng rng(7);
  Tensor pred = oracle::random_tensor(9, 1, rng);
  const Tensor target = oracle::random_tensor(9, 1, rng);
  const IndexSet mask{1, 4, 5, 8};
  const Tensor g = mse_masked_backward(pred, target, mask);
  EXPECT_LE(
      oracle::relative_error(g, oracle::finite_difference(pred, [&] { return mse_masked(pred, target, mask); })),
      1e-6);
}

TEST(Dropout, IdentityCases) {
  Rng rng(8);
  DropoutMask mask;
  const Tensor x = oracle::random_tensor(4, 4, rng);
  EXPECT_EQ(dropout_forward(x, 0.0, rng, true, mask), x);
  EXPECT_EQ(dropout_forward(x, 0.7, rng, false, mask), x);
  EXPECT_EQ(dropout_backward(mask, x), x);
}

TEST(Dropout, MeanPreserved) {
  Rng rng(9);
  DropoutMask mask;
  const Tensor y = dropout_forward(Tensor(100000, 1, 1.0), 0.5, rng, true, mask);
  double s = 0.0;
  for (double v : y.values()) s += v;
  EXPECT_NEAR(s / 100000.0, 1.0, 0.02);
}

TEST(Dropout, BackwardUsesMask) {
  Rng rng(10);
  DropoutMask mask;
  const Tensor y = dropout_forward(Tensor(10, 10, 1.0), 0.3, rng, true, mask);
  EXPECT_EQ(dropout_backward(mask, Tensor(10, 10, 1.0)), y);
  EXPECT_THROW(check_dropout_rate(1.0), InputError);
}

TEST(Optimizer, ZeroGradientLeavesParams) {
  for (auto state : {make_adam(0.1, 0.0), make_sgd(0.1, 0.9, 0.0)}) {
    Param p(Tensor::from_rows({{1.5, -2.0}}));
    Param* ps[] = {&p};
    optimizer_step(state, ps);
    EXPECT_EQ(p.value, Tensor::from_rows({{1.5, -2.0}}));
  }
}

TEST(Optimizer, AdamScalarFirstStep) {
  auto state = make_adam(0.1, 0.0);
  Param p(Tensor(1, 1, 1.0));
  p.grad(0, 0) = 1.0;
  Param* ps[] = {&p};
  optimizer_step(state, ps);
  // m_hat = v_hat = 1, so the step is lr / (1 + eps).
  EXPECT_NEAR(p.value(0, 0), 1.0 - 0.1 / (1.0 + 1e-8), 1e-15);
}

TEST(Optimizer, WeightDecayActsAsGradient) {
  for (int kind = 0; kind < 2; ++kind) {
    auto decayed = kind == 0 ? make_adam(0.05, 0.3) : make_sgd(0.05, 0.9, 0.3);
    auto plain = kind == 0 ? make_adam(0.05, 0.0) : make_sgd(0.05, 0.9, 0.0);
    Param a(Tensor::from_rows({{2.0, -1.0}}));
    Param b = a;
    Param* pa[] = {&a};
    Param* pb[] = {&b};
    for (int step = 0; step < 3; ++step) {
      b.grad = b.value;
      for (double& v : b.grad.values()) v *= 0.3;
      optimizer_step(decayed, pa);
      optimizer_step(plain, pb);
      EXPECT_EQ(a.value, b.value);
    }
  }
}

TEST(Optimizer, SgdMomentumHandTrace) {
  auto state = make_sgd(0.1, 0.9, 0.0);
  Param p(Tensor(1, 1, 0.0));
  Param* ps[] = {&p};
  p.grad(0, 0) = 1.0;
  optimizer_step(state, ps);
  EXPECT_DOUBLE_EQ(p.value(0, 0), -0.1);
  optimizer_step(state, ps);  // v = 0.9 + 1
  EXPECT_DOUBLE_EQ(p.value(0, 0), -0.1 - 0.19);
}

TEST(Optimizer, ParseKinds) {
  EXPECT_EQ(parse_optimizer_kind("adam"), OptimizerKind::adam);
  EXPECT_EQ(parse_optimizer_kind("sgd"), OptimizerKind::sgd_momentum);
  EXPECT_THROW(parse_optimizer_kind("rmsprop"), InputError);
}

TEST(MultistepLr, Milestones) {
  EXPECT_EQ(multistep_lr(0, 100, 1.0), 1.0);
  EXPECT_EQ(multistep_lr(49, 100, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(multistep_lr(50, 100, 1.0), 0.1);
  EXPECT_DOUBLE_EQ(multistep_lr(74, 100, 1.0), 0.1);
  EXPECT_DOUBLE_EQ(multistep_lr(75, 100, 1.0), 0.01);
}

TEST(Checkpoint, RoundTrip) {
  Rng rng(11);
  const NamedTensors t{{"a", oracle::random_tensor(3, 2, rng)}, {"bias", Tensor(1, 4, 0.25)}, {"empty", Tensor()}};
  EXPECT_EQ(decode_checkpoint(encode_checkpoint(t)), t);
  const auto path = std::filesystem::temp_directory_path() / "coin_ckpt_roundtrip.bin";
  save_checkpoint(path, t);
  EXPECT_EQ(load_checkpoint(path), t);
  std::filesystem::remove(path);
  const auto blob = encode_checkpoint(t);
  EXPECT_THROW(decode_checkpoint(blob.substr(0, blob.size() - 1)), InputError);
}
