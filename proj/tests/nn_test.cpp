#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "patentrec/nn.hpp"

namespace patentrec::nn {
namespace {

TEST(Activations, KnownValues) {
  EXPECT_NEAR(elu(-1.0), std::exp(-1.0) - 1.0, 1e-15);
  EXPECT_NEAR(elu(-1.0), -0.6321205588, 1e-10);
  EXPECT_EQ(elu(2.5), 2.5);
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(2.0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  // No overflow far in the tails.
  EXPECT_GT(sigmoid(-800.0), -1e-300);
  EXPECT_LE(sigmoid(800.0), 1.0);
  EXPECT_TRUE(std::isfinite(sigmoid(-800.0)));
}

TEST(Activations, DerivativesMatchFiniteDifferences) {
  for (Activation act : {Activation::kIdentity, Activation::kElu, Activation::kSigmoid}) {
    for (double z : {-3.0, -0.7, 0.4, 2.2}) {
      const double h = 1e-6;
      const double numeric = (activate(act, z + h) - activate(act, z - h)) / (2 * h);
      EXPECT_NEAR(activation_grad(act, z, activate(act, z)), numeric, 1e-8)
          << activation_name(act) << " at " << z;
    }
  }
}

TEST(Activations, NamesRoundTrip) {
  for (Activation act : {Activation::kIdentity, Activation::kElu, Activation::kSigmoid}) {
    EXPECT_EQ(parse_activation(activation_name(act)), act);
  }
  EXPECT_THROW(parse_activation("relu6"), ArtifactError);
}

TEST(Losses, BinaryCrossEntropy) {
  EXPECT_NEAR(bce_loss(0.9, 0).loss, -std::log(0.1), 1e-12);
  EXPECT_NEAR(bce_loss(0.9, 0).loss, 2.302585093, 1e-9);
  EXPECT_NEAR(bce_loss(0.9, 1).loss, -std::log(0.9), 1e-12);
  // Clamped at the boundaries.
  EXPECT_NEAR(bce_loss(1.0, 0).loss, -std::log(kBceClamp), 1e-6);
  EXPECT_TRUE(std::isfinite(bce_loss(0.0, 1).loss));
  // d/dp of -log(p) is -1/p.
  EXPECT_NEAR(bce_loss(0.25, 1).grad, -4.0, 1e-12);
  EXPECT_NEAR(bce_loss(0.25, 0).grad, 1.0 / 0.75, 1e-12);
}

TEST(Losses, TripletHinge) {
  const TripletLoss active = triplet_hinge(0.6, 0.1, 1.0);
  EXPECT_NEAR(active.loss, 0.5, 1e-15);
  EXPECT_EQ(active.d_pos, -1.0);
  EXPECT_EQ(active.d_neg, 1.0);
  const TripletLoss inactive = triplet_hinge(1.0, -0.5, 1.0);
  EXPECT_EQ(inactive.loss, 0.0);
  EXPECT_EQ(inactive.d_pos, 0.0);
  // Exactly at the kink the subgradient is zero.
  const TripletLoss kink = triplet_hinge(0.5, -0.5, 1.0);
  EXPECT_EQ(kink.loss, 0.0);
  EXPECT_EQ(kink.d_neg, 0.0);
}

std::vector<std::size_t> widths(std::initializer_list<std::size_t> w) { return w; }

TEST(Mlp, ShapesAndParameterCount) {
  const auto w = widths({155, 20, 20, 20, 1});
  Mlp mlp(w, Activation::kElu, Activation::kSigmoid);
  EXPECT_EQ(mlp.input_size(), 155u);
  EXPECT_EQ(mlp.output_size(), 1u);
  EXPECT_EQ(mlp.parameter_count(), 155u * 20 + 20 + 20 * 20 + 20 + 20 * 20 + 20 + 20 + 1);
  ASSERT_EQ(mlp.layers().size(), 4u);
  EXPECT_EQ(mlp.layers()[0].activation, Activation::kElu);
  EXPECT_EQ(mlp.layers()[3].activation, Activation::kSigmoid);
  for (std::size_t l = 1; l < mlp.layers().size(); ++l) {
    EXPECT_EQ(mlp.layers()[l].in, mlp.layers()[l - 1].out);
  }
}

TEST(Mlp, ZeroModelOutputsOneHalf) {
  const auto w = widths({4, 3, 1});
  Mlp mlp(w, Activation::kElu, Activation::kSigmoid);
  const std::vector<double> x = {1, -2, 3, 0.5};
  EXPECT_EQ(mlp.forward(x)[0], 0.5);
  EXPECT_THROW(mlp.forward(std::vector<double>{1, 2}), ValidationError);
}

TEST(Mlp, HandComputedForward) {
  const auto w = widths({2, 2, 1});
  Mlp mlp(w, Activation::kElu, Activation::kIdentity);
  auto w0 = mlp.mutable_weights(0);
  w0[0] = 1.0;   // h0 = x0 - x1
  w0[1] = -1.0;
  w0[2] = 0.5;   // h1 = 0.5 x0 + 0.5 x1 + 1
  w0[3] = 0.5;
  mlp.mutable_bias(0)[1] = 1.0;
  auto w1 = mlp.mutable_weights(1);
  w1[0] = 2.0;
  w1[1] = 3.0;
  mlp.mutable_bias(1)[0] = -1.0;
  const std::vector<double> x = {1.0, 2.0};
  // h0 = elu(-1), h1 = 2.5
  const double expected = 2.0 * (std::exp(-1.0) - 1.0) + 3.0 * 2.5 - 1.0;
  EXPECT_NEAR(mlp.forward(x)[0], expected, 1e-14);
}

TEST(Mlp, BackpropMatchesGradCheck) {
  Rng rng(5);
  const auto w = widths({7, 5, 4, 1});
  Mlp mlp = Mlp::glorot(w, Activation::kElu, Activation::kSigmoid, rng);
  std::vector<double> x(7);
  for (double& v : x) v = rng.uniform(-1.5, 1.5);
  const int label = 1;
  ForwardCache cache;
  const double p = mlp.forward(x, cache)[0];
  const LossAndGrad bce = bce_loss(p, label);
  std::vector<double> grad(mlp.parameter_count(), 0.0);
  std::vector<double> input_grad;
  mlp.backward(cache, std::span<const double>(&bce.grad, 1), grad, &input_grad);

  auto params = mlp.mutable_parameters();
  auto objective = [&] { return bce_loss(mlp.forward(x)[0], label).loss; };
  const GradCheckReport report = grad_check(objective, params, grad);
  EXPECT_EQ(report.checked, mlp.parameter_count());
  EXPECT_LT(report.max_relative_error, 1e-6);

  // Input gradient too.
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + 1e-6;
    const double plus = objective();
    x[i] = saved - 1e-6;
    const double minus = objective();
    x[i] = saved;
    EXPECT_NEAR(input_grad[i], (plus - minus) / 2e-6, 1e-7);
  }
}

TEST(Mlp, BackwardAccumulatesAndRejectsStaleCache) {
  Rng rng(9);
  const auto w = widths({3, 2, 1});
  Mlp mlp = Mlp::glorot(w, Activation::kElu, Activation::kSigmoid, rng);
  const std::vector<double> x = {0.3, -0.2, 0.9};
  ForwardCache cache;
  mlp.forward(x, cache);
  const double one = 1.0;
  std::vector<double> once(mlp.parameter_count(), 0.0);
  mlp.backward(cache, std::span<const double>(&one, 1), once);
  std::vector<double> twice(mlp.parameter_count(), 0.0);
  mlp.backward(cache, std::span<const double>(&one, 1), twice);
  mlp.backward(cache, std::span<const double>(&one, 1), twice);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_NEAR(twice[i], 2 * once[i], 1e-15);

  mlp.mutable_parameters()[0] += 0.1;
  EXPECT_THROW(mlp.backward(cache, std::span<const double>(&one, 1), once), ValidationError);
}

TEST(Mlp, GlorotRangeAndZeroBias) {
  Rng rng(1);
  const auto w = widths({155, 20, 1});
  const Mlp mlp = Mlp::glorot(w, Activation::kElu, Activation::kSigmoid, rng);
  const double limit = std::sqrt(6.0 / 175.0);
  for (double v : mlp.weights(0)) {
    EXPECT_LE(std::abs(v), limit);
  }
  for (double b : mlp.bias(0)) EXPECT_EQ(b, 0.0);
}

TEST(Mlp, SaveLoadIsExact) {
  Rng rng(2);
  const auto w = widths({6, 4, 1});
  const Mlp mlp = Mlp::glorot(w, Activation::kElu, Activation::kSigmoid, rng);
  std::stringstream s;
  mlp.save(s);
  const Mlp back = Mlp::load(s);
  EXPECT_TRUE(back == mlp);
  std::stringstream again;
  back.save(again);
  std::stringstream first;
  mlp.save(first);
  EXPECT_EQ(again.str(), first.str());
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Adam adam(2, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  std::vector<double> params = {1.0, -1.0};
  const std::vector<double> grads = {3.0, -0.5};
  adam.step(params, grads);
  // With bias correction the first update is lr * g / |g|.
  EXPECT_NEAR(params[0], 0.9, 1e-7);
  EXPECT_NEAR(params[1], -0.9, 1e-7);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, MinimizesAQuadratic) {
  Adam adam(1, AdamConfig{0.05, 0.9, 0.999, 1e-8});
  std::vector<double> x = {5.0};
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> g = {2.0 * (x[0] - 2.0)};
    adam.step(x, g);
  }
  EXPECT_NEAR(x[0], 2.0, 1e-3);
}

TEST(Adam, RejectsNonFiniteGradientWithoutTouchingParameters) {
  Adam adam(2, AdamConfig{});
  std::vector<double> params = {1.0, 2.0};
  const std::vector<double> grads = {0.1, std::nan("")};
  EXPECT_THROW(adam.step(params, grads), NumericError);
  EXPECT_EQ(params[0], 1.0);
  EXPECT_EQ(adam.steps(), 0u);
  EXPECT_THROW(adam.step(params, std::vector<double>{1.0}), ValidationError);
}

TEST(GradCheck, DetectsAWrongGradient) {
  std::vector<double> p = {1.0, 2.0};
  auto f = [&] { return p[0] * p[0] + 3.0 * p[1]; };
  const std::vector<double> right = {2.0, 3.0};
  EXPECT_LT(grad_check(f, p, right).max_relative_error, 1e-8);
  const std::vector<double> wrong = {2.0, 3.3};
  const GradCheckReport report = grad_check(f, p, wrong);
  EXPECT_GT(report.max_relative_error, 0.05);
  EXPECT_EQ(report.worst_index, 1u);
  EXPECT_EQ(p[0], 1.0);  // restored
}

TEST(GradCheck, RelativeErrorFloor) {
  EXPECT_EQ(relative_error(0.0, 0.0), 0.0);
  EXPECT_NEAR(relative_error(1.0, 1.1), 0.1 / 1.1, 1e-15);
}

TEST(SampleIndices, DistinctSortedInRange) {
  Rng rng(4);
  const auto idx = sample_indices(1000, 100, rng);
  ASSERT_EQ(idx.size(), 100u);
  for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_LT(idx[i - 1], idx[i]);
  EXPECT_LT(idx.back(), 1000u);
  EXPECT_EQ(sample_indices(5, 10, rng).size(), 5u);
}

}  // namespace
}  // namespace patentrec::nn
