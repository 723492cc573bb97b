#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "patentrec/common.hpp"

namespace patentrec::nn {

enum class Activation { kIdentity, kElu, kSigmoid };

double elu(double x);
double sigmoid(double x);
// Derivatives expressed through the pre-activation `z` and output `y`.
double activation_grad(Activation act, double z, double y);
double activate(Activation act, double x);
const char* activation_name(Activation act);
Activation parse_activation(std::string_view name);

// One affine layer; weights are row-major [out x in] and live at
// `offset` inside the owning Mlp's flat parameter vector, followed by bias.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::kIdentity;
  std::size_t offset = 0;

  std::size_t weight_count() const { return in * out; }
  std::size_t parameter_count() const { return in * out + out; }
};

class Mlp;

// Per-layer inputs and pre-activations from one forward pass.
struct ForwardCache {
  const Mlp* owner = nullptr;
  std::uint64_t generation = 0;
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;
  std::vector<double> output;
  // backward scratch
  mutable std::vector<double> upstream;
  mutable std::vector<double> down;
};

struct MlpGradients {
  std::vector<double> params;
  std::vector<double> input;
};

class Mlp {
 public:
  Mlp() = default;
  // Zero-initialized layers of the given widths.
  Mlp(std::span<const std::size_t> widths, Activation hidden, Activation output);

  // Uniform Glorot initialization, zero biases.
  static Mlp glorot(std::span<const std::size_t> widths, Activation hidden, Activation output,
                    Rng& rng);

  std::size_t input_size() const { return layers_.empty() ? 0 : layers_.front().in; }
  std::size_t output_size() const { return layers_.empty() ? 0 : layers_.back().out; }
  std::size_t parameter_count() const { return params_.size(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::span<const double> parameters() const { return params_; }
  // Mutable access invalidates forward caches taken before it.
  std::span<double> mutable_parameters() {
    ++generation_;
    return params_;
  }

  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> bias(std::size_t layer) const;
  std::span<double> mutable_weights(std::size_t layer);
  std::span<double> mutable_bias(std::size_t layer);

  std::vector<double> forward(std::span<const double> x) const;
  std::vector<double> forward(std::span<const double> x, ForwardCache& cache) const;

  // Accumulates parameter gradients into `param_grad` (size parameter_count())
  // and optionally writes the input gradient.
  void backward(const ForwardCache& cache, std::span<const double> output_grad,
                std::span<double> param_grad, std::vector<double>* input_grad = nullptr) const;
  MlpGradients backward(const ForwardCache& cache, std::span<const double> output_grad) const;

  void save(std::ostream& out) const;
  static Mlp load(std::istream& in);

  bool operator==(const Mlp& other) const;

 private:
  std::vector<DenseLayer> layers_;
  std::vector<double> params_;
  std::uint64_t generation_ = 0;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction over one flat parameter vector.
class Adam {
 public:
  Adam(std::size_t parameter_count, AdamConfig config);

  // Throws NumericError on a non-finite gradient; parameters are untouched then.
  void step(std::span<double> params, std::span<const double> grads);

  std::uint64_t steps() const { return step_; }
  const AdamConfig& config() const { return config_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t step_ = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  double grad = 0.0;
};

inline constexpr double kBceClamp = 1e-7;

// Binary cross-entropy on a probability clamped to [1e-7, 1 - 1e-7].
LossAndGrad bce_loss(double p, int y);

struct TripletLoss {
  double loss = 0.0;
  double d_pos = 0.0;
  double d_neg = 0.0;
};

// max(margin + sim_neg - sim_pos, 0); the subgradient at the kink is zero.
TripletLoss triplet_hinge(double sim_pos, double sim_neg, double margin);

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

struct GradCheckOptions {
  double step = 1e-5;
  // Parameters to probe; empty means all of them.
  std::vector<std::size_t> indices;
};

// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

// Central differences of `objective` (evaluated on the current contents of
// `params`) against `analytic`. Parameters are restored afterwards.
GradCheckReport grad_check(const std::function<double()>& objective, std::span<double> params,
                           std::span<const double> analytic, const GradCheckOptions& options = {});

// `count` distinct indices drawn uniformly from [0, n), sorted.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, Rng& rng);

}  // namespace patentrec::nn
