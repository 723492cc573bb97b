#include "patentrec/nn.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace patentrec::nn {
namespace {

// Four independent partial sums keep the adds pipelined; the summation
// order is fixed, so results stay reproducible.
double dot_product(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

double elu(double x) { return x >= 0.0 ? x : std::expm1(x); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double activate(Activation act, double x) {
  switch (act) {
    case Activation::kElu:
      return elu(x);
    case Activation::kSigmoid:
      return sigmoid(x);
    case Activation::kIdentity:
      break;
  }
  return x;
}

double activation_grad(Activation act, double z, double y) {
  switch (act) {
    case Activation::kElu:
      return z >= 0.0 ? 1.0 : y + 1.0;
    case Activation::kSigmoid:
      return y * (1.0 - y);
    case Activation::kIdentity:
      break;
  }
  return 1.0;
}

const char* activation_name(Activation act) {
  switch (act) {
    case Activation::kElu:
      return "elu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kIdentity:
      break;
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "elu") return Activation::kElu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "identity") return Activation::kIdentity;
  throw ArtifactError("unknown activation " + std::string(name));
}

Mlp::Mlp(std::span<const std::size_t> widths, Activation hidden, Activation output) {
  if (widths.size() < 2) throw ValidationError("an MLP needs at least input and output widths");
  std::size_t offset = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    if (widths[i] == 0 || widths[i + 1] == 0) throw ValidationError("layer widths must be positive");
    DenseLayer layer;
    layer.in = widths[i];
    layer.out = widths[i + 1];
    layer.activation = i + 2 == widths.size() ? output : hidden;
    layer.offset = offset;
    offset += layer.parameter_count();
    layers_.push_back(layer);
  }
  params_.assign(offset, 0.0);
}

Mlp Mlp::glorot(std::span<const std::size_t> widths, Activation hidden, Activation output,
                Rng& rng) {
  Mlp mlp(widths, hidden, output);
  for (std::size_t l = 0; l < mlp.layers_.size(); ++l) {
    const auto& layer = mlp.layers_[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    for (double& w : mlp.mutable_weights(l)) w = rng.uniform(-limit, limit);
  }
  return mlp;
}

std::span<const double> Mlp::weights(std::size_t layer) const {
  const auto& l = layers_.at(layer);
  return std::span<const double>(params_).subspan(l.offset, l.weight_count());
}

std::span<const double> Mlp::bias(std::size_t layer) const {
  const auto& l = layers_.at(layer);
  return std::span<const double>(params_).subspan(l.offset + l.weight_count(), l.out);
}

std::span<double> Mlp::mutable_weights(std::size_t layer) {
  const auto& l = layers_.at(layer);
  ++generation_;
  return std::span<double>(params_).subspan(l.offset, l.weight_count());
}

std::span<double> Mlp::mutable_bias(std::size_t layer) {
  const auto& l = layers_.at(layer);
  ++generation_;
  return std::span<double>(params_).subspan(l.offset + l.weight_count(), l.out);
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  ForwardCache cache;
  return forward(x, cache);
}

std::vector<double> Mlp::forward(std::span<const double> x, ForwardCache& cache) const {
  if (layers_.empty()) throw ValidationError("forward through an empty MLP");
  if (x.size() != input_size()) {
    throw ValidationError("MLP input has " + std::to_string(x.size()) + " values, expected " +
                          std::to_string(input_size()));
  }
  cache.owner = this;
  cache.generation = generation_;
  cache.inputs.resize(layers_.size());
  cache.pre.resize(layers_.size());
  cache.inputs[0].assign(x.begin(), x.end());

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    const double* w = params_.data() + layer.offset;
    const double* b = w + layer.weight_count();
    const std::vector<double>& input = cache.inputs[l];
    std::vector<double>& z = cache.pre[l];
    std::vector<double>& y = l + 1 < layers_.size() ? cache.inputs[l + 1] : cache.output;
    z.resize(layer.out);
    y.resize(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double sum = b[o] + dot_product(w + o * layer.in, input.data(), layer.in);
      z[o] = sum;
      y[o] = activate(layer.activation, sum);
    }
  }
  return cache.output;
}

void Mlp::backward(const ForwardCache& cache, std::span<const double> output_grad,
                   std::span<double> param_grad, std::vector<double>* input_grad) const {
  if (cache.owner != this || cache.generation != generation_ ||
      cache.inputs.size() != layers_.size()) {
    throw ValidationError("stale or mismatched forward cache");
  }
  if (output_grad.size() != output_size()) throw ValidationError("output gradient size mismatch");
  if (param_grad.size() != params_.size()) throw ValidationError("parameter gradient size mismatch");

  std::vector<double>& upstream = cache.upstream;
  std::vector<double>& down = cache.down;
  upstream.assign(output_grad.begin(), output_grad.end());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    const auto& input = cache.inputs[l];
    const auto& z = cache.pre[l];
    const auto& y = l + 1 < layers_.size() ? cache.inputs[l + 1] : cache.output;

    const double* w = params_.data() + layer.offset;
    double* gw = param_grad.data() + layer.offset;
    double* gb = gw + layer.weight_count();
    // The input gradient of the first layer is only needed on request.
    const bool propagate = l > 0 || input_grad != nullptr;
    down.assign(propagate ? layer.in : 0, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double d = upstream[o] * activation_grad(layer.activation, z[o], y[o]);
      gb[o] += d;
      if (d == 0.0) continue;
      const double* row = w + o * layer.in;
      double* grow = gw + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) grow[i] += d * input[i];
      if (propagate) {
        for (std::size_t i = 0; i < layer.in; ++i) down[i] += d * row[i];
      }
    }
    std::swap(upstream, down);
  }
  if (input_grad != nullptr) *input_grad = upstream;
}

MlpGradients Mlp::backward(const ForwardCache& cache, std::span<const double> output_grad) const {
  MlpGradients grads;
  grads.params.assign(params_.size(), 0.0);
  backward(cache, output_grad, grads.params, &grads.input);
  return grads;
}

void Mlp::save(std::ostream& out) const {
  ArtifactHeader header{"mlp", 1, {}};
  header.fields["layers"] = std::to_string(layers_.size());
  write_header(out, header);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    out << "layer " << layer.in << ' ' << layer.out << ' ' << activation_name(layer.activation)
        << '\n';
    for (std::size_t o = 0; o < layer.out; ++o) {
      auto row = weights(l).subspan(o * layer.in, layer.in);
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << format_hex(row[i]);
      out << '\n';
    }
    auto b = bias(l);
    for (std::size_t o = 0; o < b.size(); ++o) out << (o ? " " : "") << format_hex(b[o]);
    out << '\n';
  }
}

Mlp Mlp::load(std::istream& in) {
  ArtifactHeader header = read_header(in, "mlp", 1);
  const std::size_t n_layers = std::stoull(header.at("layers"));
  std::vector<DenseLayer> layers;
  std::vector<std::vector<double>> blocks;
  std::string line;
  auto read_values = [&](std::size_t expected) {
    if (!std::getline(in, line)) throw ArtifactError("truncated mlp artifact");
    auto parts = split_whitespace(line);
    if (parts.size() != expected) throw ArtifactError("mlp row has the wrong width");
    std::vector<double> values;
    for (auto p : parts) values.push_back(parse_hex(p));
    return values;
  };
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (!std::getline(in, line)) throw ArtifactError("truncated mlp artifact");
    auto parts = split_whitespace(line);
    if (parts.size() != 4 || parts[0] != "layer") throw ArtifactError("malformed mlp layer line");
    DenseLayer layer;
    layer.in = std::stoull(std::string(parts[1]));
    layer.out = std::stoull(std::string(parts[2]));
    layer.activation = parse_activation(parts[3]);
    std::vector<double> block;
    for (std::size_t o = 0; o < layer.out; ++o) {
      auto row = read_values(layer.in);
      block.insert(block.end(), row.begin(), row.end());
    }
    auto b = read_values(layer.out);
    block.insert(block.end(), b.begin(), b.end());
    layers.push_back(layer);
    blocks.push_back(std::move(block));
  }
  if (layers.empty()) throw ArtifactError("mlp artifact has no layers");
  std::vector<std::size_t> widths{layers.front().in};
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (l > 0 && layers[l].in != layers[l - 1].out) throw ArtifactError("mlp layers do not chain");
    widths.push_back(layers[l].out);
  }
  Mlp mlp(widths, Activation::kIdentity, Activation::kIdentity);
  auto params = mlp.mutable_parameters();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    mlp.layers_[l].activation = layers[l].activation;
    std::copy(blocks[l].begin(), blocks[l].end(), params.begin() + mlp.layers_[l].offset);
  }
  return mlp;
}

bool Mlp::operator==(const Mlp& other) const {
  if (layers_.size() != other.layers_.size() || params_ != other.params_) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].in != other.layers_[l].in || layers_[l].out != other.layers_[l].out ||
        layers_[l].activation != other.layers_[l].activation) {
      return false;
    }
  }
  return true;
}

Adam::Adam(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ValidationError("adam: parameter/gradient shape mismatch");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericError("adam: non-finite gradient at parameter " + std::to_string(i));
    }
  }
  ++step_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

LossAndGrad bce_loss(double p, int y) {
  const double q = std::clamp(p, kBceClamp, 1.0 - kBceClamp);
  if (y == 1) return {-std::log(q), -1.0 / q};
  return {-std::log1p(-q), 1.0 / (1.0 - q)};
}

TripletLoss triplet_hinge(double sim_pos, double sim_neg, double margin) {
  const double value = margin + sim_neg - sim_pos;
  if (value > 0.0) return {value, -1.0, 1.0};
  return {0.0, 0.0, 0.0};
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const std::function<double()>& objective, std::span<double> params,
                           std::span<const double> analytic, const GradCheckOptions& options) {
  if (analytic.size() != params.size()) throw ValidationError("grad_check: size mismatch");
  std::vector<std::size_t> indices = options.indices;
  if (indices.empty()) {
    indices.resize(params.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  }
  GradCheckReport report;
  for (std::size_t index : indices) {
    const double saved = params[index];
    params[index] = saved + options.step;
    const double plus = objective();
    params[index] = saved - options.step;
    const double minus = objective();
    params[index] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw NumericError("grad_check: non-finite objective at parameter " + std::to_string(index));
    }
    const double numeric = (plus - minus) / (2.0 * options.step);
    const double err = relative_error(analytic[index], numeric);
    if (report.checked == 0 || err > report.max_relative_error) {
      report.max_relative_error = err;
      report.worst_index = index;
    }
    ++report.checked;
  }
  return report;
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, Rng& rng) {
  if (count >= n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  std::set<std::size_t> picked;
  while (picked.size() < count) picked.insert(rng.uniform_index(n));
  return {picked.begin(), picked.end()};
}

}  // namespace patentrec::nn
