#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wpgd/error.hpp"
#include "wpgd/nn/tensor.hpp"
#include "wpgd/random.hpp"

namespace wpgd {

enum class Activation { relu, tanh };

inline const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

inline Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw ValidationError("unknown activation '" + s + "' (expected relu or tanh)");
}

/// Architecture of a fully connected classifier: widths run from the input
/// dimension to the number of classes. Hidden layers use `activation`, the
/// output layer is linear and feeds a softmax.
struct MlpSpec {
  std::vector<std::size_t> layer_widths;
  Activation activation = Activation::relu;
  std::uint64_t seed = 0;

  std::size_t input_dim() const { return layer_widths.front(); }
  std::size_t num_classes() const { return layer_widths.back(); }
  std::size_t num_layers() const { return layer_widths.size() - 1; }

  void validate() const {
    if (layer_widths.size() < 2)
      throw ValidationError("mlp spec: need at least input and output widths");
    for (std::size_t w : layer_widths)
      if (w == 0) throw ValidationError("mlp spec: layer widths must be positive");
  }

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// All weights and biases in one flat buffer. Layer l stores an out x in
/// row-major weight block followed by its bias. Gradients share the layout.
class MlpParams {
 public:
  MlpParams() = default;

  /// All-zero parameters for `spec`.
  explicit MlpParams(MlpSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    std::size_t off = 0;
    for (std::size_t l = 0; l < spec_.num_layers(); ++l) {
      offsets_.push_back(off);
      off += spec_.layer_widths[l + 1] * (spec_.layer_widths[l] + 1);
    }
    flat_.assign(off, 0.0);
  }

  MlpParams(MlpSpec spec, std::vector<double> flat) : MlpParams(std::move(spec)) {
    if (flat.size() != flat_.size())
      throw DimensionError("mlp params: expected " + std::to_string(flat_.size()) +
                           " values, got " + std::to_string(flat.size()));
    flat_ = std::move(flat);
  }

  const MlpSpec& spec() const noexcept { return spec_; }
  std::size_t num_layers() const noexcept { return offsets_.size(); }
  std::size_t layer_in(std::size_t l) const { return spec_.layer_widths[l]; }
  std::size_t layer_out(std::size_t l) const { return spec_.layer_widths[l + 1]; }

  std::span<double> weights(std::size_t l) {
    return {flat_.data() + offsets_[l], layer_out(l) * layer_in(l)};
  }
  std::span<const double> weights(std::size_t l) const {
    return {flat_.data() + offsets_[l], layer_out(l) * layer_in(l)};
  }
  std::span<double> bias(std::size_t l) {
    return {flat_.data() + offsets_[l] + layer_out(l) * layer_in(l), layer_out(l)};
  }
  std::span<const double> bias(std::size_t l) const {
    return {flat_.data() + offsets_[l] + layer_out(l) * layer_in(l), layer_out(l)};
  }

  std::span<double> flat() noexcept { return flat_; }
  std::span<const double> flat() const noexcept { return flat_; }
  std::size_t size() const noexcept { return flat_.size(); }

  bool same_layout(const MlpParams& o) const { return spec_.layer_widths == o.spec_.layer_widths; }

  friend bool operator==(const MlpParams&, const MlpParams&) = default;

 private:
  MlpSpec spec_;
  std::vector<std::size_t> offsets_;
  std::vector<double> flat_;
};

/// Glorot-uniform weights, a = sqrt(6 / (fan_in + fan_out)), zero biases.
inline MlpParams init_params(const MlpSpec& spec) {
  MlpParams params(spec);
  Rng rng = make_rng(spec.seed, 0x1417);
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    const double a =
        std::sqrt(6.0 / static_cast<double>(params.layer_in(l) + params.layer_out(l)));
    for (double& w : params.weights(l)) w = uniform(rng, -a, a);
  }
  return params;
}

struct Prediction {
  std::vector<double> logits;
  std::vector<double> probs;
  std::size_t predicted_class = 0;

  std::size_t num_classes() const noexcept { return probs.size(); }
};

/// Max-subtracted softmax; argmax ties go to the lowest index.
inline Prediction make_prediction(std::vector<double> logits) {
  Prediction p;
  p.logits = std::move(logits);
  const double mx = *std::max_element(p.logits.begin(), p.logits.end());
  p.probs.resize(p.logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < p.logits.size(); ++k) {
    p.probs[k] = std::exp(p.logits[k] - mx);
    sum += p.probs[k];
  }
  for (double& v : p.probs) v /= sum;
  p.predicted_class = static_cast<std::size_t>(
      std::max_element(p.probs.begin(), p.probs.end()) - p.probs.begin());
  return p;
}

/// Activations recorded by forward() for one input.
struct ForwardTrace {
  const MlpParams* source = nullptr;
  std::vector<std::size_t> input_shape;
  // layer_inputs[l] is the input to layer l; layer_inputs[0] is the network input.
  std::vector<std::vector<double>> layer_inputs;
  // Pre-activations of each hidden layer.
  std::vector<std::vector<double>> pre_activations;
};

struct ForwardResult {
  Prediction prediction;
  ForwardTrace trace;
};

struct Gradients {
  MlpParams params;
  Tensor input;
};

namespace detail {

inline double dot(const double* a, const double* b, std::size_t n) {
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

inline double activate(Activation act, double z) {
  return act == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

inline double activate_derivative(Activation act, double z) {
  if (act == Activation::relu) return z > 0.0 ? 1.0 : 0.0;
  const double t = std::tanh(z);
  return 1.0 - t * t;
}

inline void check_input(const MlpParams& params, std::span<const double> input) {
  if (params.size() == 0) throw UsageError("mlp: parameters are not initialized");
  if (input.size() != params.spec().input_dim())
    throw DimensionError("mlp: input has " + std::to_string(input.size()) +
                         " values, network expects " +
                         std::to_string(params.spec().input_dim()));
}

template <bool Record>
std::vector<double> run_layers(const MlpParams& params, std::span<const double> input,
                               ForwardTrace* trace) {
  check_input(params, input);
  const Activation act = params.spec().activation;
  std::vector<double> cur(input.begin(), input.end());
  const std::size_t layers = params.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = params.layer_in(l), out = params.layer_out(l);
    const auto w = params.weights(l);
    const auto b = params.bias(l);
    std::vector<double> z(out);
    for (std::size_t o = 0; o < out; ++o) z[o] = b[o] + dot(w.data() + o * in, cur.data(), in);
    if constexpr (Record) trace->layer_inputs.push_back(std::move(cur));
    if (l + 1 == layers) return z;
    std::vector<double> a(out);
    for (std::size_t o = 0; o < out; ++o) a[o] = activate(act, z[o]);
    if constexpr (Record) trace->pre_activations.push_back(std::move(z));
    cur = std::move(a);
  }
  return cur;  // unreachable: num_layers() >= 1
}

inline Prediction checked_prediction(std::vector<double> logits) {
  for (double v : logits)
    if (!std::isfinite(v)) throw NumericError("mlp: non-finite logit");
  return make_prediction(std::move(logits));
}

}  // namespace detail

/// Prediction only, no trace.
inline Prediction predict(const MlpParams& params, std::span<const double> input) {
  return detail::checked_prediction(detail::run_layers<false>(params, input, nullptr));
}
inline Prediction predict(const MlpParams& params, const Tensor& input) {
  return predict(params, input.values());
}

inline ForwardResult forward(const MlpParams& params, const Tensor& input) {
  ForwardResult r;
  r.trace.source = &params;
  r.trace.input_shape = input.shape();
  r.prediction = detail::checked_prediction(detail::run_layers<true>(params, input.values(), &r.trace));
  return r;
}

/// Reverse pass for a scalar loss whose gradient w.r.t. the logits is
/// `upstream`. Parameter gradients are added into `param_grad` when it is
/// non-null; the input gradient is returned when `want_input` is set.
/// The trace must come from forward() on this very `params` object.
inline std::vector<double> backprop_into(const MlpParams& params, const ForwardTrace& trace,
                                         std::span<const double> upstream,
                                         MlpParams* param_grad, bool want_input) {
  const std::size_t layers = params.num_layers();
  if (trace.source != &params)
    throw UsageError("backprop: trace was produced by a different parameter object");
  if (trace.layer_inputs.size() != layers || trace.pre_activations.size() + 1 != layers)
    throw UsageError("backprop: trace does not match network depth");
  for (std::size_t l = 0; l < layers; ++l)
    if (trace.layer_inputs[l].size() != params.layer_in(l))
      throw UsageError("backprop: trace does not match layer widths");
  if (upstream.size() != params.spec().num_classes())
    throw DimensionError("backprop: upstream gradient has wrong length");
  if (param_grad && !param_grad->same_layout(params))
    throw DimensionError("backprop: gradient buffer layout differs from parameters");

  const Activation act = params.spec().activation;
  std::vector<double> delta(upstream.begin(), upstream.end());
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = params.layer_in(l), out = params.layer_out(l);
    const auto& x = trace.layer_inputs[l];
    const auto w = params.weights(l);
    if (param_grad) {
      auto gw = param_grad->weights(l);
      auto gb = param_grad->bias(l);
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[o];
        gb[o] += d;
        if (d == 0.0) continue;
        double* row = gw.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) row[i] += d * x[i];
      }
    }
    if (l == 0 && !want_input) return {};
    std::vector<double> prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += d * row[i];
    }
    if (l > 0) {
      const auto& z = trace.pre_activations[l - 1];
      for (std::size_t i = 0; i < in; ++i) prev[i] *= detail::activate_derivative(act, z[i]);
    }
    delta = std::move(prev);
  }
  return delta;
}

/// Parameter and input gradients in one pass.
inline Gradients backprop(const MlpParams& params, const ForwardTrace& trace,
                          std::span<const double> upstream) {
  Gradients g{MlpParams(params.spec()), Tensor()};
  auto input_grad = backprop_into(params, trace, upstream, &g.params, true);
  g.input = Tensor(trace.input_shape, std::move(input_grad));
  return g;
}

/// Input gradient only; skips the parameter-gradient work.
inline Tensor input_gradient(const MlpParams& params, const ForwardTrace& trace,
                             std::span<const double> upstream) {
  return Tensor(trace.input_shape, backprop_into(params, trace, upstream, nullptr, true));
}

}  // namespace wpgd
