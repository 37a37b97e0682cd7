// Minimal dense-network substrate: Mlp forward/backprop, Adam, and a
// central-finite-difference gradient checker. Everything is double precision
// so the finite-difference comparisons stay tight.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "paratone/error.hpp"
#include "paratone/rng.hpp"

namespace paratone {

enum class Activation { Identity, Tanh, Relu };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
  }
  return "?";
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "identity") return Activation::Identity;
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  raise(ErrorCode::UnknownAttribute, "unknown activation: " + s);
}

struct Layer {
  std::size_t in = 0, out = 0;
  std::vector<double> w;  // row-major [out x in]
  std::vector<double> b;  // [out]
  Activation act = Activation::Identity;
};

struct Mlp {
  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in; }
  std::size_t output_dim() const {
    return layers.empty() ? 0 : layers.back().out;
  }

  std::size_t num_params() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
  }

  std::vector<double> flatten_params() const {
    std::vector<double> out;
    out.reserve(num_params());
    for (const auto& l : layers) {
      out.insert(out.end(), l.w.begin(), l.w.end());
      out.insert(out.end(), l.b.begin(), l.b.end());
    }
    return out;
  }

  void set_params(const std::vector<double>& flat) {
    if (flat.size() != num_params()) {
      raise(ErrorCode::DimensionMismatch, "flat parameter size mismatch");
    }
    std::size_t pos = 0;
    for (auto& l : layers) {
      std::copy(flat.begin() + pos, flat.begin() + pos + l.w.size(),
                l.w.begin());
      pos += l.w.size();
      std::copy(flat.begin() + pos, flat.begin() + pos + l.b.size(),
                l.b.begin());
      pos += l.b.size();
    }
  }
};

// Glorot-uniform weights, zero biases.
inline Mlp make_mlp(const std::vector<std::size_t>& dims,
                    const std::vector<Activation>& acts, Rng& rng) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1) {
    raise(ErrorCode::DimensionMismatch, "dims/acts size mismatch");
  }
  Mlp m;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    Layer l;
    l.in = dims[i];
    l.out = dims[i + 1];
    l.act = acts[i];
    const double bound =
        std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    l.w.resize(l.in * l.out);
    for (auto& w : l.w) w = rng.uniform(-bound, bound);
    l.b.assign(l.out, 0.0);
    m.layers.push_back(std::move(l));
  }
  return m;
}

struct ForwardCache {
  std::vector<std::vector<double>> inputs;   // input to each layer
  std::vector<std::vector<double>> preacts;  // Wx + b per layer
};

inline double apply_activation(Activation a, double x) {
  switch (a) {
    case Activation::Identity: return x;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Relu: return x > 0.0 ? x : 0.0;
  }
  return x;
}

inline double activation_grad(Activation a, double pre) {
  switch (a) {
    case Activation::Identity: return 1.0;
    case Activation::Tanh: {
      const double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

inline std::vector<double> forward(const Mlp& m, std::vector<double> x,
                                   ForwardCache* cache = nullptr) {
  if (m.layers.empty() || x.size() != m.input_dim()) {
    raise(ErrorCode::DimensionMismatch, "input length != first layer in-dim");
  }
  if (cache) {
    cache->inputs.clear();
    cache->preacts.clear();
  }
  for (const auto& l : m.layers) {
    if (cache) cache->inputs.push_back(x);
    std::vector<double> pre(l.out);
    for (std::size_t o = 0; o < l.out; ++o) {
      double acc = l.b[o];
      const double* row = l.w.data() + o * l.in;
      for (std::size_t i = 0; i < l.in; ++i) acc += row[i] * x[i];
      pre[o] = acc;
    }
    if (cache) cache->preacts.push_back(pre);
    x.resize(l.out);
    for (std::size_t o = 0; o < l.out; ++o) {
      x[o] = apply_activation(l.act, pre[o]);
    }
  }
  return x;
}

struct Gradients {
  std::vector<std::vector<double>> dw;  // per layer, row-major
  std::vector<std::vector<double>> db;
  std::vector<double> dinput;

  static Gradients zeros_like(const Mlp& m) {
    Gradients g;
    for (const auto& l : m.layers) {
      g.dw.emplace_back(l.w.size(), 0.0);
      g.db.emplace_back(l.b.size(), 0.0);
    }
    g.dinput.assign(m.input_dim(), 0.0);
    return g;
  }

  void accumulate(const Gradients& other) {
    for (std::size_t l = 0; l < dw.size(); ++l) {
      for (std::size_t i = 0; i < dw[l].size(); ++i) dw[l][i] += other.dw[l][i];
      for (std::size_t i = 0; i < db[l].size(); ++i) db[l][i] += other.db[l][i];
    }
  }

  void scale(double s) {
    for (auto& layer : dw)
      for (auto& v : layer) v *= s;
    for (auto& layer : db)
      for (auto& v : layer) v *= s;
    for (auto& v : dinput) v *= s;
  }

  std::vector<double> flatten() const {
    std::vector<double> out;
    for (std::size_t l = 0; l < dw.size(); ++l) {
      out.insert(out.end(), dw[l].begin(), dw[l].end());
      out.insert(out.end(), db[l].begin(), db[l].end());
    }
    return out;
  }
};

// Exact reverse-mode gradients of forward(). `d_output` is dLoss/dOutput.
inline Gradients backprop(const Mlp& m, const ForwardCache& cache,
                          const std::vector<double>& d_output) {
  if (cache.inputs.size() != m.layers.size() ||
      d_output.size() != m.output_dim()) {
    raise(ErrorCode::DimensionMismatch, "cache/gradient shape mismatch");
  }
  Gradients g = Gradients::zeros_like(m);
  std::vector<double> delta = d_output;
  for (std::size_t li = m.layers.size(); li-- > 0;) {
    const Layer& l = m.layers[li];
    const auto& pre = cache.preacts[li];
    const auto& in = cache.inputs[li];
    // delta through the activation
    for (std::size_t o = 0; o < l.out; ++o) {
      delta[o] *= activation_grad(l.act, pre[o]);
    }
    for (std::size_t o = 0; o < l.out; ++o) {
      g.db[li][o] = delta[o];
      double* wrow = g.dw[li].data() + o * l.in;
      for (std::size_t i = 0; i < l.in; ++i) wrow[i] = delta[o] * in[i];
    }
    std::vector<double> prev(l.in, 0.0);
    for (std::size_t o = 0; o < l.out; ++o) {
      const double* row = l.w.data() + o * l.in;
      for (std::size_t i = 0; i < l.in; ++i) prev[i] += delta[o] * row[i];
    }
    delta = std::move(prev);
  }
  g.dinput = delta;
  return g;
}

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long step = 0;
  AdamConfig cfg;

  explicit AdamState(std::size_t n = 0, AdamConfig c = {})
      : m(n, 0.0), v(n, 0.0), cfg(c) {}
};

inline void adam_step(AdamState& state, std::vector<double>& params,
                      const std::vector<double>& grads) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    raise(ErrorCode::DimensionMismatch, "adam shapes mismatch");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) {
      raise(ErrorCode::NonFiniteGradient, "non-finite gradient");
    }
  }
  state.step += 1;
  const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= state.cfg.lr * mhat / (std::sqrt(vhat) + state.cfg.eps);
  }
}

// Convenience wrapper: one Adam step over a whole Mlp.
struct MlpOptimizer {
  AdamState state;

  MlpOptimizer() = default;
  MlpOptimizer(const Mlp& m, AdamConfig cfg)
      : state(m.num_params(), cfg) {}

  void step(Mlp& m, const Gradients& g) {
    std::vector<double> params = m.flatten_params();
    adam_step(state, params, g.flatten());
    m.set_params(params);
  }
};

// Central finite differences over every parameter; returns the max relative
// error against the analytic gradient. Entries where both gradients are
// below 1e-7 are treated as zero.
inline double grad_check(Mlp model,
                         const std::function<double(const Mlp&)>& loss,
                         const std::vector<double>& analytic_grad,
                         double eps = 1e-5) {
  std::vector<double> params = model.flatten_params();
  if (analytic_grad.size() != params.size()) {
    raise(ErrorCode::DimensionMismatch, "gradient size mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + eps;
    model.set_params(params);
    const double up = loss(model);
    params[i] = saved - eps;
    model.set_params(params);
    const double down = loss(model);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double a = analytic_grad[i];
    const double scale = std::max(std::abs(a), std::abs(numeric));
    if (scale < 1e-7) continue;
    worst = std::max(worst, std::abs(a - numeric) / scale);
  }
  model.set_params(params);
  return worst;
}

inline nlohmann::json mlp_to_json(const Mlp& m) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : m.layers) {
    nlohmann::json lj;
    lj["in"] = l.in;
    lj["out"] = l.out;
    lj["activation"] = activation_name(l.act);
    lj["w"] = l.w;
    lj["b"] = l.b;
    layers.push_back(lj);
  }
  return nlohmann::json{{"layers", layers}};
}

inline Mlp mlp_from_json(const nlohmann::json& j) {
  Mlp m;
  for (const auto& lj : j.at("layers")) {
    Layer l;
    l.in = lj.at("in").get<std::size_t>();
    l.out = lj.at("out").get<std::size_t>();
    l.act = activation_from_name(lj.at("activation").get<std::string>());
    l.w = lj.at("w").get<std::vector<double>>();
    l.b = lj.at("b").get<std::vector<double>>();
    if (l.w.size() != l.in * l.out || l.b.size() != l.out) {
      raise(ErrorCode::DimensionMismatch, "checkpoint layer shape mismatch");
    }
    m.layers.push_back(std::move(l));
  }
  return m;
}

}  // namespace paratone
