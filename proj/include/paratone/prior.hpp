// Conditional score-based prior over emotion embeddings: denoising score
// matching against the closed-form Gaussian transition, and deterministic
// probability-flow sampling
//   X_{t-h} = X_t - h * 1/2 beta_t (L^-1 (mu - X_t) - s_theta(X_t, t, z)).
// Conditioning is by input concatenation: [x_t | time embedding | z].
#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "paratone/error.hpp"
#include "paratone/nn.hpp"
#include "paratone/rng.hpp"
#include "paratone/sde.hpp"

namespace paratone {

inline constexpr std::size_t kTimeEmbedDim = 8;

// Four sin/cos pairs at geometric frequencies; t lives in [0, 1].
inline std::vector<double> time_embedding(double t) {
  std::vector<double> emb(kTimeEmbedDim);
  double omega = 2.0 * 3.141592653589793238462643383279502884;
  for (std::size_t k = 0; k < kTimeEmbedDim / 2; ++k) {
    emb[2 * k] = std::sin(omega * t);
    emb[2 * k + 1] = std::cos(omega * t);
    omega *= 4.0;
  }
  return emb;
}

struct ScoreModel {
  Mlp network;  // [dim + kTimeEmbedDim + dim] -> dim
  std::size_t dim = 0;
};

inline ScoreModel make_score_model(std::size_t dim, Rng& rng,
                                   std::size_t hidden = 128) {
  ScoreModel m;
  m.dim = dim;
  m.network = make_mlp(
      {dim + kTimeEmbedDim + dim, hidden, hidden, hidden, dim},
      {Activation::Tanh, Activation::Tanh, Activation::Tanh,
       Activation::Identity},
      rng);
  return m;
}

inline std::vector<double> score_input(const std::vector<double>& x, double t,
                                       const std::vector<double>& z) {
  std::vector<double> in;
  in.reserve(x.size() + kTimeEmbedDim + z.size());
  in.insert(in.end(), x.begin(), x.end());
  const std::vector<double> temb = time_embedding(t);
  in.insert(in.end(), temb.begin(), temb.end());
  in.insert(in.end(), z.begin(), z.end());
  return in;
}

inline std::vector<double> score_eval(const ScoreModel& m,
                                      const std::vector<double>& x, double t,
                                      const std::vector<double>& z) {
  return forward(m.network, score_input(x, t, z));
}

struct DsmBatchItem {
  std::vector<double> y;  // clean target embedding
  std::vector<double> z;  // caption conditioning embedding
};

struct DsmResult {
  double loss = 0.0;
  Gradients grads;  // w.r.t. score network parameters
};

// Variance-weighted denoising score matching. For each item: t ~ U(eps_t, T),
// x_t from the exact transition, regression target (mean - x_t)/var, and the
// per-item contribution sum_i var_i (s_i - target_i)^2, averaged over the
// batch. With this weighting a zero network scores E||noise||^2 = dim.
inline DsmResult dsm_loss_grad(const ScoreModel& model,
                               const std::vector<DsmBatchItem>& batch,
                               const SdeConfig& cfg, Rng& rng,
                               bool want_grads = true) {
  if (batch.empty()) raise(ErrorCode::InsufficientData, "empty dsm batch");
  cfg.validate();
  DsmResult res;
  res.grads = Gradients::zeros_like(model.network);
  for (const auto& item : batch) {
    if (item.y.size() != cfg.dim()) {
      raise(ErrorCode::DimensionMismatch, "target dim mismatch");
    }
    const double t = rng.uniform(cfg.eps_t, cfg.t_max);
    const GaussianMoments m = forward_marginal(item.y, t, cfg);
    std::vector<double> x(cfg.dim());
    std::vector<double> target(cfg.dim());
    for (std::size_t i = 0; i < cfg.dim(); ++i) {
      const double noise = rng.normal();
      const double sigma = std::sqrt(m.variance[i]);
      x[i] = m.mean[i] + sigma * noise;
      target[i] = m.variance[i] > 0.0 ? (m.mean[i] - x[i]) / m.variance[i]
                                      : 0.0;
    }
    ForwardCache cache;
    const std::vector<double> s =
        forward(model.network, score_input(x, t, item.z), &cache);
    std::vector<double> d_out(cfg.dim());
    for (std::size_t i = 0; i < cfg.dim(); ++i) {
      const double err = s[i] - target[i];
      res.loss += m.variance[i] * err * err;
      d_out[i] = 2.0 * m.variance[i] * err / static_cast<double>(batch.size());
    }
    if (want_grads) {
      res.grads.accumulate(backprop(model.network, cache, d_out));
    }
  }
  res.loss /= static_cast<double>(batch.size());
  if (!std::isfinite(res.loss)) {
    raise(ErrorCode::NonFiniteLoss, "dsm loss not finite");
  }
  return res;
}

inline double dsm_loss(const ScoreModel& model,
                       const std::vector<DsmBatchItem>& batch,
                       const SdeConfig& cfg, Rng& rng) {
  return dsm_loss_grad(model, batch, cfg, rng, false).loss;
}

struct PriorTrainConfig {
  int epochs = 60;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

struct PriorTrainResult {
  ScoreModel model;
  std::vector<double> epoch_losses;
};

inline PriorTrainResult train_prior(const std::vector<DsmBatchItem>& pairs,
                                    const PriorTrainConfig& cfg,
                                    const SdeConfig& sde) {
  if (pairs.size() < 200) {
    raise(ErrorCode::InsufficientData, "prior needs >= 200 pairs");
  }
  Rng rng(cfg.seed);
  PriorTrainResult result;
  result.model = make_score_model(sde.dim(), rng);
  MlpOptimizer opt(result.model.network, {cfg.lr});

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.below(i));
      std::swap(order[i - 1], order[j]);
    }
    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t bsz = std::min(cfg.batch_size, order.size() - start);
      std::vector<DsmBatchItem> batch;
      batch.reserve(bsz);
      for (std::size_t b = 0; b < bsz; ++b) batch.push_back(pairs[order[start + b]]);
      const DsmResult res = dsm_loss_grad(result.model, batch, sde, rng);
      opt.step(result.model.network, res.grads);
      epoch_loss += res.loss;
      ++n_batches;
    }
    result.epoch_losses.push_back(epoch_loss /
                                  static_cast<double>(n_batches));
  }
  return result;
}

// Deterministic reverse sampler via the probability-flow ODE, Euler steps
// from t = T down to t = eps_t, initial state X_T ~ N(mu, Lambda).
template <typename ScoreFn>
inline std::vector<double> reverse_ode_sample_with(
    ScoreFn&& score_fn, std::size_t dim, int n_steps, const SdeConfig& cfg,
    Rng& rng, std::vector<std::vector<double>>* trace = nullptr) {
  if (n_steps < 1) {
    raise(ErrorCode::PreconditionViolated, "n_steps must be >= 1");
  }
  cfg.validate();
  if (cfg.dim() != dim) {
    raise(ErrorCode::DimensionMismatch, "sde dim mismatch");
  }
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    x[i] = cfg.mu[i] + std::sqrt(cfg.lambda[i]) * rng.normal();
  }
  const double h = (cfg.t_max - cfg.eps_t) / static_cast<double>(n_steps);
  double t = cfg.t_max;
  for (int step = 0; step < n_steps; ++step) {
    if (trace) trace->push_back(x);
    const std::vector<double> s = score_fn(x, t);
    const double bt = cfg.beta(t);
    for (std::size_t i = 0; i < dim; ++i) {
      const double drift =
          0.5 * bt * ((cfg.mu[i] - x[i]) / cfg.lambda[i] - s[i]);
      x[i] -= h * drift;
      if (!std::isfinite(x[i]) || std::abs(x[i]) > 1e6) {
        raise(ErrorCode::NonFiniteState, "reverse ODE diverged");
      }
    }
    t -= h;
  }
  if (trace) trace->push_back(x);
  return x;
}

inline std::vector<double> reverse_ode_sample(
    const ScoreModel& model, const std::vector<double>& z, int n_steps,
    const SdeConfig& cfg, Rng& rng,
    std::vector<std::vector<double>>* trace = nullptr) {
  return reverse_ode_sample_with(
      [&](const std::vector<double>& x, double t) {
        return score_eval(model, x, t, z);
      },
      model.dim, n_steps, cfg, rng, trace);
}

inline nlohmann::json score_model_to_json(const ScoreModel& m) {
  return nlohmann::json{{"network", mlp_to_json(m.network)}, {"dim", m.dim}};
}

inline ScoreModel score_model_from_json(const nlohmann::json& j) {
  ScoreModel m;
  m.network = mlp_from_json(j.at("network"));
  m.dim = j.at("dim").get<std::size_t>();
  return m;
}

}  // namespace paratone
