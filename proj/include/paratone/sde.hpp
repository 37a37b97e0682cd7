// Forward OU-type SDE dX = 1/2 L^-1 (mu - X) beta_t dt + sqrt(beta_t) dW
// with a linear beta schedule. The Gaussian transition is closed-form:
// with B(t) = int_0^t beta_s ds, per dimension
//   mean = mu + (x0 - mu) exp(-B/(2*lambda)),  var = lambda (1 - exp(-B/lambda)).
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "paratone/error.hpp"
#include "paratone/rng.hpp"

namespace paratone {

struct SdeConfig {
  std::vector<double> mu;      // terminal mean
  std::vector<double> lambda;  // diagonal terminal variance, > 0
  double beta0 = 0.05;
  double beta1 = 20.0;
  double t_max = 1.0;
  double eps_t = 1e-4;

  std::size_t dim() const { return mu.size(); }

  double beta(double t) const { return beta0 + t * (beta1 - beta0); }
  double beta_integral(double t) const {
    return beta0 * t + 0.5 * (beta1 - beta0) * t * t;
  }

  void validate() const {
    if (mu.empty() || lambda.size() != mu.size()) {
      raise(ErrorCode::DimensionMismatch, "mu/lambda size mismatch");
    }
    for (double l : lambda) {
      if (!(l > 0.0)) raise(ErrorCode::InvalidParams, "lambda must be > 0");
    }
    if (!(t_max > 0.0) || !(beta0 > 0.0) || !(beta1 > 0.0)) {
      raise(ErrorCode::InvalidParams, "beta schedule must be positive");
    }
  }
};

inline SdeConfig default_sde_config(std::size_t dim) {
  SdeConfig cfg;
  cfg.mu.assign(dim, 0.0);
  cfg.lambda.assign(dim, 1.0);
  return cfg;
}

struct GaussianMoments {
  std::vector<double> mean;
  std::vector<double> variance;
};

inline GaussianMoments forward_marginal(const std::vector<double>& x0,
                                        double t, const SdeConfig& cfg) {
  cfg.validate();
  if (x0.size() != cfg.dim()) {
    raise(ErrorCode::DimensionMismatch, "x0 dim mismatch");
  }
  if (t < 0.0 || t > cfg.t_max) {
    raise(ErrorCode::TimeOutOfRange, "t outside [0, T]");
  }
  const double big_b = cfg.beta_integral(t);
  GaussianMoments out;
  out.mean.resize(cfg.dim());
  out.variance.resize(cfg.dim());
  for (std::size_t i = 0; i < cfg.dim(); ++i) {
    const double decay = std::exp(-big_b / (2.0 * cfg.lambda[i]));
    out.mean[i] = cfg.mu[i] + (x0[i] - cfg.mu[i]) * decay;
    out.variance[i] = cfg.lambda[i] * (1.0 - decay * decay);
  }
  return out;
}

// Exact Gaussian transition sampling (not stepwise simulation).
inline std::vector<double> sample_forward(const std::vector<double>& x0,
                                          double t, const SdeConfig& cfg,
                                          Rng& rng) {
  const GaussianMoments m = forward_marginal(x0, t, cfg);
  std::vector<double> x(cfg.dim());
  for (std::size_t i = 0; i < cfg.dim(); ++i) {
    x[i] = m.mean[i] + std::sqrt(m.variance[i]) * rng.normal();
  }
  return x;
}

inline nlohmann::json sde_to_json(const SdeConfig& cfg) {
  return nlohmann::json{{"mu", cfg.mu},         {"lambda", cfg.lambda},
                        {"beta0", cfg.beta0},   {"beta1", cfg.beta1},
                        {"t_max", cfg.t_max},   {"eps_t", cfg.eps_t}};
}

inline SdeConfig sde_from_json(const nlohmann::json& j) {
  SdeConfig cfg;
  cfg.mu = j.at("mu").get<std::vector<double>>();
  cfg.lambda = j.at("lambda").get<std::vector<double>>();
  cfg.beta0 = j.at("beta0").get<double>();
  cfg.beta1 = j.at("beta1").get<double>();
  cfg.t_max = j.at("t_max").get<double>();
  cfg.eps_t = j.at("eps_t").get<double>();
  return cfg;
}

}  // namespace paratone
