// Contrastive text-audio alignment: paired MLP encoders over a shared
// 16-dim space (no trailing projection on either side), symmetric InfoNCE
// over cosine similarities with a trainable clamped temperature, and the
// linear emo adaptor that resizes emotion embeddings for the decoder.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "paratone/captions.hpp"
#include "paratone/error.hpp"
#include "paratone/features.hpp"
#include "paratone/nn.hpp"
#include "paratone/rng.hpp"

namespace paratone {

inline constexpr std::size_t kEmbedDim = 16;   // shared embedding width
inline constexpr std::size_t kAdaptedDim = 8;  // decoder conditioning width

// Audio-encoder invocation counter; the caption-only inference contract is
// asserted against it.
inline std::atomic<std::uint64_t>& audio_encoder_call_count() {
  static std::atomic<std::uint64_t> count{0};
  return count;
}

// Per-feature corpus statistics used to z-score encoder inputs.
struct FeatureStats {
  std::array<double, kNumControllable> mean{};
  std::array<double, kNumControllable> stddev{};

  double z(int idx, double value) const {
    const double s = stddev[idx] > 1e-12 ? stddev[idx] : 1.0;
    return (value - mean[idx]) / s;
  }
};

struct PseudoAvd {
  double arousal = 0.0;
  double valence = 0.0;
  double dominance = 0.0;
};

inline constexpr std::size_t kAudioInputDim = kNumControllable + 3;
inline constexpr std::size_t kTextInputDim =
    static_cast<std::size_t>(kNumAttributes) * 3 + kNumEmotions;  // 29

struct AlignmentModel {
  Mlp audio_encoder;  // kAudioInputDim -> kEmbedDim
  Mlp text_encoder;   // kTextInputDim -> kEmbedDim
  double tau = 0.07;
  FeatureStats stats;
};

struct EmoAdaptor {
  Mlp map;  // single identity-activation layer, kEmbedDim -> kAdaptedDim
};

inline AlignmentModel make_alignment_model(Rng& rng,
                                           std::size_t hidden = 64) {
  AlignmentModel m;
  m.audio_encoder =
      make_mlp({kAudioInputDim, hidden, hidden, kEmbedDim},
               {Activation::Tanh, Activation::Tanh, Activation::Identity},
               rng);
  m.text_encoder =
      make_mlp({kTextInputDim, hidden, hidden, kEmbedDim},
               {Activation::Tanh, Activation::Tanh, Activation::Identity},
               rng);
  return m;
}

inline EmoAdaptor make_emo_adaptor(Rng& rng) {
  EmoAdaptor a;
  a.map = make_mlp({kEmbedDim, kAdaptedDim}, {Activation::Identity}, rng);
  return a;
}

inline std::vector<double> audio_encoder_input(const FeatureVector& fv,
                                               const PseudoAvd& avd,
                                               const FeatureStats& stats) {
  return {stats.z(0, fv.pitch_mean_hz), stats.z(1, fv.pitch_std_hz),
          stats.z(2, fv.level_db),      stats.z(3, fv.jitter_ratio),
          stats.z(4, fv.shimmer_ratio), avd.arousal,
          avd.valence,                  avd.dominance};
}

inline std::vector<double> encode_audio(const AlignmentModel& m,
                                        const FeatureVector& fv,
                                        const PseudoAvd& avd) {
  audio_encoder_call_count().fetch_add(1, std::memory_order_relaxed);
  return forward(m.audio_encoder, audio_encoder_input(fv, avd, m.stats));
}

inline std::vector<double> spec_one_hot(const AttributeSpec& spec) {
  if (spec.empty()) raise(ErrorCode::EmptySpec, "cannot encode empty spec");
  std::vector<double> x(kTextInputDim, 0.0);
  for (int a = 0; a < kNumAttributes; ++a) {
    const auto& t = spec.entries[a];
    if (t) x[static_cast<std::size_t>(a) * 3 +
             static_cast<std::size_t>(*t)] = 1.0;
  }
  if (spec.emotion) {
    x[static_cast<std::size_t>(kNumAttributes) * 3 +
      static_cast<std::size_t>(*spec.emotion)] = 1.0;
  }
  return x;
}

inline std::vector<double> encode_text(const AlignmentModel& m,
                                       const AttributeSpec& spec) {
  return forward(m.text_encoder, spec_one_hot(spec));
}

namespace detail {

inline double vec_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace detail

struct ContrastiveResult {
  double loss = 0.0;
  std::vector<std::vector<double>> d_audio;  // dLoss/dA rows
  std::vector<std::vector<double>> d_text;   // dLoss/dB rows
  double d_tau = 0.0;
};

// Symmetric InfoNCE over cosine similarities scaled by 1/tau, averaged over
// both retrieval directions (2N cross-entropy terms).
inline ContrastiveResult contrastive_loss_grad(
    const std::vector<std::vector<double>>& audio,
    const std::vector<std::vector<double>>& text, double tau) {
  const std::size_t n = audio.size();
  if (n == 0 || text.size() != n) {
    raise(ErrorCode::DimensionMismatch, "batch sizes differ or empty");
  }
  const std::size_t d = audio[0].size();
  std::vector<double> na(n), nb(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (audio[i].size() != d || text[i].size() != d) {
      raise(ErrorCode::DimensionMismatch, "embedding dims differ");
    }
    na[i] = detail::vec_norm(audio[i]);
    nb[i] = detail::vec_norm(text[i]);
    if (na[i] < 1e-12 || nb[i] < 1e-12) {
      raise(ErrorCode::ZeroNormEmbedding, "zero-norm embedding in batch");
    }
  }
  // Cosine matrix.
  std::vector<std::vector<double>> cos(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += audio[i][k] * text[j][k];
      cos[i][j] = dot / (na[i] * nb[j]);
    }
  }
  // Row / column softmaxes of cos/tau.
  auto softmax_terms = [&](bool rows, std::vector<std::vector<double>>& p) {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -1e300;
      for (std::size_t j = 0; j < n; ++j) {
        const double l = (rows ? cos[i][j] : cos[j][i]) / tau;
        mx = std::max(mx, l);
      }
      double z = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double l = (rows ? cos[i][j] : cos[j][i]) / tau;
        p[i][j] = std::exp(l - mx);
        z += p[i][j];
      }
      for (std::size_t j = 0; j < n; ++j) p[i][j] /= z;
      loss += -std::log(std::max(p[i][i], 1e-300));
    }
    return loss;
  };
  std::vector<std::vector<double>> pr(n, std::vector<double>(n));
  std::vector<std::vector<double>> pc(n, std::vector<double>(n));
  const double loss_r = softmax_terms(true, pr);
  const double loss_c = softmax_terms(false, pc);

  ContrastiveResult res;
  res.loss = (loss_r + loss_c) / (2.0 * static_cast<double>(n));

  // dLoss/dlogit_ij, logits l_ij = cos_ij / tau.
  std::vector<std::vector<double>> g(n, std::vector<double>(n));
  const double inv2n = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = pr[i][j] + pc[j][i];
      if (i == j) v -= 2.0;
      g[i][j] = v * inv2n;
    }
  }
  res.d_audio.assign(n, std::vector<double>(d, 0.0));
  res.d_text.assign(n, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double coeff = g[i][j] / tau;
      res.d_tau -= g[i][j] * cos[i][j] / tau;
      // d cos / d a_i = (b_hat_j - cos * a_hat_i) / |a_i|
      for (std::size_t k = 0; k < d; ++k) {
        const double a_hat = audio[i][k] / na[i];
        const double b_hat = text[j][k] / nb[j];
        res.d_audio[i][k] += coeff * (b_hat - cos[i][j] * a_hat) / na[i];
        res.d_text[j][k] += coeff * (a_hat - cos[i][j] * b_hat) / nb[j];
      }
    }
  }
  return res;
}

inline double contrastive_loss(const std::vector<std::vector<double>>& audio,
                               const std::vector<std::vector<double>>& text,
                               double tau) {
  return contrastive_loss_grad(audio, text, tau).loss;
}

inline std::vector<double> adapt(const EmoAdaptor& adaptor,
                                 const std::vector<double>& y) {
  return forward(adaptor.map, y);
}

struct AlignTrainConfig {
  int epochs = 50;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  double tau_min = 0.01;
  double tau_max = 1.0;
  double holdout_fraction = 0.1;
  // Probability of training on the full record spec; otherwise a random
  // non-empty subset is drawn so sparse inference prompts are in
  // distribution.
  double full_spec_prob = 0.3;
};

// One alignment training example: encoder input features plus the record
// spec the text side is built from.
struct AlignExample {
  FeatureVector features;
  PseudoAvd avd;
  AttributeSpec spec;
};

inline AttributeSpec sample_subset_spec(const AttributeSpec& full, Rng& rng) {
  std::vector<int> slots;  // 0..7 attributes, 8 = emotion
  for (int a = 0; a < kNumAttributes; ++a) {
    if (full.entries[a]) slots.push_back(a);
  }
  if (full.emotion) slots.push_back(kNumAttributes);
  if (slots.empty()) raise(ErrorCode::EmptySpec, "record spec empty");
  const std::size_t k =
      1 + static_cast<std::size_t>(rng.below(slots.size()));
  // Partial Fisher-Yates for k distinct slots.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(
                                  rng.below(slots.size() - i));
    std::swap(slots[i], slots[j]);
  }
  AttributeSpec out;
  for (std::size_t i = 0; i < k; ++i) {
    if (slots[i] == kNumAttributes) {
      out.emotion = full.emotion;
    } else {
      out.entries[slots[i]] = full.entries[slots[i]];
    }
  }
  return out;
}

struct RetrievalReport {
  std::size_t pool_size = 0;
  double top1 = 0.0;
  double top5 = 0.0;
};

// Text->audio retrieval over a pool; a hit means the nearest audio embedding
// belongs to a record whose spec equals the query spec (specs are discrete,
// so index identity is ill-posed under collisions).
inline RetrievalReport evaluate_retrieval(
    const AlignmentModel& model, const std::vector<AlignExample>& pool) {
  RetrievalReport rep;
  rep.pool_size = pool.size();
  if (pool.empty()) return rep;
  std::vector<std::vector<double>> ys, zs;
  ys.reserve(pool.size());
  zs.reserve(pool.size());
  for (const auto& ex : pool) {
    ys.push_back(encode_audio(model, ex.features, ex.avd));
    zs.push_back(encode_text(model, ex.spec));
  }
  auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      dot += a[k] * b[k];
      na += a[k] * a[k];
      nb += b[k] * b[k];
    }
    return dot / std::max(std::sqrt(na * nb), 1e-30);
  };
  std::size_t hits1 = 0, hits5 = 0;
  for (std::size_t q = 0; q < pool.size(); ++q) {
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(pool.size());
    for (std::size_t c = 0; c < pool.size(); ++c) {
      scored.emplace_back(-cosine(zs[q], ys[c]), c);
    }
    std::partial_sort(scored.begin(),
                      scored.begin() + std::min<std::size_t>(5, scored.size()),
                      scored.end());
    if (pool[scored[0].second].spec == pool[q].spec) ++hits1;
    for (std::size_t r = 0; r < std::min<std::size_t>(5, scored.size()); ++r) {
      if (pool[scored[r].second].spec == pool[q].spec) {
        ++hits5;
        break;
      }
    }
  }
  rep.top1 = static_cast<double>(hits1) / static_cast<double>(pool.size());
  rep.top5 = static_cast<double>(hits5) / static_cast<double>(pool.size());
  return rep;
}

struct AlignTrainResult {
  AlignmentModel model;
  std::vector<double> epoch_losses;
  RetrievalReport retrieval;
};

inline AlignTrainResult train_alignment(const std::vector<AlignExample>& data,
                                        const FeatureStats& stats,
                                        const AlignTrainConfig& cfg) {
  if (data.size() < 200) {
    raise(ErrorCode::InsufficientData, "alignment needs >= 200 records");
  }
  Rng rng(cfg.seed);
  AlignTrainResult result;
  result.model = make_alignment_model(rng);
  result.model.stats = stats;
  AlignmentModel& model = result.model;

  const std::size_t n_hold = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.holdout_fraction *
                                  static_cast<double>(data.size())));
  const std::size_t n_train = data.size() - n_hold;

  MlpOptimizer opt_audio(model.audio_encoder, {cfg.lr});
  MlpOptimizer opt_text(model.text_encoder, {cfg.lr});
  AdamState opt_tau(1, {cfg.lr});

  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates shuffle.
    for (std::size_t i = n_train; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.below(i));
      std::swap(order[i - 1], order[j]);
    }
    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start + 2 <= n_train;
         start += cfg.batch_size) {
      const std::size_t bsz = std::min(cfg.batch_size, n_train - start);
      if (bsz < 2) break;
      std::vector<std::vector<double>> a_in(bsz), t_in(bsz);
      std::vector<ForwardCache> a_cache(bsz), t_cache(bsz);
      std::vector<std::vector<double>> a_emb(bsz), t_emb(bsz);
      for (std::size_t b = 0; b < bsz; ++b) {
        const AlignExample& ex = data[order[start + b]];
        a_in[b] = audio_encoder_input(ex.features, ex.avd, stats);
        const AttributeSpec spec = rng.uniform() < cfg.full_spec_prob
                                       ? ex.spec
                                       : sample_subset_spec(ex.spec, rng);
        t_in[b] = spec_one_hot(spec);
        a_emb[b] = forward(model.audio_encoder, a_in[b], &a_cache[b]);
        t_emb[b] = forward(model.text_encoder, t_in[b], &t_cache[b]);
      }
      const ContrastiveResult res =
          contrastive_loss_grad(a_emb, t_emb, model.tau);
      epoch_loss += res.loss;
      ++n_batches;

      Gradients ga = Gradients::zeros_like(model.audio_encoder);
      Gradients gt = Gradients::zeros_like(model.text_encoder);
      for (std::size_t b = 0; b < bsz; ++b) {
        ga.accumulate(backprop(model.audio_encoder, a_cache[b], res.d_audio[b]));
        gt.accumulate(backprop(model.text_encoder, t_cache[b], res.d_text[b]));
      }
      opt_audio.step(model.audio_encoder, ga);
      opt_text.step(model.text_encoder, gt);
      std::vector<double> tau_vec{model.tau};
      adam_step(opt_tau, tau_vec, {res.d_tau});
      model.tau = std::clamp(tau_vec[0], cfg.tau_min, cfg.tau_max);
    }
    result.epoch_losses.push_back(
        n_batches > 0 ? epoch_loss / static_cast<double>(n_batches) : 0.0);
  }

  std::vector<AlignExample> holdout(data.end() - static_cast<long>(n_hold),
                                    data.end());
  result.retrieval = evaluate_retrieval(model, holdout);
  return result;
}

inline nlohmann::json alignment_to_json(const AlignmentModel& m) {
  nlohmann::json j;
  j["audio_encoder"] = mlp_to_json(m.audio_encoder);
  j["text_encoder"] = mlp_to_json(m.text_encoder);
  j["tau"] = m.tau;
  j["feature_mean"] = m.stats.mean;
  j["feature_std"] = m.stats.stddev;
  return j;
}

inline AlignmentModel alignment_from_json(const nlohmann::json& j) {
  AlignmentModel m;
  m.audio_encoder = mlp_from_json(j.at("audio_encoder"));
  m.text_encoder = mlp_from_json(j.at("text_encoder"));
  m.tau = j.at("tau").get<double>();
  const auto mean = j.at("feature_mean").get<std::vector<double>>();
  const auto stddev = j.at("feature_std").get<std::vector<double>>();
  if (mean.size() != kNumControllable || stddev.size() != kNumControllable) {
    raise(ErrorCode::DimensionMismatch, "feature stats size mismatch");
  }
  std::copy(mean.begin(), mean.end(), m.stats.mean.begin());
  std::copy(stddev.begin(), stddev.end(), m.stats.stddev.begin());
  return m;
}

}  // namespace paratone
