// Parametric vowel-tone synthesizer and the decoder head that maps adapted
// emotion embeddings to synthesis parameters.
//
// Signal model: a glottal-like pulse train built period by period. Period k
// has length (1/f0_k) * (1 + jitter% * n_k); the periodic waveshape is the
// sum of the first 6 harmonics with 1/h rolloff, scaled per period by
// (1 + shimmer% * m_k); f0_k follows a slow random walk (5 Hz knots,
// linearly interpolated) plus a 5.5 Hz vibrato of equal depth. Fades are
// applied before the final RMS rescale so the extracted level is exact.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "paratone/align.hpp"
#include "paratone/error.hpp"
#include "paratone/features.hpp"
#include "paratone/nn.hpp"
#include "paratone/rng.hpp"
#include "paratone/wav.hpp"

namespace paratone {

struct SynthParams {
  double f0_hz = 220.0;        // [80, 500]
  double f0_var_hz = 0.0;      // >= 0
  double level_db = -20.0;     // [-40, 0]
  double jitter_pct = 0.0;     // [0, 10]
  double shimmer_pct = 0.0;    // [0, 15]
  double duration_s = 1.0;     // [0.5, 5]
};

inline void validate_params(const SynthParams& p) {
  auto ok = [](double v, double lo, double hi) {
    return std::isfinite(v) && v >= lo && v <= hi;
  };
  if (!ok(p.f0_hz, 80.0, 500.0) || !ok(p.f0_var_hz, 0.0, 1e3) ||
      !ok(p.level_db, -40.0, 0.0) || !ok(p.jitter_pct, 0.0, 10.0) ||
      !ok(p.shimmer_pct, 0.0, 15.0) || !ok(p.duration_s, 0.5, 5.0)) {
    raise(ErrorCode::InvalidParams, "synth parameter out of range");
  }
}

inline nlohmann::json params_to_json(const SynthParams& p) {
  return nlohmann::json{{"f0", p.f0_hz},
                        {"f0_var", p.f0_var_hz},
                        {"level_db", p.level_db},
                        {"jitter_pct", p.jitter_pct},
                        {"shimmer_pct", p.shimmer_pct},
                        {"duration_s", p.duration_s}};
}

inline SynthParams params_from_json(const nlohmann::json& j) {
  SynthParams p;
  p.f0_hz = j.at("f0").get<double>();
  p.f0_var_hz = j.at("f0_var").get<double>();
  p.level_db = j.at("level_db").get<double>();
  p.jitter_pct = j.at("jitter_pct").get<double>();
  p.shimmer_pct = j.at("shimmer_pct").get<double>();
  p.duration_s = j.at("duration_s").get<double>();
  return p;
}

namespace detail {

inline constexpr int kHarmonics = 6;
inline constexpr double kVibratoHz = 5.5;
inline constexpr double kWalkUpdateHz = 5.0;
inline constexpr double kFadeSeconds = 0.010;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double vowel_waveshape(double phase01) {
  double v = 0.0;
  for (int h = 1; h <= kHarmonics; ++h) {
    v += std::sin(kTwoPi * h * phase01) / static_cast<double>(h);
  }
  return v;
}

}  // namespace detail

inline Waveform synthesize(const SynthParams& params, Rng& rng,
                           int sample_rate = 22050) {
  validate_params(params);
  if (sample_rate < 16000) {
    raise(ErrorCode::InvalidParams, "sample_rate must be >= 16000");
  }
  const std::size_t n =
      static_cast<std::size_t>(std::lround(params.duration_s * sample_rate));
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(n, 0.0);

  // F0 track knots at 5 Hz, linearly interpolated. Centering keeps the
  // utterance-mean pitch at f0 so extraction round-trips the parameter.
  const std::size_t n_knots =
      2 + static_cast<std::size_t>(
              std::ceil(params.duration_s * detail::kWalkUpdateHz));
  std::vector<double> knots(n_knots);
  for (auto& k : knots) k = params.f0_var_hz * rng.normal();
  auto walk_at = [&](double t) {
    const double u = t * detail::kWalkUpdateHz;
    const std::size_t i = std::min(static_cast<std::size_t>(u), n_knots - 2);
    const double frac = u - static_cast<double>(i);
    return knots[i] * (1.0 - frac) + knots[i + 1] * frac;
  };
  // Center the interpolated track over the utterance span (not the raw
  // knots, whose tail extends past the end).
  {
    double mean = 0.0;
    const int grid = 1000;
    for (int g = 0; g < grid; ++g) {
      mean += walk_at(params.duration_s * (g + 0.5) / grid);
    }
    mean /= grid;
    for (auto& k : knots) k -= mean;
  }
  auto f0_at = [&](double t) {
    const double vib =
        params.f0_var_hz * std::sin(detail::kTwoPi * detail::kVibratoHz * t);
    return std::clamp(params.f0_hz + walk_at(t) + vib, 40.0, 1000.0);
  };

  double t = 0.0;
  const double dur = static_cast<double>(n) / sample_rate;
  while (t < dur) {
    const double f0_k = f0_at(t);
    double period_factor = 1.0 + params.jitter_pct / 100.0 * rng.normal();
    period_factor = std::clamp(period_factor, 0.25, 4.0);
    const double period_s = period_factor / f0_k;
    double amp = 1.0 + params.shimmer_pct / 100.0 * rng.normal();
    amp = std::max(amp, 0.05);
    const std::size_t begin =
        static_cast<std::size_t>(std::ceil(t * sample_rate));
    const std::size_t end = std::min(
        n, static_cast<std::size_t>(std::ceil((t + period_s) * sample_rate)));
    for (std::size_t s = begin; s < end; ++s) {
      const double phase =
          (static_cast<double>(s) / sample_rate - t) / period_s;
      w.samples[s] = amp * detail::vowel_waveshape(phase);
    }
    t += period_s;
  }

  // Raised-cosine fades, then rescale so the overall RMS hits level_db.
  const std::size_t fade =
      std::min(n / 2, static_cast<std::size_t>(
                          std::lround(detail::kFadeSeconds * sample_rate)));
  for (std::size_t s = 0; s < fade; ++s) {
    const double g = 0.5 * (1.0 - std::cos(3.141592653589793 * (s + 1) /
                                           static_cast<double>(fade + 1)));
    w.samples[s] *= g;
    w.samples[n - 1 - s] *= g;
  }
  const double current = rms(w.samples);
  const double target = std::pow(10.0, params.level_db / 20.0);
  if (current > 1e-12) {
    const double gain = target / current;
    for (auto& s : w.samples) s = std::clamp(s * gain, -1.0, 1.0);
  }
  return w;
}

// Ranges used to normalize the five regressed parameters to [0, 1]. These
// are the corpus sampling ranges; decoded parameters land inside them by
// construction.
struct ParamRanges {
  double f0_lo = 120.0, f0_hi = 350.0;
  double f0_var_lo = 0.0, f0_var_hi = 40.0;
  double level_lo = -30.0, level_hi = -6.0;
  double jitter_lo = 0.0, jitter_hi = 4.0;
  double shimmer_lo = 0.0, shimmer_hi = 8.0;

  std::array<std::pair<double, double>, kNumControllable> as_pairs() const {
    return {{{f0_lo, f0_hi},
             {f0_var_lo, f0_var_hi},
             {level_lo, level_hi},
             {jitter_lo, jitter_hi},
             {shimmer_lo, shimmer_hi}}};
  }
};

inline nlohmann::json ranges_to_json(const ParamRanges& r) {
  return nlohmann::json{
      {"f0", {r.f0_lo, r.f0_hi}},
      {"f0_var", {r.f0_var_lo, r.f0_var_hi}},
      {"level_db", {r.level_lo, r.level_hi}},
      {"jitter_pct", {r.jitter_lo, r.jitter_hi}},
      {"shimmer_pct", {r.shimmer_lo, r.shimmer_hi}}};
}

inline ParamRanges ranges_from_json(const nlohmann::json& j) {
  ParamRanges r;
  auto get = [&](const char* key, double& lo, double& hi) {
    lo = j.at(key).at(0).get<double>();
    hi = j.at(key).at(1).get<double>();
  };
  get("f0", r.f0_lo, r.f0_hi);
  get("f0_var", r.f0_var_lo, r.f0_var_hi);
  get("level_db", r.level_lo, r.level_hi);
  get("jitter_pct", r.jitter_lo, r.jitter_hi);
  get("shimmer_pct", r.shimmer_lo, r.shimmer_hi);
  return r;
}

inline std::array<double, kNumControllable> normalize_params(
    const SynthParams& p, const ParamRanges& r) {
  const auto pairs = r.as_pairs();
  const std::array<double, kNumControllable> raw = {
      p.f0_hz, p.f0_var_hz, p.level_db, p.jitter_pct, p.shimmer_pct};
  std::array<double, kNumControllable> out{};
  for (int i = 0; i < kNumControllable; ++i) {
    out[i] = (raw[i] - pairs[i].first) / (pairs[i].second - pairs[i].first);
  }
  return out;
}

inline SynthParams denormalize_params(
    const std::array<double, kNumControllable>& u, const ParamRanges& r,
    double duration_s) {
  const auto pairs = r.as_pairs();
  auto lerp = [&](int i) {
    return pairs[i].first + u[i] * (pairs[i].second - pairs[i].first);
  };
  SynthParams p;
  p.f0_hz = lerp(0);
  p.f0_var_hz = lerp(1);
  p.level_db = lerp(2);
  p.jitter_pct = lerp(3);
  p.shimmer_pct = lerp(4);
  p.duration_s = duration_s;
  return p;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Decoder head: Mlp with identity output; a sigmoid squashes each of the
// five raw outputs to (0, 1) before the affine rescale, so decoded
// parameters always satisfy their range invariants.
struct DecoderHead {
  Mlp network;  // kAdaptedDim -> kNumControllable (identity output)
  ParamRanges ranges;
  double duration_s = 1.0;
};

inline DecoderHead make_decoder_head(Rng& rng, std::size_t hidden = 32) {
  DecoderHead h;
  h.network = make_mlp({kAdaptedDim, hidden, kNumControllable},
                       {Activation::Tanh, Activation::Identity}, rng);
  return h;
}

inline SynthParams decode_params(const DecoderHead& head,
                                 const std::vector<double>& adapted) {
  const std::vector<double> raw = forward(head.network, adapted);
  std::array<double, kNumControllable> u{};
  for (int i = 0; i < kNumControllable; ++i) u[i] = sigmoid(raw[i]);
  return denormalize_params(u, head.ranges, head.duration_s);
}

struct DecoderTrainConfig {
  int epochs = 80;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  double holdout_fraction = 0.1;
};

struct DecoderExample {
  FeatureVector features;
  PseudoAvd avd;
  SynthParams target;
};

struct DecoderTrainResult {
  DecoderHead head;
  EmoAdaptor adaptor;
  std::vector<double> epoch_losses;  // mean squared error on normalized params
  double holdout_rmse = 0.0;
};

// Stage I: regress adapted(encode_audio(features)) onto the known synthesis
// parameters, squared error on normalized parameters. The aligner stays
// frozen; the adaptor and head train jointly.
inline DecoderTrainResult train_decoder(const std::vector<DecoderExample>& data,
                                        const AlignmentModel& aligner,
                                        const ParamRanges& ranges,
                                        double duration_s,
                                        const DecoderTrainConfig& cfg) {
  if (data.size() < 200) {
    raise(ErrorCode::InsufficientData, "decoder needs >= 200 records");
  }
  Rng rng(cfg.seed);
  DecoderTrainResult result;
  result.adaptor = make_emo_adaptor(rng);
  result.head = make_decoder_head(rng);
  result.head.ranges = ranges;
  result.head.duration_s = duration_s;

  // Audio embeddings are fixed (frozen aligner); precompute.
  std::vector<std::vector<double>> ys(data.size());
  std::vector<std::array<double, kNumControllable>> targets(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    ys[i] = encode_audio(aligner, data[i].features, data[i].avd);
    targets[i] = normalize_params(data[i].target, ranges);
  }

  const std::size_t n_hold = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.holdout_fraction *
                                  static_cast<double>(data.size())));
  const std::size_t n_train = data.size() - n_hold;

  MlpOptimizer opt_adaptor(result.adaptor.map, {cfg.lr});
  MlpOptimizer opt_head(result.head.network, {cfg.lr});

  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n_train; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.below(i));
      std::swap(order[i - 1], order[j]);
    }
    double epoch_loss = 0.0;
    std::size_t n_terms = 0;
    for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
      const std::size_t bsz = std::min(cfg.batch_size, n_train - start);
      Gradients g_adaptor = Gradients::zeros_like(result.adaptor.map);
      Gradients g_head = Gradients::zeros_like(result.head.network);
      double batch_loss = 0.0;
      for (std::size_t b = 0; b < bsz; ++b) {
        const std::size_t idx = order[start + b];
        ForwardCache c_adapt, c_head;
        const std::vector<double> adapted =
            forward(result.adaptor.map, ys[idx], &c_adapt);
        const std::vector<double> raw =
            forward(result.head.network, adapted, &c_head);
        std::vector<double> d_raw(kNumControllable);
        for (int k = 0; k < kNumControllable; ++k) {
          const double p = sigmoid(raw[k]);
          const double err = p - targets[idx][k];
          batch_loss += err * err;
          // d/d raw of (sigmoid(raw) - t)^2
          d_raw[k] = 2.0 * err * p * (1.0 - p) / static_cast<double>(bsz);
        }
        const Gradients gh = backprop(result.head.network, c_head, d_raw);
        g_adaptor.accumulate(
            backprop(result.adaptor.map, c_adapt, gh.dinput));
        g_head.accumulate(gh);
      }
      opt_adaptor.step(result.adaptor.map, g_adaptor);
      opt_head.step(result.head.network, g_head);
      epoch_loss += batch_loss;
      n_terms += bsz * kNumControllable;
    }
    result.epoch_losses.push_back(epoch_loss /
                                  static_cast<double>(n_terms));
  }

  double sq = 0.0;
  for (std::size_t i = n_train; i < data.size(); ++i) {
    const std::vector<double> adapted = adapt(result.adaptor, ys[i]);
    const std::vector<double> raw = forward(result.head.network, adapted);
    for (int k = 0; k < kNumControllable; ++k) {
      const double err = sigmoid(raw[k]) - targets[i][k];
      sq += err * err;
    }
  }
  result.holdout_rmse = std::sqrt(
      sq / static_cast<double>(n_hold * kNumControllable));
  return result;
}

inline nlohmann::json decoder_to_json(const DecoderHead& h) {
  return nlohmann::json{{"network", mlp_to_json(h.network)},
                        {"ranges", ranges_to_json(h.ranges)},
                        {"duration_s", h.duration_s}};
}

inline DecoderHead decoder_from_json(const nlohmann::json& j) {
  DecoderHead h;
  h.network = mlp_from_json(j.at("network"));
  h.ranges = ranges_from_json(j.at("ranges"));
  h.duration_s = j.at("duration_s").get<double>();
  return h;
}

}  // namespace paratone
