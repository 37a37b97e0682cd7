// Synthetic corpus: sampled synthesis parameters, rendered WAVs, extracted
// features, pseudo-A/V/D scores, tercile bins over the whole corpus, an
// emotion label from a fixed rule table, and a caption per record. The
// manifest is JSON-lines; bins.json sits next to it; WAVs go to wav/.
#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "paratone/align.hpp"
#include "paratone/binning.hpp"
#include "paratone/captions.hpp"
#include "paratone/error.hpp"
#include "paratone/features.hpp"
#include "paratone/rng.hpp"
#include "paratone/synth.hpp"
#include "paratone/wav.hpp"

namespace paratone {

struct CorpusConfig {
  std::size_t n_utterances = 2000;
  double duration_s = 1.0;
  std::uint64_t seed = 42;
  int sample_rate = 22050;
  ParamRanges ranges;
  AnalysisConfig analysis;
  int jobs = 1;
  bool write_wavs = true;
};

struct CorpusRecord {
  std::string utterance_id;
  SynthParams params;
  FeatureVector features;
  PseudoAvd avd;
  Emotion label = Emotion::Neutral;
  std::string caption;
  AttributeSpec spec;
};

struct Corpus {
  std::vector<CorpusRecord> records;
  BinBoundaries bins;
  FeatureStats stats;
  CorpusConfig config;
};

inline double attribute_value(const CorpusRecord& r, Attribute a) {
  switch (a) {
    case Attribute::PitchMean: return r.features.pitch_mean_hz;
    case Attribute::PitchStd: return r.features.pitch_std_hz;
    case Attribute::Level: return r.features.level_db;
    case Attribute::Jitter: return r.features.jitter_ratio;
    case Attribute::Shimmer: return r.features.shimmer_ratio;
    case Attribute::Arousal: return r.avd.arousal;
    case Attribute::Valence: return r.avd.valence;
    case Attribute::Dominance: return r.avd.dominance;
  }
  return 0.0;
}

// First match wins.
inline Emotion emotion_rule(const AttributeSpec& spec) {
  const auto level = spec.of(Attribute::Level);
  const auto pitch = spec.of(Attribute::PitchMean);
  const auto pitch_std = spec.of(Attribute::PitchStd);
  const auto jitter = spec.of(Attribute::Jitter);
  if (level == Tercile::Low && pitch == Tercile::Low) return Emotion::Sad;
  if (level == Tercile::Top && jitter == Tercile::Top) return Emotion::Angry;
  if (pitch == Tercile::Top && pitch_std == Tercile::Top) {
    return Emotion::Surprise;
  }
  if (level == Tercile::Top || pitch == Tercile::Top) return Emotion::Happy;
  return Emotion::Neutral;
}

inline FeatureStats compute_feature_stats(
    const std::vector<CorpusRecord>& records) {
  FeatureStats s;
  const double n = static_cast<double>(records.size());
  for (int a = 0; a < kNumControllable; ++a) {
    double mean = 0.0;
    for (const auto& r : records) {
      mean += attribute_value(r, static_cast<Attribute>(a));
    }
    mean /= n;
    double var = 0.0;
    for (const auto& r : records) {
      const double d = attribute_value(r, static_cast<Attribute>(a)) - mean;
      var += d * d;
    }
    s.mean[a] = mean;
    s.stddev[a] = std::sqrt(var / n);
  }
  return s;
}

inline PseudoAvd pseudo_avd(const FeatureVector& fv, const FeatureStats& s) {
  PseudoAvd out;
  out.arousal = s.z(2, fv.level_db) + s.z(1, fv.pitch_std_hz);
  out.valence = -s.z(3, fv.jitter_ratio) - s.z(4, fv.shimmer_ratio);
  out.dominance = s.z(2, fv.level_db) - s.z(0, fv.pitch_mean_hz);
  return out;
}

inline nlohmann::json features_to_json(const FeatureVector& f) {
  return nlohmann::json{{"pitch_mean_hz", f.pitch_mean_hz},
                        {"pitch_std_hz", f.pitch_std_hz},
                        {"level_db", f.level_db},
                        {"jitter_ratio", f.jitter_ratio},
                        {"shimmer_ratio", f.shimmer_ratio}};
}

inline FeatureVector features_from_json(const nlohmann::json& j) {
  FeatureVector f;
  f.pitch_mean_hz = j.at("pitch_mean_hz").get<double>();
  f.pitch_std_hz = j.at("pitch_std_hz").get<double>();
  f.level_db = j.at("level_db").get<double>();
  f.jitter_ratio = j.at("jitter_ratio").get<double>();
  f.shimmer_ratio = j.at("shimmer_ratio").get<double>();
  return f;
}

inline nlohmann::json record_to_json(const CorpusRecord& r) {
  return nlohmann::json{
      {"utterance_id", r.utterance_id},
      {"params", params_to_json(r.params)},
      {"features", features_to_json(r.features)},
      {"avd",
       {{"arousal", r.avd.arousal},
        {"valence", r.avd.valence},
        {"dominance", r.avd.dominance}}},
      {"label", emotion_name(r.label)},
      {"caption", r.caption},
      {"spec", spec_to_json(r.spec)}};
}

inline CorpusRecord record_from_json(const nlohmann::json& j) {
  CorpusRecord r;
  r.utterance_id = j.at("utterance_id").get<std::string>();
  r.params = params_from_json(j.at("params"));
  r.features = features_from_json(j.at("features"));
  r.avd.arousal = j.at("avd").at("arousal").get<double>();
  r.avd.valence = j.at("avd").at("valence").get<double>();
  r.avd.dominance = j.at("avd").at("dominance").get<double>();
  const auto e = emotion_from_name(j.at("label").get<std::string>());
  if (!e) raise(ErrorCode::UnknownAttribute, "bad label in manifest");
  r.label = *e;
  r.caption = j.at("caption").get<std::string>();
  r.spec = spec_from_json(j.at("spec"));
  return r;
}

inline nlohmann::json bins_to_json(const BinBoundaries& bins) {
  nlohmann::json j;
  for (Attribute a : kAllAttributes) {
    j[attribute_feature_key(a)] = {{"p30", bins.of(a).p30},
                                   {"p70", bins.of(a).p70}};
  }
  return j;
}

inline BinBoundaries bins_from_json(const nlohmann::json& j) {
  BinBoundaries bins;
  for (Attribute a : kAllAttributes) {
    const auto& bj = j.at(attribute_feature_key(a));
    bins.of(a).p30 = bj.at("p30").get<double>();
    bins.of(a).p70 = bj.at("p70").get<double>();
  }
  return bins;
}

inline SynthParams sample_params(const ParamRanges& r, double duration_s,
                                 Rng& rng) {
  SynthParams p;
  p.f0_hz = rng.uniform(r.f0_lo, r.f0_hi);
  p.f0_var_hz = rng.uniform(r.f0_var_lo, r.f0_var_hi);
  p.level_db = rng.uniform(r.level_lo, r.level_hi);
  p.jitter_pct = rng.uniform(r.jitter_lo, r.jitter_hi);
  p.shimmer_pct = rng.uniform(r.shimmer_lo, r.shimmer_hi);
  p.duration_s = duration_s;
  return p;
}

inline std::string utterance_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "utt_%06zu", index);
  return buf;
}

inline Corpus build_synthetic_corpus(const CorpusConfig& cfg,
                                     const std::string& out_dir) {
  if (cfg.n_utterances < 100) {
    raise(ErrorCode::InsufficientData,
          "corpus needs >= 100 utterances for binning");
  }
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  if (cfg.write_wavs) fs::create_directories(fs::path(out_dir) / "wav");

  Corpus corpus;
  corpus.config = cfg;
  corpus.records.resize(cfg.n_utterances);

  // Phase 1: synthesize + extract, parallel over utterances. Every record
  // depends only on its own derived seed, so the schedule cannot change the
  // result.
  auto build_record = [&](std::size_t i) {
    Rng rng(derive_seed(cfg.seed, 0x75747400ULL, i));  // "utt"
    CorpusRecord& r = corpus.records[i];
    r.utterance_id = utterance_id(i);
    r.params = sample_params(cfg.ranges, cfg.duration_s, rng);
    Waveform w;
    try {
      w = synthesize(r.params, rng, cfg.sample_rate);
      r.features = extract_features(w, cfg.analysis);
    } catch (const Error& e) {
      raise(e.code(), r.utterance_id + ": " + e.what());
    }
    if (cfg.write_wavs) {
      write_wav(w, (fs::path(out_dir) / "wav" / (r.utterance_id + ".wav"))
                       .string());
    }
  };
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < cfg.n_utterances; ++i) build_record(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(jobs);
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cfg.n_utterances) break;
          try {
            build_record(i);
          } catch (const std::exception& e) {
            errors[w] = e.what();
            break;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& msg : errors) {
      if (!msg.empty()) raise(ErrorCode::StageFailure, msg);
    }
  }

  // Phase 2 (sequential): statistics, pseudo-AVD, bins, specs, captions.
  corpus.stats = compute_feature_stats(corpus.records);
  for (auto& r : corpus.records) r.avd = pseudo_avd(r.features, corpus.stats);

  std::array<std::vector<double>, kNumAttributes> columns;
  for (int a = 0; a < kNumAttributes; ++a) {
    columns[a].reserve(cfg.n_utterances);
    for (const auto& r : corpus.records) {
      columns[a].push_back(attribute_value(r, static_cast<Attribute>(a)));
    }
  }
  corpus.bins = compute_bins(columns);

  const TemplateTable table = default_template_table();
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    CorpusRecord& r = corpus.records[i];
    for (Attribute a : kAllAttributes) {
      r.spec.of(a) = classify(attribute_value(r, a), corpus.bins.of(a));
    }
    r.label = emotion_rule(r.spec);
    r.spec.emotion = r.label;
    Rng crng(derive_seed(cfg.seed, 0x63617000ULL, i));  // "cap"
    r.caption = generate_caption(r.spec, crng, table);
  }

  // Manifest + bins.
  {
    std::ofstream mf(fs::path(out_dir) / "manifest.jsonl",
                     std::ios::trunc);
    if (!mf) raise(ErrorCode::IoFailure, "cannot write manifest");
    for (const auto& r : corpus.records) {
      mf << record_to_json(r).dump() << "\n";
    }
  }
  {
    std::ofstream bf(fs::path(out_dir) / "bins.json", std::ios::trunc);
    if (!bf) raise(ErrorCode::IoFailure, "cannot write bins.json");
    bf << bins_to_json(corpus.bins).dump(2) << "\n";
  }
  {
    nlohmann::json meta;
    meta["n_utterances"] = cfg.n_utterances;
    meta["duration_s"] = cfg.duration_s;
    meta["seed"] = cfg.seed;
    meta["sample_rate"] = cfg.sample_rate;
    meta["ranges"] = ranges_to_json(cfg.ranges);
    meta["feature_mean"] = corpus.stats.mean;
    meta["feature_std"] = corpus.stats.stddev;
    std::ofstream cf(fs::path(out_dir) / "corpus.json", std::ios::trunc);
    if (!cf) raise(ErrorCode::IoFailure, "cannot write corpus.json");
    cf << meta.dump(2) << "\n";
  }
  return corpus;
}

inline Corpus load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path manifest = fs::path(dir) / "manifest.jsonl";
  if (!fs::exists(manifest)) {
    raise(ErrorCode::MissingCheckpoint,
          "no manifest.jsonl in " + dir);
  }
  Corpus corpus;
  std::ifstream mf(manifest);
  std::string line;
  while (std::getline(mf, line)) {
    if (line.empty()) continue;
    corpus.records.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  std::ifstream bf(fs::path(dir) / "bins.json");
  if (!bf) raise(ErrorCode::MissingCheckpoint, "no bins.json in " + dir);
  nlohmann::json bj;
  bf >> bj;
  corpus.bins = bins_from_json(bj);
  std::ifstream cf(fs::path(dir) / "corpus.json");
  if (cf) {
    nlohmann::json cj;
    cf >> cj;
    corpus.config.n_utterances = cj.at("n_utterances").get<std::size_t>();
    corpus.config.duration_s = cj.at("duration_s").get<double>();
    corpus.config.seed = cj.at("seed").get<std::uint64_t>();
    corpus.config.sample_rate = cj.at("sample_rate").get<int>();
    corpus.config.ranges = ranges_from_json(cj.at("ranges"));
    const auto mean = cj.at("feature_mean").get<std::vector<double>>();
    const auto stddev = cj.at("feature_std").get<std::vector<double>>();
    std::copy(mean.begin(), mean.end(), corpus.stats.mean.begin());
    std::copy(stddev.begin(), stddev.end(), corpus.stats.stddev.begin());
  } else {
    corpus.stats = compute_feature_stats(corpus.records);
  }
  return corpus;
}

}  // namespace paratone
