// Two-stage training orchestration, caption-only inference, and the
// controllability evaluation with CSV reports.
//
// Training order: contrastive alignment -> freeze -> Stage I (adaptor +
// decoder head, jointly, against ground-truth parameters) -> freeze adaptor
// -> Stage II (score prior on whitened audio embeddings conditioned on
// caption embeddings). Inference never touches the audio encoder; the
// instrumentation counter in align.hpp makes that assertable.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "paratone/align.hpp"
#include "paratone/captions.hpp"
#include "paratone/corpus.hpp"
#include "paratone/error.hpp"
#include "paratone/prior.hpp"
#include "paratone/sde.hpp"
#include "paratone/synth.hpp"

namespace paratone {

struct EmbeddingStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::vector<double> whiten(const std::vector<double>& y) const {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      out[i] = (y[i] - mean[i]) / (stddev[i] > 1e-9 ? stddev[i] : 1.0);
    }
    return out;
  }

  std::vector<double> unwhiten(const std::vector<double>& v) const {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      out[i] = mean[i] + v[i] * (stddev[i] > 1e-9 ? stddev[i] : 1.0);
    }
    return out;
  }
};

struct PipelineTrainConfig {
  AlignTrainConfig align;
  DecoderTrainConfig decoder;
  PriorTrainConfig prior;
  int prior_subset_expansions = 3;
  int n_steps = 100;  // reverse ODE steps at inference
  std::uint64_t seed = 42;
};

struct PipelineCheckpointSet {
  AlignmentModel aligner;
  EmoAdaptor adaptor;
  DecoderHead decoder;
  ScoreModel score;
  SdeConfig sde;
  EmbeddingStats y_stats;
  BinBoundaries bins;
  int sample_rate = 22050;
  int n_steps = 100;
  std::uint64_t seed = 42;
  RetrievalReport retrieval;
  double decoder_holdout_rmse = 0.0;
  std::map<std::string, std::string> hashes;  // component -> fnv1a-64 hex
};

namespace detail {

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::MissingCheckpoint, "missing file: " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::IoFailure, "cannot write " + path);
  out << content;
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace detail

inline AlignExample to_align_example(const CorpusRecord& r) {
  return AlignExample{r.features, r.avd, r.spec};
}

// Stage II training pairs: whitened audio embedding against the full-spec
// text embedding plus a few random subset-spec embeddings, so the prior
// sees sparse conditioning like the evaluation captions.
inline std::vector<DsmBatchItem> build_prior_pairs(
    const Corpus& corpus, const AlignmentModel& aligner,
    const EmbeddingStats& y_stats, int subset_expansions,
    std::uint64_t seed) {
  std::vector<DsmBatchItem> pairs;
  pairs.reserve(corpus.records.size() *
                static_cast<std::size_t>(1 + subset_expansions));
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const CorpusRecord& r = corpus.records[i];
    const std::vector<double> y =
        y_stats.whiten(encode_audio(aligner, r.features, r.avd));
    pairs.push_back({y, encode_text(aligner, r.spec)});
    Rng rng(derive_seed(seed, 0x73756273ULL, i));  // "subs"
    for (int k = 0; k < subset_expansions; ++k) {
      const AttributeSpec sub = sample_subset_spec(r.spec, rng);
      pairs.push_back({y, encode_text(aligner, sub)});
    }
  }
  return pairs;
}

inline void save_checkpoints(PipelineCheckpointSet& set,
                             const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::map<std::string, std::string> files = {
      {"alignment", alignment_to_json(set.aligner).dump()},
      {"adaptor", mlp_to_json(set.adaptor.map).dump()},
      {"decoder", decoder_to_json(set.decoder).dump()},
      {"prior",
       nlohmann::json{{"score", score_model_to_json(set.score)},
                      {"sde", sde_to_json(set.sde)},
                      {"y_mean", set.y_stats.mean},
                      {"y_std", set.y_stats.stddev}}
           .dump()},
      {"bins", bins_to_json(set.bins).dump()},
  };
  set.hashes.clear();
  for (const auto& [name, body] : files) {
    detail::spit((fs::path(dir) / (name + ".json")).string(), body);
    set.hashes[name] = detail::fnv1a_hex(body);
  }
  nlohmann::json meta;
  meta["hashes"] = set.hashes;
  meta["sample_rate"] = set.sample_rate;
  meta["n_steps"] = set.n_steps;
  meta["seed"] = set.seed;
  meta["retrieval"] = {{"pool_size", set.retrieval.pool_size},
                       {"top1", set.retrieval.top1},
                       {"top5", set.retrieval.top5}};
  meta["decoder_holdout_rmse"] = set.decoder_holdout_rmse;
  detail::spit((fs::path(dir) / "pipeline.json").string(), meta.dump(2));
}

inline PipelineCheckpointSet load_checkpoints(const std::string& dir) {
  namespace fs = std::filesystem;
  PipelineCheckpointSet set;
  const nlohmann::json meta =
      nlohmann::json::parse(detail::slurp((fs::path(dir) / "pipeline.json").string()));
  for (const auto& [name, hash] : meta.at("hashes").items()) {
    const std::string body =
        detail::slurp((fs::path(dir) / (name + ".json")).string());
    if (detail::fnv1a_hex(body) != hash.get<std::string>()) {
      raise(ErrorCode::IoFailure, "checkpoint hash mismatch: " + name);
    }
    set.hashes[name] = hash.get<std::string>();
  }
  set.aligner = alignment_from_json(nlohmann::json::parse(
      detail::slurp((fs::path(dir) / "alignment.json").string())));
  set.adaptor.map = mlp_from_json(nlohmann::json::parse(
      detail::slurp((fs::path(dir) / "adaptor.json").string())));
  set.decoder = decoder_from_json(nlohmann::json::parse(
      detail::slurp((fs::path(dir) / "decoder.json").string())));
  const nlohmann::json pj = nlohmann::json::parse(
      detail::slurp((fs::path(dir) / "prior.json").string()));
  set.score = score_model_from_json(pj.at("score"));
  set.sde = sde_from_json(pj.at("sde"));
  set.y_stats.mean = pj.at("y_mean").get<std::vector<double>>();
  set.y_stats.stddev = pj.at("y_std").get<std::vector<double>>();
  set.bins = bins_from_json(nlohmann::json::parse(
      detail::slurp((fs::path(dir) / "bins.json").string())));
  set.sample_rate = meta.at("sample_rate").get<int>();
  set.n_steps = meta.at("n_steps").get<int>();
  set.seed = meta.at("seed").get<std::uint64_t>();
  set.retrieval.pool_size = meta.at("retrieval").at("pool_size").get<std::size_t>();
  set.retrieval.top1 = meta.at("retrieval").at("top1").get<double>();
  set.retrieval.top5 = meta.at("retrieval").at("top5").get<double>();
  set.decoder_holdout_rmse = meta.at("decoder_holdout_rmse").get<double>();
  return set;
}

inline PipelineCheckpointSet run_training(const std::string& corpus_dir,
                                          const PipelineTrainConfig& cfg,
                                          const std::string& ckpt_dir) {
  PipelineCheckpointSet set;
  set.seed = cfg.seed;
  set.n_steps = cfg.n_steps;

  Corpus corpus;
  // Stage: alignment (includes corpus ingestion).
  try {
    corpus = load_corpus(corpus_dir);
    set.sample_rate = corpus.config.sample_rate;
    set.bins = corpus.bins;
    std::vector<AlignExample> examples;
    examples.reserve(corpus.records.size());
    for (const auto& r : corpus.records) examples.push_back(to_align_example(r));
    AlignTrainConfig acfg = cfg.align;
    acfg.seed = derive_seed(cfg.seed, 1);
    AlignTrainResult res = train_alignment(examples, corpus.stats, acfg);
    set.aligner = std::move(res.model);
    set.retrieval = res.retrieval;
  } catch (const Error& e) {
    raise(ErrorCode::StageFailure, std::string("alignment: ") + e.what());
  }

  // Stage: decoder (Stage I; adaptor + head jointly, aligner frozen).
  try {
    std::vector<DecoderExample> examples;
    examples.reserve(corpus.records.size());
    for (const auto& r : corpus.records) {
      examples.push_back({r.features, r.avd, r.params});
    }
    DecoderTrainConfig dcfg = cfg.decoder;
    dcfg.seed = derive_seed(cfg.seed, 2);
    DecoderTrainResult res =
        train_decoder(examples, set.aligner, corpus.config.ranges,
                      corpus.config.duration_s, dcfg);
    set.adaptor = std::move(res.adaptor);
    set.decoder = std::move(res.head);
    set.decoder_holdout_rmse = res.holdout_rmse;
  } catch (const Error& e) {
    raise(ErrorCode::StageFailure, std::string("decoder: ") + e.what());
  }

  // Stage: prior (Stage II; aligner and adaptor frozen).
  try {
    std::vector<std::vector<double>> ys;
    ys.reserve(corpus.records.size());
    for (const auto& r : corpus.records) {
      ys.push_back(encode_audio(set.aligner, r.features, r.avd));
    }
    set.y_stats.mean.assign(kEmbedDim, 0.0);
    set.y_stats.stddev.assign(kEmbedDim, 0.0);
    for (const auto& y : ys) {
      for (std::size_t i = 0; i < kEmbedDim; ++i) set.y_stats.mean[i] += y[i];
    }
    for (std::size_t i = 0; i < kEmbedDim; ++i) {
      set.y_stats.mean[i] /= static_cast<double>(ys.size());
    }
    for (const auto& y : ys) {
      for (std::size_t i = 0; i < kEmbedDim; ++i) {
        const double d = y[i] - set.y_stats.mean[i];
        set.y_stats.stddev[i] += d * d;
      }
    }
    for (std::size_t i = 0; i < kEmbedDim; ++i) {
      set.y_stats.stddev[i] =
          std::sqrt(set.y_stats.stddev[i] / static_cast<double>(ys.size()));
    }
    set.sde = default_sde_config(kEmbedDim);
    const std::vector<DsmBatchItem> pairs = build_prior_pairs(
        corpus, set.aligner, set.y_stats, cfg.prior_subset_expansions,
        derive_seed(cfg.seed, 3));
    PriorTrainConfig pcfg = cfg.prior;
    pcfg.seed = derive_seed(cfg.seed, 4);
    PriorTrainResult res = train_prior(pairs, pcfg, set.sde);
    set.score = std::move(res.model);
  } catch (const Error& e) {
    raise(ErrorCode::StageFailure, std::string("prior: ") + e.what());
  }

  save_checkpoints(set, ckpt_dir);
  return set;
}

struct InferenceResult {
  Waveform wav;
  SynthParams params;
  AttributeSpec spec;
  std::vector<double> y;  // sampled emotion embedding (unwhitened)
};

// parse -> encode_text -> reverse ODE -> unwhiten -> adapt -> decode ->
// synthesize. No audio-encoder call on this path.
inline InferenceResult infer_from_caption(const std::string& caption,
                                          const PipelineCheckpointSet& set,
                                          std::uint64_t seed,
                                          int n_steps = 0) {
  if (n_steps <= 0) n_steps = set.n_steps;
  InferenceResult out;
  out.spec = parse_caption(caption);
  const std::vector<double> z = encode_text(set.aligner, out.spec);
  Rng rng(derive_seed(seed, 0x696e66ULL));  // "inf"
  const std::vector<double> sampled =
      reverse_ode_sample(set.score, z, n_steps, set.sde, rng);
  out.y = set.y_stats.unwhiten(sampled);
  const std::vector<double> adapted = adapt(set.adaptor, out.y);
  out.params = decode_params(set.decoder, adapted);
  Rng srng(derive_seed(seed, 0x73796eULL));  // "syn"
  out.wav = synthesize(out.params, srng, set.sample_rate);
  return out;
}

struct ReportRow {
  std::string caption;
  int sample_idx = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  FeatureVector features;
  SynthParams params;
  std::vector<Attribute> target_attrs;
  std::vector<Tercile> target_terciles;
  std::vector<Tercile> assigned_terciles;
  bool conform = false;
};

struct SummaryCell {
  double median = 0.0;
  double iqr = 0.0;
  double conformance = 0.0;
  std::size_t n = 0;
};

struct ControllabilityReport {
  std::vector<ReportRow> rows;
  // summary over single-attribute captions, keyed by (attribute, tercile)
  std::map<std::pair<int, int>, SummaryCell> summary;
  std::size_t n_failed = 0;
};

namespace detail {

inline double percentile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double idx = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = idx - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace detail

inline ControllabilityReport run_controllability(
    const PipelineCheckpointSet& set, const std::vector<EvalCaption>& captions,
    int n_per_caption, std::uint64_t master_seed,
    bool fatal_on_error = false) {
  if (n_per_caption < 1) {
    raise(ErrorCode::PreconditionViolated, "n_per_caption must be >= 1");
  }
  ControllabilityReport report;
  for (std::size_t ci = 0; ci < captions.size(); ++ci) {
    for (int si = 0; si < n_per_caption; ++si) {
      ReportRow row;
      row.caption = captions[ci].text;
      row.sample_idx = si;
      row.seed = derive_seed(master_seed, ci, static_cast<std::uint64_t>(si));
      for (Attribute a : kAllAttributes) {
        if (captions[ci].spec.of(a)) {
          row.target_attrs.push_back(a);
          row.target_terciles.push_back(*captions[ci].spec.of(a));
        }
      }
      try {
        const InferenceResult inf =
            infer_from_caption(row.caption, set, row.seed);
        row.params = inf.params;
        row.features = extract_features(inf.wav);
        row.ok = true;
        row.conform = true;
        CorpusRecord tmp;
        tmp.features = row.features;
        for (std::size_t k = 0; k < row.target_attrs.size(); ++k) {
          const Attribute a = row.target_attrs[k];
          const Tercile assigned =
              classify(attribute_value(tmp, a), set.bins.of(a));
          row.assigned_terciles.push_back(assigned);
          if (assigned != row.target_terciles[k]) row.conform = false;
        }
      } catch (const Error& e) {
        if (fatal_on_error) throw;
        row.ok = false;
        row.error = error_name(e.code());
        row.conform = false;
        ++report.n_failed;
      }
      report.rows.push_back(std::move(row));
    }
  }

  // Summary over single-attribute rows.
  std::map<std::pair<int, int>, std::vector<double>> values;
  std::map<std::pair<int, int>, std::pair<std::size_t, std::size_t>> conf;
  for (const auto& row : report.rows) {
    if (!row.ok || row.target_attrs.size() != 1) continue;
    const Attribute a = row.target_attrs[0];
    const auto key = std::make_pair(static_cast<int>(a),
                                    static_cast<int>(row.target_terciles[0]));
    CorpusRecord tmp;
    tmp.features = row.features;
    values[key].push_back(attribute_value(tmp, a));
    conf[key].first += row.conform ? 1 : 0;
    conf[key].second += 1;
  }
  for (auto& [key, vals] : values) {
    std::sort(vals.begin(), vals.end());
    SummaryCell cell;
    cell.median = detail::percentile_sorted(vals, 50.0);
    cell.iqr = detail::percentile_sorted(vals, 75.0) -
               detail::percentile_sorted(vals, 25.0);
    cell.n = vals.size();
    const auto& [hits, total] = conf[key];
    cell.conformance =
        total > 0 ? static_cast<double>(hits) / static_cast<double>(total)
                  : 0.0;
    report.summary[key] = cell;
  }
  return report;
}

inline void write_report_csv(const ControllabilityReport& report,
                             const std::string& rows_path,
                             const std::string& summary_path) {
  auto join_names = [](const std::vector<Attribute>& attrs) {
    std::string out;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      if (i) out += ";";
      out += attribute_spec_key(attrs[i]);
    }
    return out;
  };
  auto join_terciles = [](const std::vector<Tercile>& ts) {
    std::string out;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i) out += ";";
      out += tercile_name(ts[i]);
    }
    return out;
  };
  {
    std::ofstream f(rows_path, std::ios::trunc);
    if (!f) raise(ErrorCode::IoFailure, "cannot write " + rows_path);
    f << "caption,sample_idx,seed,pitch_mean_hz,pitch_std_hz,level_db,"
         "jitter_ratio,shimmer_ratio,target_attr,target_tercile,"
         "assigned_tercile,conform\n";
    for (const auto& row : report.rows) {
      f << row.caption << "," << row.sample_idx << "," << row.seed << ",";
      if (row.ok) {
        f << detail::fmt_double(row.features.pitch_mean_hz) << ","
          << detail::fmt_double(row.features.pitch_std_hz) << ","
          << detail::fmt_double(row.features.level_db) << ","
          << detail::fmt_double(row.features.jitter_ratio) << ","
          << detail::fmt_double(row.features.shimmer_ratio) << ",";
      } else {
        f << row.error << "," << row.error << "," << row.error << ","
          << row.error << "," << row.error << ",";
      }
      f << join_names(row.target_attrs) << ","
        << join_terciles(row.target_terciles) << ","
        << join_terciles(row.assigned_terciles) << ","
        << (row.conform ? 1 : 0) << "\n";
    }
  }
  {
    std::ofstream f(summary_path, std::ios::trunc);
    if (!f) raise(ErrorCode::IoFailure, "cannot write " + summary_path);
    f << "attribute,tercile,median,iqr,conformance_rate\n";
    for (const auto& [key, cell] : report.summary) {
      f << attribute_spec_key(static_cast<Attribute>(key.first)) << ","
        << tercile_name(static_cast<Tercile>(key.second)) << ","
        << detail::fmt_double(cell.median) << ","
        << detail::fmt_double(cell.iqr) << ","
        << detail::fmt_double(cell.conformance) << "\n";
    }
  }
}

inline void write_retrieval_csv(const RetrievalReport& rep,
                                const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) raise(ErrorCode::IoFailure, "cannot write " + path);
  f << "pool_size,top1,top5\n";
  f << rep.pool_size << "," << detail::fmt_double(rep.top1) << ","
    << detail::fmt_double(rep.top5) << "\n";
}

}  // namespace paratone
