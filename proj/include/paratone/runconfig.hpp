// One JSON-mirrored config drives a full reproducible experiment; CLI flags
// override file values.
#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "paratone/corpus.hpp"
#include "paratone/error.hpp"
#include "paratone/harness.hpp"

namespace paratone {

struct RunConfig {
  std::uint64_t seed = 42;
  int jobs = 1;
  std::string corpus_dir = "out/corpus";
  std::string checkpoint_dir = "out/checkpoints";
  std::string report_dir = "out/reports";
  CorpusConfig corpus;
  PipelineTrainConfig train;
  std::string eval_mode = "paper44";
  int eval_n_per_caption = 20;

  // Keep the per-module seeds and jobs in sync with the top-level knobs.
  void propagate() {
    corpus.seed = seed;
    corpus.jobs = jobs;
    train.seed = seed;
  }
};

namespace detail {

template <typename T>
void maybe_get(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline void patch_config_from_json(RunConfig& cfg, const nlohmann::json& j) {
  detail::maybe_get(j, "seed", cfg.seed);
  detail::maybe_get(j, "jobs", cfg.jobs);
  detail::maybe_get(j, "corpus_dir", cfg.corpus_dir);
  detail::maybe_get(j, "checkpoint_dir", cfg.checkpoint_dir);
  detail::maybe_get(j, "report_dir", cfg.report_dir);
  detail::maybe_get(j, "eval_mode", cfg.eval_mode);
  detail::maybe_get(j, "eval_n_per_caption", cfg.eval_n_per_caption);
  if (j.contains("corpus")) {
    const auto& c = j.at("corpus");
    detail::maybe_get(c, "n_utterances", cfg.corpus.n_utterances);
    detail::maybe_get(c, "duration_s", cfg.corpus.duration_s);
    detail::maybe_get(c, "sample_rate", cfg.corpus.sample_rate);
    detail::maybe_get(c, "write_wavs", cfg.corpus.write_wavs);
    if (c.contains("ranges")) cfg.corpus.ranges = ranges_from_json(c.at("ranges"));
    if (c.contains("analysis")) {
      const auto& a = c.at("analysis");
      detail::maybe_get(a, "frame_s", cfg.corpus.analysis.frame_s);
      detail::maybe_get(a, "hop_s", cfg.corpus.analysis.hop_s);
      detail::maybe_get(a, "f0_min_hz", cfg.corpus.analysis.f0_min_hz);
      detail::maybe_get(a, "f0_max_hz", cfg.corpus.analysis.f0_max_hz);
      detail::maybe_get(a, "voicing_threshold",
                        cfg.corpus.analysis.voicing_threshold);
    }
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    if (t.contains("align")) {
      const auto& a = t.at("align");
      detail::maybe_get(a, "epochs", cfg.train.align.epochs);
      detail::maybe_get(a, "batch_size", cfg.train.align.batch_size);
      detail::maybe_get(a, "lr", cfg.train.align.lr);
      detail::maybe_get(a, "full_spec_prob", cfg.train.align.full_spec_prob);
    }
    if (t.contains("decoder")) {
      const auto& d = t.at("decoder");
      detail::maybe_get(d, "epochs", cfg.train.decoder.epochs);
      detail::maybe_get(d, "batch_size", cfg.train.decoder.batch_size);
      detail::maybe_get(d, "lr", cfg.train.decoder.lr);
    }
    if (t.contains("prior")) {
      const auto& p = t.at("prior");
      detail::maybe_get(p, "epochs", cfg.train.prior.epochs);
      detail::maybe_get(p, "batch_size", cfg.train.prior.batch_size);
      detail::maybe_get(p, "lr", cfg.train.prior.lr);
    }
    detail::maybe_get(t, "prior_subset_expansions",
                      cfg.train.prior_subset_expansions);
    detail::maybe_get(t, "n_steps", cfg.train.n_steps);
  }
  cfg.propagate();
}

inline RunConfig load_run_config(const std::string& path) {
  RunConfig cfg;
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoFailure, "cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::MalformedHeader,
          std::string("bad config json: ") + e.what());
  }
  patch_config_from_json(cfg, j);
  return cfg;
}

}  // namespace paratone
