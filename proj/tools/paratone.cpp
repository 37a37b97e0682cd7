// Command-line entry point: corpus building, two-stage training,
// caption-only inference, evaluation, feature dumps, and caption tooling.
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "paratone/paratone.hpp"

namespace {

using paratone::RunConfig;

struct CommonFlags {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "JSON config file (flags override its values)");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--jobs", flags.jobs, "worker threads where supported");
}

RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig cfg;
  if (flags.config_path) cfg = paratone::load_run_config(*flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.jobs) cfg.jobs = *flags.jobs;
  cfg.propagate();
  return cfg;
}

void print_feature_row(const std::string& path,
                       const paratone::FeatureVector& f) {
  std::printf("path,pitch_mean_hz,pitch_std_hz,level_db,jitter_ratio,"
              "shimmer_ratio\n");
  std::printf("%s,%.10g,%.10g,%.10g,%.10g,%.10g\n", path.c_str(),
              f.pitch_mean_hz, f.pitch_std_hz, f.level_db, f.jitter_ratio,
              f.shimmer_ratio);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"caption-controllable toy voice pipeline"};
  app.require_subcommand(1);

  CommonFlags flags;

  // corpus
  auto* cmd_corpus = app.add_subcommand("corpus", "build a synthetic corpus");
  add_common(cmd_corpus, flags);
  std::optional<std::size_t> corpus_n;
  std::optional<double> corpus_duration;
  std::optional<std::string> corpus_out;
  bool no_wavs = false;
  cmd_corpus->add_option("--n", corpus_n, "number of utterances (>= 100)");
  cmd_corpus->add_option("--duration", corpus_duration,
                         "utterance duration in seconds");
  cmd_corpus->add_option("--out", corpus_out, "corpus output directory");
  cmd_corpus->add_flag("--no-wavs", no_wavs,
                       "skip writing per-utterance wav files");

  // train
  auto* cmd_train = app.add_subcommand("train", "run two-stage training");
  add_common(cmd_train, flags);
  std::optional<std::string> train_corpus, train_out;
  cmd_train->add_option("--corpus", train_corpus, "corpus directory");
  cmd_train->add_option("--out", train_out, "checkpoint directory");

  // infer
  auto* cmd_infer = app.add_subcommand("infer", "synthesize from a caption");
  add_common(cmd_infer, flags);
  std::string infer_caption;
  std::string infer_out = "out.wav";
  std::optional<std::string> infer_ckpt;
  std::optional<int> infer_steps;
  cmd_infer->add_option("--caption", infer_caption, "caption text")
      ->required();
  cmd_infer->add_option("--out", infer_out, "output wav path");
  cmd_infer->add_option("--ckpt", infer_ckpt, "checkpoint directory");
  cmd_infer->add_option("--steps", infer_steps, "reverse ODE steps");

  // eval
  auto* cmd_eval = app.add_subcommand("eval", "controllability evaluation");
  add_common(cmd_eval, flags);
  std::optional<std::string> eval_mode;
  std::optional<int> eval_n;
  std::optional<std::string> eval_ckpt, eval_report_dir;
  cmd_eval->add_option("--mode", eval_mode, "single or paper44");
  cmd_eval->add_option("--n", eval_n, "samples per caption");
  cmd_eval->add_option("--ckpt", eval_ckpt, "checkpoint directory");
  cmd_eval->add_option("--report-dir", eval_report_dir, "report directory");

  // features
  auto* cmd_features =
      app.add_subcommand("features", "extract features from a wav file");
  std::string features_path;
  cmd_features->add_option("file", features_path, "wav file")->required();

  // caption
  auto* cmd_caption =
      app.add_subcommand("caption", "render a caption from a spec");
  add_common(cmd_caption, flags);
  std::string caption_spec_json;
  cmd_caption->add_option("--spec", caption_spec_json, "AttributeSpec JSON")
      ->required();

  // parse
  auto* cmd_parse = app.add_subcommand("parse", "parse a caption to a spec");
  std::string parse_text;
  cmd_parse->add_option("--text", parse_text, "caption text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (*cmd_corpus) {
      RunConfig cfg = resolve_config(flags);
      if (corpus_n) cfg.corpus.n_utterances = *corpus_n;
      if (corpus_duration) cfg.corpus.duration_s = *corpus_duration;
      if (no_wavs) cfg.corpus.write_wavs = false;
      const std::string out = corpus_out.value_or(cfg.corpus_dir);
      const paratone::Corpus corpus =
          paratone::build_synthetic_corpus(cfg.corpus, out);
      std::printf("corpus: %zu records -> %s\n", corpus.records.size(),
                  out.c_str());
    } else if (*cmd_train) {
      RunConfig cfg = resolve_config(flags);
      const std::string corpus_dir = train_corpus.value_or(cfg.corpus_dir);
      const std::string out = train_out.value_or(cfg.checkpoint_dir);
      const paratone::PipelineCheckpointSet set =
          paratone::run_training(corpus_dir, cfg.train, out);
      std::filesystem::create_directories(cfg.report_dir);
      paratone::write_retrieval_csv(
          set.retrieval,
          (std::filesystem::path(cfg.report_dir) / "retrieval.csv").string());
      std::printf("trained: retrieval top1=%.3f top5=%.3f (pool %zu), "
                  "decoder holdout rmse=%.4f -> %s\n",
                  set.retrieval.top1, set.retrieval.top5,
                  set.retrieval.pool_size, set.decoder_holdout_rmse,
                  out.c_str());
    } else if (*cmd_infer) {
      RunConfig cfg = resolve_config(flags);
      const std::string ckpt = infer_ckpt.value_or(cfg.checkpoint_dir);
      const paratone::PipelineCheckpointSet set =
          paratone::load_checkpoints(ckpt);
      const paratone::InferenceResult res = paratone::infer_from_caption(
          infer_caption, set, cfg.seed, infer_steps.value_or(0));
      paratone::write_wav(res.wav, infer_out);
      std::printf("%s\n", res.spec.display().c_str());
      std::printf("params: f0=%.1f Hz f0_var=%.1f Hz level=%.1f dB "
                  "jitter=%.2f%% shimmer=%.2f%% -> %s\n",
                  res.params.f0_hz, res.params.f0_var_hz, res.params.level_db,
                  res.params.jitter_pct, res.params.shimmer_pct,
                  infer_out.c_str());
    } else if (*cmd_eval) {
      RunConfig cfg = resolve_config(flags);
      if (eval_mode) cfg.eval_mode = *eval_mode;
      if (eval_n) cfg.eval_n_per_caption = *eval_n;
      const std::string ckpt = eval_ckpt.value_or(cfg.checkpoint_dir);
      const std::string report_dir = eval_report_dir.value_or(cfg.report_dir);
      const paratone::PipelineCheckpointSet set =
          paratone::load_checkpoints(ckpt);
      const auto captions = paratone::eval_caption_set(cfg.eval_mode);
      const paratone::ControllabilityReport report =
          paratone::run_controllability(set, captions, cfg.eval_n_per_caption,
                                        cfg.seed);
      std::filesystem::create_directories(report_dir);
      namespace fs = std::filesystem;
      paratone::write_report_csv(
          report, (fs::path(report_dir) / "eval_report.csv").string(),
          (fs::path(report_dir) / "eval_summary.csv").string());
      std::size_t conforming = 0;
      for (const auto& row : report.rows) conforming += row.conform ? 1 : 0;
      std::printf("eval: %zu rows, %zu conforming, %zu failed -> %s\n",
                  report.rows.size(), conforming, report.n_failed,
                  report_dir.c_str());
    } else if (*cmd_features) {
      const paratone::Waveform w = paratone::read_wav(features_path);
      print_feature_row(features_path, paratone::extract_features(w));
    } else if (*cmd_caption) {
      RunConfig cfg = resolve_config(flags);
      const paratone::AttributeSpec spec = paratone::spec_from_json(
          nlohmann::json::parse(caption_spec_json));
      paratone::Rng rng(cfg.seed);
      std::printf("%s\n", paratone::generate_caption(spec, rng).c_str());
    } else if (*cmd_parse) {
      const paratone::AttributeSpec spec = paratone::parse_caption(parse_text);
      std::printf("%s\n", spec.display().c_str());
    }
  } catch (const paratone::Error& e) {
    std::cerr << e.what() << std::endl;
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "MalformedInput: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
