// src/cli/cli.cpp

// Copyright 2026 The medleysep Authors

// See the top-level LICENSE file for the full license text.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "medleysep/cli/cli.h"

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "medleysep/common/error.h"
#include "medleysep/common/json_config.h"
#include "medleysep/corpus/manifest.h"
#include "medleysep/corpus/medleyvox.h"
#include "medleysep/mixer/dynamic_mixer.h"
#include "medleysep/oracle/masks.h"
#include "medleysep/trainer/trainer.h"

namespace medleysep {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

WavFormat wav_format_from_string(const std::string& s) {
  if (s == "float32") return WavFormat::kFloat32;
  if (s == "pcm16") return WavFormat::kPcm16;
  throw std::invalid_argument("unknown WAV format: " + s + " (expected float32 or pcm16)");
}

std::string to_string(WavFormat f) { return f == WavFormat::kFloat32 ? "float32" : "pcm16"; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string() + ": write failed");
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": " + ec.message());
}

json load_config_or_empty(const std::string& path) {
  return path.empty() ? json::object() : read_json_file(path);
}

json provenance_json(const SourceProvenance& p) {
  return {{"utterance_id", p.utterance_id}, {"singer_id", p.singer_id},       {"song_id", p.song_id},
          {"offset_seconds", p.offset_seconds}, {"gain_db", p.gain_db},     {"octave_cents", p.octave_cents},
          {"detune_cents", p.detune_cents},  {"formant_ratio", p.formant_ratio}, {"transformed", p.transformed},
          {"in_rest", p.in_rest}};
}

// Runs fn(i) for i in [0, n) on `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1 || n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(workers, n); ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---- mix --------------------------------------------------------------------

constexpr std::size_t kMixChunk = 64;

void cmd_mix(const MixJobConfig& cfg, std::ostream& out) {
  cfg.validate();
  const fs::path root = cfg.out;
  make_dirs(root);
  write_text(root / "config.json", config_to_json(cfg).dump(2) + "\n");
  std::ofstream prov(root / "provenance.jsonl", std::ios::binary | std::ios::trunc);
  if (!prov) throw IoError((root / "provenance.jsonl").string() + ": cannot open for writing");
  if (cfg.n_examples == 0) {
    out << "wrote 0 examples to " << root.string() << "\n";
    return;
  }

  TrainConfig loader;
  loader.manifests = cfg.manifests;
  const Manifest manifest = load_training_manifests(loader);
  const DynamicMixer mixer(manifest, cfg.policy, cfg.sample_rate);
  for (std::size_t begin = 0; begin < cfg.n_examples; begin += kMixChunk) {
    const std::size_t count = std::min(kMixChunk, cfg.n_examples - begin);
    std::vector<std::optional<MixtureExample>> batch(count);
    parallel_for(count, cfg.workers, [&](std::size_t k) {
      auto rng = derive_rng(cfg.seed, {static_cast<std::uint64_t>(begin + k)});
      batch[k] = mixer.draw(rng);
    });
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t index = begin + k;
      const auto& ex = *batch[k];
      char id[32];
      std::snprintf(id, sizeof id, "mix_%06zu", index);
      make_dirs(root / id);
      const std::string mix_rel = std::string(id) + "/mixture.wav";
      write_wav(root / mix_rel, ex.mixture, cfg.format);
      json sources = json::array();
      for (std::size_t s = 0; s < ex.sources.size(); ++s) {
        const std::string rel = std::string(id) + "/source_" + std::to_string(s) + ".wav";
        write_wav(root / rel, ex.sources[s], cfg.format);
        sources.push_back(rel);
      }
      json utterances = json::array();
      for (const auto& p : ex.provenance) utterances.push_back(provenance_json(p));
      json line{{"example_id", id},
                {"index", index},
                {"category", to_string(ex.category)},
                {"pair_kind", to_string(ex.pair_kind)},
                {"sample_rate", ex.mixture.sample_rate()},
                {"mixture_path", mix_rel},
                {"source_paths", sources},
                {"utterances", utterances}};
      prov << line.dump() << '\n';
    }
  }
  prov.flush();
  if (!prov) throw IoError((root / "provenance.jsonl").string() + ": write failed");
  out << "wrote " << cfg.n_examples << " examples to " << root.string() << "\n";
}

// ---- train / finetune ---------------------------------------------------------

extern "C" void on_sigint(int) { stop_requested().store(true); }

class SigintScope {
 public:
  SigintScope() { previous_ = std::signal(SIGINT, on_sigint); }
  ~SigintScope() { std::signal(SIGINT, previous_); }

 private:
  void (*previous_)(int) = nullptr;
};

void report_training(const TrainResult& r, std::ostream& out) {
  out << "run directory: " << r.run_dir.string() << "\n"
      << "steps: " << r.steps_done << (r.interrupted ? " (interrupted)" : "") << "\n"
      << "skipped steps: " << r.skipped_steps << "\n";
  if (!r.last_checkpoint.empty()) out << "last checkpoint: " << r.last_checkpoint.string() << "\n";
  if (r.best_validation) out << "best validation SI-SDRi: " << *r.best_validation << " dB\n";
}

void cmd_train(TrainConfig cfg, bool joint, std::ostream& out) {
  cfg.validate();
  const Manifest manifest = load_training_manifests(cfg);
  const DynamicData data(manifest, cfg);
  stop_requested().store(false);
  SigintScope sigint;
  const auto result = joint ? joint_finetune(cfg, data) : train(cfg, data);
  report_training(result, out);
}

// ---- eval / oracle --------------------------------------------------------------

void write_eval_outputs(const EvalJobConfig& cfg, const EvalResult& result, std::ostream& out) {
  const fs::path root = cfg.out;
  make_dirs(root);
  write_text(root / "config.json", config_to_json(cfg).dump(2) + "\n");
  std::string lines;
  for (const auto& r : result.records) lines += to_json(r).dump() + "\n";
  write_text(root / "records.jsonl", lines);
  write_text(root / "summary.json", to_json(result.summary).dump(2) + "\n");
  const std::string table = format_summary_table(result.summary);
  write_text(root / "summary.txt", table);
  out << table;
  for (const auto& s : result.summary.skipped) out << "skipped " << s.segment_id << ": " << s.reason << "\n";
}

void cmd_eval(EvalJobConfig cfg, std::ostream& out) {
  cfg.validate(true, false);
  auto ckpt = nn::load_checkpoint(cfg.checkpoint);
  if (cfg.boundary_hz > 0.0) {
    if (!ckpt.config.contains("isrnet") || ckpt.config["isrnet"].is_null())
      throw ConfigError("boundary_hz: the checkpoint has no refinement network");
    ckpt.config["isrnet"]["freq_boundary_hz"] = cfg.boundary_hz;
  }
  const SeparatorModel model = load_model(ckpt);
  if (cfg.options.resample == 0) cfg.options.resample = model.backbone().config().sample_rate;
  const auto meta = load_medleyvox_metadata(cfg.metadata);
  for (const auto& r : meta.rejected) spdlog::warn("metadata line {} ({}): {}", r.line, r.segment_id, r.reason);
  const SeparateFn separate = [&model](const AudioBuffer& mixture, std::span<const AudioBuffer>) {
    return model.separate(mixture);
  };
  write_eval_outputs(cfg, evaluate_dataset(separate, meta.segments, meta.base_dir, cfg.options), out);
}

void cmd_oracle(EvalJobConfig cfg, std::ostream& out) {
  cfg.validate(false, true);
  const OracleKind kind = oracle_from_string(cfg.oracle);
  const auto meta = load_medleyvox_metadata(cfg.metadata);
  for (const auto& r : meta.rejected) spdlog::warn("metadata line {} ({}): {}", r.line, r.segment_id, r.reason);
  const StftConfig stft_cfg = cfg.stft;
  const SeparateFn separate = [kind, stft_cfg](const AudioBuffer& mixture, std::span<const AudioBuffer> refs) {
    return oracle_separate(kind, refs, mixture, stft_cfg);
  };
  write_eval_outputs(cfg, evaluate_dataset(separate, meta.segments, meta.base_dir, cfg.options), out);
}

// ---- report -------------------------------------------------------------------

EvalRecord record_from_json(const json& j) {
  EvalRecord r;
  r.segment_id = j.at("segment_id").get<std::string>();
  r.song_id = j.value("song_id", "");
  r.category = category_from_string(j.at("category").get<std::string>());
  r.n_singings = j.at("n_singings").get<int>();
  r.n_singers = j.at("n_singers").get<int>();
  r.sdr_i = j.value("sdr_i", std::vector<double>{});
  r.si_sdr_i = j.at("si_sdr_i").get<std::vector<double>>();
  r.sdr = j.value("sdr", std::vector<double>{});
  r.si_sdr = j.value("si_sdr", std::vector<double>{});
  r.permutation_used = j.value("permutation_used", std::vector<std::size_t>{});
  r.clipped_eval = j.value("clipped_eval", false);
  r.regularized = j.value("regularized", false);
  r.reduced_taps = j.value("reduced_taps", false);
  return r;
}

void cmd_report_records(const std::string& path, const std::string& out_dir, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw IoError(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  const auto summary = summarize(records);
  const std::string table = format_summary_table(summary);
  out << table;
  if (!out_dir.empty()) {
    make_dirs(out_dir);
    write_text(fs::path(out_dir) / "summary.json", to_json(summary).dump(2) + "\n");
    write_text(fs::path(out_dir) / "summary.txt", table);
  }
}

void cmd_report_metadata(const std::string& path, std::ostream& out) {
  const auto meta = load_medleyvox_metadata(path);
  const auto s = summarize(meta.segments);
  char line[128];
  std::snprintf(line, sizeof line, "%-14s %9s %9s %9s %9s\n", "category", "singings", "singers", "segments",
                "seconds");
  out << line;
  for (const auto& [key, st] : s.per_cell) {
    const auto& [cat, singings, singers] = key;
    std::snprintf(line, sizeof line, "%-14s %9d %9d %9d %9.1f\n", to_string(cat).c_str(), singings, singers,
                  st.segments, st.seconds);
    out << line;
  }
  for (const auto& [cat, st] : s.per_category) {
    std::snprintf(line, sizeof line, "%-14s %9s %9s %9d %9.1f\n", (to_string(cat) + " total").c_str(), "", "",
                  st.segments, st.seconds);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-14s %9s %9s %9d %9.1f\n", "all", "", "", s.total.segments, s.total.seconds);
  out << line;
  out << s.total.songs.size() << " songs, " << meta.rejected.size() << " rejected segment(s)\n";
}

}  // namespace

// ---- configs ------------------------------------------------------------------

void MixJobConfig::validate() const {
  if (!is_pipeline_rate(sample_rate)) throw ConfigError("sample_rate: not a supported pipeline rate");
  if (out.empty()) throw ConfigError("out: must not be empty");
  if (workers == 0) throw ConfigError("workers: must be positive");
  if (n_examples > 0 && manifests.empty()) throw ConfigError("missing config field manifests");
  try {
    policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("policy: ") + e.what());
  }
}

void EvalJobConfig::validate(bool needs_checkpoint, bool needs_oracle) const {
  if (metadata.empty()) throw ConfigError("missing config field metadata");
  if (needs_checkpoint && checkpoint.empty()) throw ConfigError("missing config field checkpoint");
  if (needs_oracle) {
    if (oracle.empty()) throw ConfigError("missing config field oracle (ibm, irm or cirm)");
    try {
      oracle_from_string(oracle);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("oracle: ") + e.what());
    }
  }
  if (out.empty()) throw ConfigError("out: must not be empty");
  if (options.workers == 0) throw ConfigError("options.workers: must be positive");
  if (options.filter_taps == 0) throw ConfigError("options.filter_taps: must be positive");
  if (options.resample != 0 && !is_pipeline_rate(options.resample))
    throw ConfigError("options.resample: not a supported pipeline rate");
  if (boundary_hz < 0.0) throw ConfigError("boundary_hz: must be non-negative");
  try {
    stft.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("stft: ") + e.what());
  }
}

json config_to_json(const MixJobConfig& c) {
  json manifests = json::array();
  for (const auto& m : c.manifests) manifests.push_back({{"path", m.path}, {"weight", m.weight}});
  return {{"manifests", manifests},       {"policy", config_to_json(c.policy)}, {"sample_rate", c.sample_rate},
          {"n_examples", c.n_examples},   {"seed", c.seed},                     {"out", c.out},
          {"format", to_string(c.format)}, {"workers", c.workers}};
}

json config_to_json(const EvalOptions& c) {
  return {{"permutation_mode", to_string(c.permutation_mode)},
          {"clipped_eval", c.clipped_eval},
          {"resample", c.resample},
          {"compute_sdr", c.compute_sdr},
          {"filter_taps", c.filter_taps},
          {"workers", c.workers}};
}

json config_to_json(const EvalJobConfig& c) {
  return {{"metadata", c.metadata},
          {"checkpoint", c.checkpoint},
          {"oracle", c.oracle},
          {"stft", config_to_json(c.stft)},
          {"out", c.out},
          {"options", config_to_json(c.options)},
          {"boundary_hz", c.boundary_hz}};
}

void parse_config(const json& j, MixJobConfig& out, const std::string& where) {
  ConfigReader r(j, where);
  if (r.has("manifests")) {
    TrainConfig tmp;
    parse_config(json{{"manifests", r.raw("manifests")}}, tmp, where);
    out.manifests = tmp.manifests;
  }
  if (r.has("policy")) parse_config(r.raw("policy"), out.policy, r.field("policy"));
  r.get("sample_rate", out.sample_rate);
  r.get("n_examples", out.n_examples);
  r.get("seed", out.seed);
  r.get("out", out.out);
  r.get_as("format", out.format, wav_format_from_string);
  r.get("workers", out.workers);
  r.finish();
}

void parse_config(const json& j, EvalOptions& out, const std::string& where) {
  ConfigReader r(j, where);
  r.get_as("permutation_mode", out.permutation_mode, permutation_mode_from_string);
  r.get("clipped_eval", out.clipped_eval);
  r.get("resample", out.resample);
  r.get("compute_sdr", out.compute_sdr);
  r.get("filter_taps", out.filter_taps);
  r.get("workers", out.workers);
  r.finish();
}

void parse_config(const json& j, EvalJobConfig& out, const std::string& where) {
  ConfigReader r(j, where);
  r.get("metadata", out.metadata);
  r.get("checkpoint", out.checkpoint);
  r.get("oracle", out.oracle);
  if (r.has("stft")) parse_config(r.raw("stft"), out.stft, r.field("stft"));
  r.get("out", out.out);
  if (r.has("options")) parse_config(r.raw("options"), out.options, r.field("options"));
  r.get("boundary_hz", out.boundary_hz);
  r.finish();
}

// ---- entry point ------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-singer voice separation toolkit"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::string config_path, out_dir, metadata, checkpoint, kind, records;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers, n_examples;
  std::optional<double> boundary_hz;
  bool clipped = false;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "JSON config file");
    if (config_required) opt->required();
    sub->add_option("--seed", seed, "Random seed (overrides the config)");
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    sub->add_option("--workers", workers, "Worker threads (overrides the config)");
  };

  auto* mix = app.add_subcommand("mix", "Materialize training mixtures with provenance");
  add_common(mix, false);
  mix->add_option("--n-examples", n_examples, "Number of mixtures");

  auto* train_cmd = app.add_subcommand("train", "Train a separation backbone");
  add_common(train_cmd, true);

  auto* finetune = app.add_subcommand("finetune", "Jointly train backbone and refinement network");
  add_common(finetune, true);
  finetune->add_option("--boundary-hz", boundary_hz, "Refinement frequency boundary in Hz");

  auto* eval = app.add_subcommand("eval", "Score a checkpoint on evaluation metadata");
  add_common(eval, false);
  eval->add_option("--checkpoint", checkpoint, "Model checkpoint");
  eval->add_option("--metadata", metadata, "Evaluation metadata (JSON Lines)");
  eval->add_flag("--clipped", clipped, "Also score after a 16-bit WAV round trip");
  eval->add_option("--boundary-hz", boundary_hz, "Refinement frequency boundary in Hz");

  auto* oracle = app.add_subcommand("oracle", "Score ideal time-frequency masks");
  add_common(oracle, false);
  oracle->add_option("--kind", kind, "Mask kind: ibm, irm or cirm");
  oracle->add_option("--metadata", metadata, "Evaluation metadata (JSON Lines)");
  oracle->add_flag("--clipped", clipped, "Also score after a 16-bit WAV round trip");

  auto* report = app.add_subcommand("report", "Summarize evaluation records or metadata");
  report->add_option("--records", records, "records.jsonl from eval/oracle");
  report->add_option("--metadata", metadata, "Evaluation metadata (JSON Lines)");
  report->add_option("--out", out_dir, "Write summary files here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (mix->parsed()) {
      MixJobConfig cfg;
      parse_config(load_config_or_empty(config_path), cfg);
      if (seed) cfg.seed = *seed;
      if (!out_dir.empty()) cfg.out = out_dir;
      if (workers) cfg.workers = *workers;
      if (n_examples) cfg.n_examples = *n_examples;
      cmd_mix(cfg, out);
    } else if (train_cmd->parsed() || finetune->parsed()) {
      TrainConfig cfg;
      parse_config(read_json_file(config_path), cfg, "");
      if (seed) cfg.seed = *seed;
      if (!out_dir.empty()) cfg.runs_dir = out_dir;
      if (workers) cfg.workers = *workers;
      if (boundary_hz) {
        if (!cfg.isrnet) {
          cfg.isrnet = ISRNetConfig{};
          cfg.isrnet->sample_rate = cfg.sample_rate;
        }
        cfg.isrnet->freq_boundary_hz = *boundary_hz;
      }
      cmd_train(cfg, finetune->parsed(), out);
    } else if (eval->parsed() || oracle->parsed()) {
      EvalJobConfig cfg;
      parse_config(load_config_or_empty(config_path), cfg);
      if (!out_dir.empty()) cfg.out = out_dir;
      if (workers) cfg.options.workers = *workers;
      if (!metadata.empty()) cfg.metadata = metadata;
      if (!checkpoint.empty()) cfg.checkpoint = checkpoint;
      if (!kind.empty()) cfg.oracle = kind;
      if (clipped) cfg.options.clipped_eval = true;
      if (boundary_hz) cfg.boundary_hz = *boundary_hz;
      if (seed) spdlog::debug("--seed has no effect on evaluation");
      if (eval->parsed()) {
        cmd_eval(cfg, out);
      } else {
        try {
          cfg.validate(false, true);
        } catch (const ConfigError& e) {
          err << e.what() << "\n" << oracle->help();
          return kExitConfig;
        }
        cmd_oracle(cfg, out);
      }
    } else if (report->parsed()) {
      if (records.empty() == metadata.empty()) throw ConfigError("report needs exactly one of --records or --metadata");
      if (!records.empty()) {
        cmd_report_records(records, out_dir, out);
      } else {
        cmd_report_metadata(metadata, out);
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ManifestError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace medleysep
