// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// tasres: synth -> laec -> train -> eval pipeline and single-file inference.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli_config.h"
#include "tasres/audio/wav_io.h"
#include "tasres/echo/dataset.h"
#include "tasres/echo/manifest.h"
#include "tasres/error.h"
#include "tasres/laec/fdkf.h"
#include "tasres/metrics/report.h"
#include "tasres/parallel.h"
#include "tasres/train/trainer.h"

namespace tasres::cli {
namespace {

namespace fs = std::filesystem;

constexpr int kUsageExit = 2;

int ExitCode(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return 3;
    case ErrorCode::kIo: return 4;
    case ErrorCode::kUnsupportedFormat: return 5;
    case ErrorCode::kChannelCount: return 6;
    case ErrorCode::kConfig: return 7;
    case ErrorCode::kCheckpointMismatch: return 8;
    case ErrorCode::kNumerical: return 9;
    case ErrorCode::kEmptyInput: return 10;
  }
  return 1;
}

void ReportError(std::string_view code, std::string msg) {
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  std::cerr << "error: code=" << code << " msg=" << msg << "\n";
}

struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool deterministic = false;
  bool dump_config = false;
};

struct Resolved {
  CliConfig cfg;
  bool model_explicit = false;
};

Resolved Resolve(const GlobalOptions& g) {
  Resolved r;
  if (!g.config_path.empty()) {
    std::vector<std::string> keys;
    r.cfg = LoadIni(g.config_path, &keys);
    for (const std::string& key : keys)
      if (key.rfind("model.", 0) == 0) r.model_explicit = true;
  }
  for (const std::string& o : g.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) Fail(ErrorCode::kConfig, "--set expects section.key=value, got '" + o + "'");
    const std::string key = o.substr(0, eq);
    SetValue(r.cfg, key, o.substr(eq + 1));
    if (key.rfind("model.", 0) == 0) r.model_explicit = true;
  }
  if (g.seed) {
    r.cfg.synth.seed = *g.seed;
    r.cfg.train.seed = *g.seed;
  }
  if (g.jobs) r.cfg.synth.jobs = r.cfg.train.jobs = r.cfg.eval.jobs = *g.jobs;
  if (g.deterministic) r.cfg.synth.jobs = r.cfg.train.jobs = r.cfg.eval.jobs = 1;
  r.cfg.Validate();
  return r;
}

bool InSplit(const std::string& split, Split want) {
  return want == Split::kAll || (want == Split::kTrain) == (split == "train");
}

int RunSynth(const CliConfig& cfg, const fs::path& out) {
  const echo::Manifest m = echo::SynthDataset(cfg.synth, out);
  std::printf("synth: wrote %zu items to %s\n", m.items().size(), out.string().c_str());
  return 0;
}

int RunLaec(const CliConfig& cfg, const fs::path& manifest_path) {
  echo::Manifest m = echo::Manifest::Load(manifest_path);
  if (m.items().empty()) Fail(ErrorCode::kEmptyInput, "manifest has no items: " + manifest_path.string());
  std::vector<double> attenuation(m.items().size(), std::nan(""));
  ParallelFor(m.items().size(), cfg.synth.jobs, [&](std::size_t i) {
    echo::ScenarioItem item = m.LoadItem(i);
    laec::RunLaec(item, cfg.laec);
    m.StoreSignals(i, item, {"s_aec", "d_hat"});
    double ed = 0.0, err = 0.0;
    for (std::size_t n = 0; n < item.d.size(); ++n) {
      ed += item.d[n] * item.d[n];
      err += (item.d[n] - item.d_hat[n]) * (item.d[n] - item.d_hat[n]);
    }
    if (ed > 0.0 && err > 0.0) attenuation[i] = 10.0 * std::log10(ed / err);
  });
  m.Save(manifest_path);
  std::vector<double> finite;
  for (double a : attenuation)
    if (std::isfinite(a)) finite.push_back(a);
  const metrics::Summary s = metrics::Summarize(finite);
  std::printf("laec: %zu items, echo attenuation quartiles %.2f / %.2f / %.2f dB\n", m.items().size(),
              s.q25, s.q50, s.q75);
  return 0;
}

std::vector<echo::ScenarioItem> LoadItems(const echo::Manifest& m, Split split) {
  std::vector<echo::ScenarioItem> items;
  for (std::size_t i = 0; i < m.items().size(); ++i)
    if (InSplit(m.items()[i].split, split)) items.push_back(m.LoadItem(i));
  return items;
}

int RunTrain(const CliConfig& cfg, const fs::path& manifest_path, const fs::path& out) {
  const echo::Manifest m = echo::Manifest::Load(manifest_path);
  const auto train_items = LoadItems(m, Split::kTrain);
  const auto val_items = LoadItems(m, Split::kVal);
  if (std::none_of(train_items.begin(), train_items.end(), [](const auto& it) { return it.has_laec; }))
    Fail(ErrorCode::kInvalidArgument, "no training items carry LAEC output; run `tasres laec` first");
  fs::create_directories(out);
  {
    std::ofstream ini(out / "config.ini");
    ini << DumpIni(cfg);
  }
  train::TrainConfig tc = cfg.train;
  tc.checkpoint_dir = out;
  model::TasNet net(cfg.model, tc.seed);
  std::printf("train: %s, %zu parameters, %zu train / %zu val items\n",
              model::VariantName(cfg.model.variant), net.params().NumScalars(),
              train_items.size(), val_items.size());
  const auto result = train::Train(net, train_items, val_items, tc, [](const train::CurvePoint& p) {
    if (p.val_loss)
      std::printf("epoch %d step %lld val_loss %.4f lr %.3g\n", p.epoch, static_cast<long long>(p.step),
                  *p.val_loss, p.lr);
    std::fflush(stdout);
  });
  train::SaveModel(out / "model.ckpt", net);
  std::printf("train: %lld steps, %d epochs, model written to %s\n", static_cast<long long>(result.steps),
              result.epochs_run, (out / "model.ckpt").string().c_str());
  return 0;
}

model::TasNet LoadChecked(const fs::path& checkpoint, const Resolved& r) {
  model::TasNet net = train::LoadModel(checkpoint);
  if (r.model_explicit &&
      model::SerializeModelConfig(net.config()) != model::SerializeModelConfig(r.cfg.model))
    Fail(ErrorCode::kCheckpointMismatch,
         "model config differs from the one stored in " + checkpoint.string());
  return net;
}

int RunEval(const Resolved& r, const fs::path& manifest_path, const fs::path& checkpoint,
            const fs::path& out) {
  const echo::Manifest m = echo::Manifest::Load(manifest_path);
  const auto items = LoadItems(m, r.cfg.eval_split);
  if (items.empty()) Fail(ErrorCode::kEmptyInput, "no items in the selected split");
  for (const auto& it : items)
    if (!it.has_laec) Fail(ErrorCode::kInvalidArgument, "item " + it.id + " has no LAEC output; run `tasres laec` first");
  const model::TasNet net = LoadChecked(checkpoint, r);
  const metrics::MetricsReport report = train::Evaluate(net, items, r.cfg.eval);
  const std::string problem = report.CheckInvariants();
  fs::create_directories(out);
  report.WriteCsv(out / "metrics.csv");
  report.WriteTable(out / "metrics.txt");
  std::cout << report.ToTable();
  if (!problem.empty()) Fail(ErrorCode::kNumerical, "metrics report invariant violated: " + problem);
  return 0;
}

int RunInfer(const Resolved& r, const fs::path& s_aec_path, const fs::path& d_hat_path,
             const fs::path& checkpoint, const fs::path& out) {
  const model::TasNet net = LoadChecked(checkpoint, r);
  const Waveform s_aec = ReadWav(s_aec_path);
  Waveform d_hat;
  if (!d_hat_path.empty()) d_hat = ReadWav(d_hat_path);
  const bool needs_b = net.config().variant == model::Variant::kMI;
  if (needs_b && d_hat_path.empty()) Fail(ErrorCode::kInvalidArgument, "variant MI needs --d-hat");
  if (needs_b && d_hat.size() != s_aec.size())
    Fail(ErrorCode::kInvalidArgument, "s_aec and d_hat lengths differ");
  if (s_aec.sample_rate != kDefaultSampleRate)
    Fail(ErrorCode::kUnsupportedFormat, "expected 16 kHz input, got " + std::to_string(s_aec.sample_rate));
  const auto s_hat = net.Infer(s_aec.samples, needs_b ? std::span<const double>(d_hat.samples)
                                                      : std::span<const double>());
  WriteWav(out, Waveform(s_hat, s_aec.sample_rate));
  std::printf("infer: wrote %zu samples to %s\n", s_hat.size(), out.string().c_str());
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"tasres: residual echo suppression pipeline"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("-c,--config", g.config_path, "INI config with [model] [train] [synth] [laec] [eval]");
  app.add_option("--set", g.overrides, "Override one key, e.g. --set train.epochs=3")->take_all();
  app.add_option("--seed", g.seed, "Master seed for synthesis and training");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", g.deterministic, "Single-threaded, bit-reproducible run");
  app.add_flag("--dump-config", g.dump_config, "Print the effective config and exit");

  std::string out, manifest, checkpoint, s_aec, d_hat;
  std::optional<int> items;
  auto* synth = app.add_subcommand("synth", "Synthesize a dataset and its manifest");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--items", items, "Number of items")->check(CLI::PositiveNumber);
  auto* laec = app.add_subcommand("laec", "Run the FDKF linear echo canceller over a manifest");
  laec->add_option("--manifest", manifest, "manifest.jsonl")->required()->check(CLI::ExistingFile);
  auto* train = app.add_subcommand("train", "Train a model on the train split of a manifest");
  train->add_option("--manifest", manifest, "manifest.jsonl")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out, "Run directory for checkpoints and the loss curve")->required();
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint and write a metrics report");
  eval->add_option("--manifest", manifest, "manifest.jsonl")->required()->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out, "Report directory")->required();
  auto* infer = app.add_subcommand("infer", "Enhance one LAEC output");
  infer->add_option("--s-aec", s_aec, "LAEC residual WAV")->required()->check(CLI::ExistingFile);
  infer->add_option("--d-hat", d_hat, "LAEC echo estimate WAV (variant MI)")->check(CLI::ExistingFile);
  infer->add_option("--checkpoint", checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  infer->add_option("--out", out, "Output WAV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ReportError("usage", e.what());
    return kUsageExit;
  }

  try {
    if (items) g.overrides.push_back("synth.items=" + std::to_string(*items));
    const Resolved r = Resolve(g);
    if (g.dump_config) {
      std::cout << DumpIni(r.cfg);
      return 0;
    }
    if (synth->parsed()) return RunSynth(r.cfg, out);
    if (laec->parsed()) return RunLaec(r.cfg, manifest);
    if (train->parsed()) return RunTrain(r.cfg, manifest, out);
    if (eval->parsed()) return RunEval(r, manifest, checkpoint, out);
    if (infer->parsed()) return RunInfer(r, s_aec, d_hat, checkpoint, out);
    std::cout << app.help();
    return kUsageExit;
  } catch (const Error& e) {
    ReportError(ErrorCodeName(e.code()), e.what());
    return ExitCode(e.code());
  } catch (const std::exception& e) {
    ReportError("internal", e.what());
    return 1;
  }
}

}  // namespace
}  // namespace tasres::cli

int main(int argc, char** argv) { return tasres::cli::Main(argc, argv); }
