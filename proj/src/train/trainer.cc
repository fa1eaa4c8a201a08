// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/train/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>

#include "tasres/audio/rng.h"
#include "tasres/error.h"
#include "tasres/metrics/metrics.h"
#include "tasres/nn/checkpoint.h"
#include "tasres/parallel.h"

namespace tasres::train {

using nn::Graph;
using nn::Matrix;

void TrainConfig::Validate() const {
  if (epochs <= 0) Fail(ErrorCode::kConfig, "train.epochs must be positive");
  if (max_steps < 0) Fail(ErrorCode::kConfig, "train.max_steps must be >= 0");
  if (batch_items <= 0) Fail(ErrorCode::kConfig, "train.batch_items must be positive");
  if (epoch_items < 0) Fail(ErrorCode::kConfig, "train.epoch_items must be >= 0");
  if (segment_seconds < 0.0) Fail(ErrorCode::kConfig, "train.segment_seconds must be >= 0");
  if (!(lr_init > 0.0)) Fail(ErrorCode::kConfig, "train.lr_init must be positive");
  if (lr_halve_patience < 1) Fail(ErrorCode::kConfig, "train.lr_halve_patience must be >= 1");
  if (!(clip_norm > 0.0)) Fail(ErrorCode::kConfig, "train.clip_norm must be positive");
  if (!(loss.w >= 0.0)) Fail(ErrorCode::kConfig, "train.loss_w must be >= 0");
  if (jobs < 1) Fail(ErrorCode::kConfig, "jobs must be >= 1");
}

LrScheduler::LrScheduler(double lr_init, int patience) : lr_(lr_init), patience_(patience) {
  Require(lr_init > 0.0 && patience >= 1, "scheduler: bad learning rate or patience");
}

bool LrScheduler::EndEpoch(double val_loss) {
  if (!best_ || val_loss < *best_) {
    best_ = val_loss;
    since_ = 0;
    return false;
  }
  if (++since_ < patience_) return false;
  lr_ *= 0.5;
  ++halvings_;
  since_ = 0;
  return true;
}

namespace {

std::size_t ExpectedIntermediates(const model::TasNet& net) {
  const auto& c = net.config();
  return c.variant == model::Variant::kO ? 0 : static_cast<std::size_t>(c.repeats - 1);
}

struct ItemPass {
  Graph graph;
  double loss = 0.0;
};

// Forward plus backward of one item; gradients stay in the graph.
std::unique_ptr<ItemPass> RunItem(const model::TasNet& net, std::span<const double> s_aec,
                                  std::span<const double> d_hat, std::span<const double> s,
                                  const metrics::LossConfig& cfg, bool backward,
                                  metrics::LossBreakdown* breakdown) {
  auto pass = std::make_unique<ItemPass>();
  const model::ForwardOutput out = net.Forward(pass->graph, s_aec, d_hat);
  const Matrix ref = Eigen::Map<const Matrix>(s.data(), static_cast<Eigen::Index>(s.size()), 1);
  const nn::Var total =
      metrics::TotalLoss(pass->graph, out, ref, ExpectedIntermediates(net), cfg, breakdown);
  pass->loss = pass->graph.value(total)(0, 0);
  if (backward && std::isfinite(pass->loss)) pass->graph.Backward(total);
  return pass;
}

bool Usable(const echo::ScenarioItem& item) {
  return item.has_near_end && item.has_laec && Energy(item.s.view()) > 0.0;
}

std::string FormatOptional(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

}  // namespace

double ItemLoss(model::TasNet& net, std::span<const double> s_aec, std::span<const double> d_hat,
                std::span<const double> s, const metrics::LossConfig& cfg, double grad_scale,
                metrics::LossBreakdown* breakdown) {
  auto pass = RunItem(net, s_aec, d_hat, s, cfg, grad_scale != 0.0, breakdown);
  if (grad_scale != 0.0 && pass->graph.backward_done())
    pass->graph.AccumulateInto(net.params(), grad_scale);
  return pass->loss;
}

double MeanLoss(const model::TasNet& net, const std::vector<const echo::ScenarioItem*>& items,
                const metrics::LossConfig& cfg, int jobs) {
  if (items.empty()) Fail(ErrorCode::kEmptyInput, "no items to evaluate the loss on");
  std::vector<double> losses(items.size());
  ParallelFor(items.size(), jobs, [&](std::size_t i) {
    const echo::ScenarioItem& it = *items[i];
    losses[i] = RunItem(net, it.s_aec.view(), it.d_hat.view(), it.s.view(), cfg, false, nullptr)
                    ->loss;
  });
  return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
}

TrainResult Train(model::TasNet& net, const std::vector<echo::ScenarioItem>& train_items,
                  const std::vector<echo::ScenarioItem>& val_items, const TrainConfig& cfg,
                  const ProgressFn& progress) {
  cfg.Validate();
  std::vector<const echo::ScenarioItem*> train, val;
  for (const auto& it : train_items)
    if (Usable(it)) train.push_back(&it);
  for (const auto& it : val_items)
    if (Usable(it)) val.push_back(&it);
  if (train.empty())
    Fail(ErrorCode::kEmptyInput, "no double-talk training items with LAEC outputs");

  const bool write_files = !cfg.checkpoint_dir.empty();
  if (write_files) std::filesystem::create_directories(cfg.checkpoint_dir);

  nn::Adam adam;
  LrScheduler scheduler(cfg.lr_init, cfg.lr_halve_patience);
  TrainResult result;
  nn::ParameterStore last_good = net.params();
  const std::size_t batch = std::min<std::size_t>(cfg.batch_items, train.size());

  auto abort_numerical = [&](const std::string& what) {
    if (write_files) {
      net.params() = last_good;
      SaveModel(cfg.checkpoint_dir / "last_good.ckpt", net);
      WriteLossCurve(cfg.checkpoint_dir / "loss_curve.csv", result.curve);
    }
    Fail(ErrorCode::kNumerical, what + " at step " + std::to_string(result.steps + 1));
  };

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng order_rng = Rng::ForStream(cfg.seed, static_cast<std::uint64_t>(epoch));
    // Concatenated shuffles of the training set, cut to epoch_items.
    const std::size_t wanted = cfg.epoch_items > 0 ? static_cast<std::size_t>(cfg.epoch_items)
                                                   : train.size();
    std::vector<std::size_t> order;
    while (order.size() < wanted) {
      std::vector<std::size_t> perm(train.size());
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[order_rng.UniformInt(i)]);
      order.insert(order.end(), perm.begin(), perm.end());
    }
    order.resize(wanted);

    double epoch_loss = 0.0;
    std::size_t epoch_batches = 0;
    bool stop = false;
    for (std::size_t start = 0; start + batch <= order.size(); start += batch) {
      // Crops are drawn up front so the result does not depend on jobs.
      std::vector<std::size_t> offsets(batch, 0), lengths(batch);
      for (std::size_t b = 0; b < batch; ++b) {
        const echo::ScenarioItem& it = *train[order[start + b]];
        const std::size_t n = it.s_aec.size();
        const auto seg = static_cast<std::size_t>(
            std::llround(cfg.segment_seconds * it.s_aec.sample_rate));
        lengths[b] = (seg == 0 || seg >= n) ? n : seg;
        if (lengths[b] < n) offsets[b] = order_rng.UniformInt(n - lengths[b] + 1);
      }
      std::vector<std::unique_ptr<ItemPass>> passes(batch);
      ParallelFor(batch, cfg.jobs, [&](std::size_t b) {
        const echo::ScenarioItem& it = *train[order[start + b]];
        auto slice = [&](const Waveform& w) {
          return w.view().subspan(offsets[b], lengths[b]);
        };
        const bool needs_b = net.config().variant == model::Variant::kMI;
        passes[b] = RunItem(net, slice(it.s_aec), needs_b ? slice(it.d_hat) : slice(it.s_aec),
                            slice(it.s), cfg.loss, true, nullptr);
      });
      double loss = 0.0;
      for (const auto& p : passes) loss += p->loss;
      loss /= static_cast<double>(batch);
      if (!std::isfinite(loss)) abort_numerical("non-finite training loss");

      net.params().ZeroGrad();
      for (const auto& p : passes)
        p->graph.AccumulateInto(net.params(), 1.0 / static_cast<double>(batch));
      const double norm = nn::ClipGlobalNorm(net.params(), cfg.clip_norm);
      if (!std::isfinite(norm)) abort_numerical("non-finite gradient");
      last_good = net.params();
      adam.Step(net.params(), scheduler.lr());
      ++result.steps;

      CurvePoint point{result.steps, epoch, loss, std::nullopt, scheduler.lr(), norm};
      result.curve.push_back(point);
      if (progress) progress(point);
      epoch_loss += loss;
      ++epoch_batches;
      if (cfg.max_steps > 0 && result.steps >= cfg.max_steps) {
        stop = true;
        break;
      }
    }

    const double val_loss = val.empty() ? epoch_loss / static_cast<double>(epoch_batches)
                                        : MeanLoss(net, val, cfg.loss, cfg.jobs);
    if (!std::isfinite(val_loss)) abort_numerical("non-finite validation loss");
    scheduler.EndEpoch(val_loss);
    CurvePoint point{result.steps, epoch, std::nullopt, val_loss, scheduler.lr(), 0.0};
    result.curve.push_back(point);
    if (progress) progress(point);
    result.epochs_run = epoch;
    if (write_files) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%03d.ckpt", epoch);
      SaveModel(cfg.checkpoint_dir / name, net);
      SaveModel(cfg.checkpoint_dir / "final.ckpt", net);
      result.last_checkpoint = cfg.checkpoint_dir / "final.ckpt";
      WriteLossCurve(cfg.checkpoint_dir / "loss_curve.csv", result.curve);
    }
    if (stop) break;
  }
  result.final_lr = scheduler.lr();
  result.best_val_loss = scheduler.best();
  return result;
}

void WriteLossCurve(const std::filesystem::path& path, const std::vector<CurvePoint>& curve) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << "step,epoch,train_loss,val_loss,lr,grad_norm\n";
  char buf[64];
  for (const CurvePoint& p : curve) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.lr);
    out << p.step << "," << p.epoch << "," << FormatOptional(p.train_loss) << ","
        << FormatOptional(p.val_loss) << "," << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", p.grad_norm);
    out << buf << "\n";
  }
}

std::vector<double> Enhance(const model::TasNet& net, const echo::ScenarioItem& item,
                            EvalMode mode) {
  const auto& s_aec = item.s_aec.samples;
  switch (mode) {
    case EvalMode::kModel:
      return net.Infer(s_aec, net.config().variant == model::Variant::kMI
                                  ? std::span<const double>(item.d_hat.samples)
                                  : std::span<const double>());
    case EvalMode::kPassThrough:
      return net.Decode(net.Encode(s_aec), s_aec.size());
    case EvalMode::kOracleMask: {
      const Matrix a = net.Encode(s_aec);
      const Matrix s = net.Encode(item.s.samples);
      Matrix mask(a.rows(), a.cols());
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double den = a.data()[i];
        mask.data()[i] = den == 0.0 ? 0.0 : std::clamp(s.data()[i] / den, 0.0, 1.0);
      }
      return net.Decode(mask.cwiseProduct(a), s_aec.size());
    }
  }
  return {};
}

metrics::MetricsReport Evaluate(const model::TasNet& net,
                                const std::vector<echo::ScenarioItem>& items,
                                const EvalConfig& cfg) {
  std::vector<metrics::ItemMetrics> rows(items.size());
  ParallelFor(items.size(), cfg.jobs, [&](std::size_t i) {
    const echo::ScenarioItem& it = items[i];
    if (!it.has_laec) Fail(ErrorCode::kInvalidArgument, it.id + ": missing LAEC outputs");
    const std::vector<double> est = Enhance(net, it, cfg.mode);
    const double fs = it.y.sample_rate;
    metrics::ItemMetrics& m = rows[i];
    m.id = it.id;
    m.talk = it.has_near_end ? "double" : "single";
    m.far_type = it.far_type;
    if (it.has_near_end) {
      m.ser_db = it.mix.ser_db;
      m.sisnr_db = metrics::Sisnr(est, it.s.samples);
      m.sdr_proj_db = metrics::SdrProj(est, it.s.samples);
      m.stoi = metrics::Stoi(it.s.samples, est, fs);
      m.sisnr_aec_db = metrics::Sisnr(it.s_aec.samples, it.s.samples);
      m.stoi_aec = metrics::Stoi(it.s.samples, it.s_aec.samples, fs);
    } else {
      m.erle_db = metrics::Erle(it.y.samples, est, fs, cfg.erle_exclude_seconds);
      m.extra_erle_db =
          *m.erle_db - metrics::Erle(it.y.samples, it.s_aec.samples, fs, cfg.erle_exclude_seconds);
    }
  });
  metrics::MetricsReport report;
  for (auto& r : rows) report.Add(std::move(r));
  return report;
}

void SaveModel(const std::filesystem::path& path, const model::TasNet& net) {
  nn::SaveCheckpoint(path, net.params(), model::SerializeModelConfig(net.config()));
}

model::TasNet LoadModel(const std::filesystem::path& path) {
  const model::ModelConfig cfg = model::ParseModelConfig(nn::ReadCheckpointMetadata(path));
  model::TasNet net(cfg);
  nn::LoadCheckpoint(path, net.params());
  return net;
}

}  // namespace tasres::train
