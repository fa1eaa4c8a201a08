// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_TRAIN_TRAINER_H_
#define TASRES_TRAIN_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tasres/echo/scenario.h"
#include "tasres/metrics/loss.h"
#include "tasres/metrics/report.h"
#include "tasres/model/tasnet.h"
#include "tasres/nn/optim.h"

namespace tasres::train {

struct TrainConfig {
  int epochs = 5;
  // Stop after this many optimizer steps; 0 means run all epochs.
  std::int64_t max_steps = 0;
  int batch_items = 2;
  // Items drawn per epoch (concatenated shuffles); 0 means one pass.
  int epoch_items = 0;
  // Random crop length per item; 0 trains on whole items.
  double segment_seconds = 4.0;
  double lr_init = 1e-3;
  int lr_halve_patience = 4;
  double clip_norm = 5.0;
  metrics::LossConfig loss;
  std::uint64_t seed = 0;
  // Worker threads for the items of a batch. Results do not depend on it.
  int jobs = 1;
  // Empty disables checkpoints and the loss curve file.
  std::filesystem::path checkpoint_dir;

  void Validate() const;
};

// Halves the learning rate when the best validation loss has not improved
// for `patience` consecutive epochs, then restarts the count.
class LrScheduler {
 public:
  LrScheduler(double lr_init, int patience);

  // Returns true when this epoch triggered a halving.
  bool EndEpoch(double val_loss);

  double lr() const { return lr_; }
  int halvings() const { return halvings_; }
  int epochs_since_improvement() const { return since_; }
  std::optional<double> best() const { return best_; }

 private:
  double lr_;
  int patience_;
  int halvings_ = 0;
  int since_ = 0;
  std::optional<double> best_;
};

struct CurvePoint {
  std::int64_t step = 0;
  int epoch = 0;
  std::optional<double> train_loss;
  std::optional<double> val_loss;
  double lr = 0.0;
  double grad_norm = 0.0;  // before clipping
};

struct TrainResult {
  std::vector<CurvePoint> curve;
  std::int64_t steps = 0;
  int epochs_run = 0;
  double final_lr = 0.0;
  std::optional<double> best_val_loss;
  std::filesystem::path last_checkpoint;
};

// Weighted-intermediate objective of one item through the full network, with backward run
// and parameter gradients accumulated into the model's store scaled by
// `grad_scale` (0 skips backward). Returns the total loss.
double ItemLoss(model::TasNet& net, std::span<const double> s_aec, std::span<const double> d_hat,
                std::span<const double> s, const metrics::LossConfig& cfg, double grad_scale,
                metrics::LossBreakdown* breakdown = nullptr);

// Mean training loss over whole items, no gradients.
double MeanLoss(const model::TasNet& net, const std::vector<const echo::ScenarioItem*>& items,
                const metrics::LossConfig& cfg, int jobs);

using ProgressFn = std::function<void(const CurvePoint&)>;

// Trains on the double-talk items of `train_items` that carry LAEC outputs.
// Validation uses `val_items` (double-talk only); without them the epoch's
// mean training loss drives the scheduler. A non-finite loss stops training
// with kNumerical after writing the last good parameters to
// checkpoint_dir/last_good.ckpt.
TrainResult Train(model::TasNet& net, const std::vector<echo::ScenarioItem>& train_items,
                  const std::vector<echo::ScenarioItem>& val_items, const TrainConfig& cfg,
                  const ProgressFn& progress = {});

void WriteLossCurve(const std::filesystem::path& path, const std::vector<CurvePoint>& curve);

enum class EvalMode {
  kModel,        // trained network
  kPassThrough,  // mask fixed to 1: decode(encode(s_aec))
  kOracleMask,   // mask = clamp(encode(s) / encode(s_aec), 0, 1)
};

struct EvalConfig {
  EvalMode mode = EvalMode::kModel;
  double erle_exclude_seconds = 2.0;
  int jobs = 1;
};

// Per-item metrics: SISNR, SDR-proj and STOI for double-talk items, ERLE
// and extra ERLE over the LAEC for single-talk items.
metrics::MetricsReport Evaluate(const model::TasNet& net,
                                const std::vector<echo::ScenarioItem>& items,
                                const EvalConfig& cfg);

// Estimated near-end signal of one item under the given mode.
std::vector<double> Enhance(const model::TasNet& net, const echo::ScenarioItem& item,
                            EvalMode mode);

// Checkpoint helpers storing the model config as metadata.
void SaveModel(const std::filesystem::path& path, const model::TasNet& net);
model::TasNet LoadModel(const std::filesystem::path& path);

}  // namespace tasres::train

#endif  // TASRES_TRAIN_TRAINER_H_
