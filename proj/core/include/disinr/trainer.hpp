#pragma once

#include <optional>
#include <string>
#include <vector>

#include "disinr/dataset.hpp"
#include "disinr/metrics.hpp"
#include "disinr/models.hpp"
#include "disinr/optimizer.hpp"
#include "disinr/runlog.hpp"

namespace disinr {

// The metric-space view of a reconstruction and a record's ground truth:
// both sides [H x W], a complex reconstruction reduced to magnitude with both
// sides scaled by the truth's peak. Empty when the record carries no truth.
std::optional<std::pair<Tensor, Tensor>> metric_images(const Tensor& recon,
                                                       const MeasurementRecord& record);

// PSNR / SSIM of an image-domain reconstruction against a record's ground
// truth, over the metric_images view. NaN when the record carries no truth.
double reconstruction_psnr(const Tensor& recon, const MeasurementRecord& record);
double reconstruction_ssim(const Tensor& recon, const MeasurementRecord& record);

struct PretrainOutcome {
  Model model;
  RunLog log;
};

// Joint fit of the shared pair plus one subject encoder per record. Every
// iteration runs a single forward/backward over all records (shared features
// computed once, reused by each subject head) followed by one Adam step.
// Model subjects "0".."N-1" correspond to records by position; the log
// carries record ids. NaiveINR has no shared pair and is rejected here; use
// fit_single per record instead.
PretrainOutcome pretrain(const ModelConfig& mcfg,
                         const std::vector<MeasurementRecord>& records,
                         const TrainConfig& tcfg);

// From-scratch fit of a one-subject model against a single record (the
// baseline path; accepts any model kind).
PretrainOutcome fit_single(const ModelConfig& mcfg, const MeasurementRecord& record,
                           const TrainConfig& tcfg);

struct AdaptOptions {
  std::string subject = "test";          // id of the spawned partition
  bool freeze_shared = true;
  std::optional<std::string> copy_from;  // start from an existing subject's weights
};

struct AdaptOutcome {
  Tensor reconstruction;  // image domain, [H x W] or [H x W x 2]
  RunLog log;
};

// Test-time fit of one new subject partition against a single record. Every
// existing partition is frozen first; the shared pair is unfrozen again when
// `freeze_shared` is false. The model is adapted in place and keeps the new
// subject afterwards.
AdaptOutcome adapt(Model& model, const MeasurementRecord& record, const TrainConfig& tcfg,
                   const AdaptOptions& opts = {});

enum class AblationMode {
  FreezeAllShared,        // disentangled model, shared pair frozen
  FreezeNone,             // disentangled model, everything trainable
  StrainerFreezeEncoder,  // shared-encoder model, encoder frozen
  StrainerFull,           // shared-encoder model, everything trainable
};

std::string to_string(AblationMode mode);

// Adapts a fresh clone of `pretrained` to every record under one freezing
// mode and reports per-record PSNR/SSIM against ground truth. The freeze
// modes expect a DisINR model, the strainer modes a StrainerLike one.
MetricReport run_ablation(AblationMode mode, const Model& pretrained,
                          const std::vector<MeasurementRecord>& records,
                          const TrainConfig& tcfg);

// All four modes on the same records; one report per mode in enum order.
std::vector<MetricReport> run_ablation_suite(const Model& disinr, const Model& strainer,
                                             const std::vector<MeasurementRecord>& records,
                                             const TrainConfig& tcfg);

}  // namespace disinr
