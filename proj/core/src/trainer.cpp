#include "disinr/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>

#include "disinr/checkpoint.hpp"
#include "disinr/grid.hpp"
#include "disinr/ops.hpp"
#include "disinr/rng.hpp"
#include "disinr/tape.hpp"

namespace disinr {

namespace {

constexpr double kDivergeLoss = 1e6;

// One (subject head, record, operator) binding inside a run.
struct TrainItem {
  std::string subject;
  const MeasurementRecord* record = nullptr;
  std::shared_ptr<const LinearOperator> op;
};

std::string subject_partition_name(const std::string& subject) {
  return "subject:" + subject;
}

// Model output channels required by an operator's input domain.
int required_channels(const LinearOperator& op) {
  const Shape in = op.in_shape();
  if (in.size() == 2) return 1;
  if (in.size() == 3 && in[2] == 2) return 2;
  throw DimensionError("unsupported operator input domain " + shape_str(in));
}

void check_items(const Model& model, const std::vector<TrainItem>& items) {
  const ModelConfig& cfg = model.config();
  const Shape first = items.front().op->in_shape();
  for (const TrainItem& item : items) {
    const LinearOperator& op = *item.op;
    if (op.in_shape() != first) {
      throw ConfigError("records mix image domains " + shape_str(first) + " and " +
                        shape_str(op.in_shape()));
    }
    if (required_channels(op) != cfg.channels) {
      throw ConfigError("operator '" + op.kind() + "' needs " +
                        std::to_string(required_channels(op)) +
                        " output channels, model has " + std::to_string(cfg.channels));
    }
    op.check_out(item.record->y);
  }
}

// True when every partition feeding shared_features is frozen, so its output
// is constant across iterations and can be computed once off-tape.
bool shared_inputs_frozen(const Model& model) {
  const std::string name =
      model.config().kind == ModelKind::NaiveINR ? "network" : "shared_encoder";
  return model.params().get(name).frozen;
}

struct LoopResult {
  RunLog log;
  std::vector<Tensor> final_images;  // one per item, image domain, off-tape
};

// The shared optimization loop: one joint forward/backward over all items
// per iteration, then one Adam step over the unfrozen partitions.
LoopResult run_loop(Model& model, const std::vector<TrainItem>& items,
                    const TrainConfig& tcfg) {
  tcfg.validate();
  check_items(model, items);

  const Shape in_shape = items.front().op->in_shape();
  const CoordinateGrid grid = make_grid({in_shape[0], in_shape[1]});
  Adam adam(model.params(), tcfg);

  // Constant shared features never enter the tape; fresh heads still do.
  Tensor cached_shared;
  if (shared_inputs_frozen(model)) cached_shared = model.shared_features(grid.coords);

  LoopResult result;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&start] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };

  std::vector<Tensor> images(items.size());
  std::vector<double> losses(items.size(), 0.0);
  for (int iter = 0; iter < tcfg.iterations; ++iter) {
    model.params().zero_grad();
    Tape tape;
    Tape::Scope scope(tape);

    Tensor shared =
        cached_shared.defined() ? cached_shared : model.shared_features(grid.coords);
    Tensor total;
    for (std::size_t i = 0; i < items.size(); ++i) {
      Tensor out = model.forward_from_shared(items[i].subject, shared, grid.coords);
      Tensor img = ops::reshape(out, in_shape);
      Tensor y_hat = ops::apply_operator(items[i].op, img);
      Tensor loss = ops::l1_loss(y_hat, items[i].record->y);
      losses[i] = loss.item();
      images[i] = img;
      total = total.defined() ? ops::add(total, loss) : loss;
    }

    const double total_loss = total.item();
    if (!std::isfinite(total_loss) || total_loss > kDivergeLoss) {
      if (!tcfg.diverge_dump_path.empty()) save_checkpoint(tcfg.diverge_dump_path, model);
      throw NumericalError("training diverged at iteration " + std::to_string(iter) +
                           " (loss " + std::to_string(total_loss) + ")");
    }

    tape.backward(total);
    adam.step(iter);

    if (iter % tcfg.log_interval == 0 || iter == tcfg.iterations - 1) {
      const double wall = elapsed_ms();
      for (std::size_t i = 0; i < items.size(); ++i) {
        result.log.append({iter, items[i].record->id, losses[i],
                           reconstruction_psnr(images[i], *items[i].record), wall});
      }
    }
  }

  // Reconstructions reflect the last update; recompute off-tape.
  Tensor shared = cached_shared.defined() ? cached_shared : model.shared_features(grid.coords);
  for (const TrainItem& item : items) {
    Tensor out = model.forward_from_shared(item.subject, shared, grid.coords);
    result.final_images.push_back(ops::reshape(out, in_shape).clone());
  }
  return result;
}

}  // namespace

// A complex reconstruction is reduced to its magnitude and both sides are
// scaled by the ground-truth peak (the magnitude-image convention).
std::optional<std::pair<Tensor, Tensor>> metric_images(const Tensor& recon,
                                                       const MeasurementRecord& record) {
  if (!record.ground_truth.defined()) return std::nullopt;
  Tensor gt = record.ground_truth;
  if (gt.ndim() == 3) gt = complex_magnitude(gt);
  if (gt.ndim() != 2) {
    throw DimensionError("ground truth must be [H x W] or [H x W x 2], got " +
                         shape_str(record.ground_truth.shape()));
  }
  if (recon.ndim() == 2 && recon.shape() == gt.shape() &&
      record.ground_truth.ndim() == 2) {
    return std::make_pair(recon, gt);
  }
  if (recon.ndim() != 3 || recon.dim(2) != 2 || recon.dim(0) != gt.dim(0) ||
      recon.dim(1) != gt.dim(1)) {
    throw DimensionError("reconstruction shape " + shape_str(recon.shape()) +
                         " does not match ground truth " +
                         shape_str(record.ground_truth.shape()));
  }
  Tensor rm = complex_magnitude(recon);
  double peak = 0.0;
  for (real v : gt.data()) peak = std::max(peak, static_cast<double>(v));
  if (peak > 0.0) {
    rm = normalize_by(rm, peak);
    gt = normalize_by(gt, peak);
  }
  return std::make_pair(std::move(rm), std::move(gt));
}

double reconstruction_psnr(const Tensor& recon, const MeasurementRecord& record) {
  auto pair = metric_images(recon, record);
  if (!pair) return std::numeric_limits<double>::quiet_NaN();
  return psnr(pair->first, pair->second, 1.0);
}

double reconstruction_ssim(const Tensor& recon, const MeasurementRecord& record) {
  auto pair = metric_images(recon, record);
  if (!pair) return std::numeric_limits<double>::quiet_NaN();
  return ssim(pair->first, pair->second, 1.0);
}

PretrainOutcome pretrain(const ModelConfig& mcfg, const std::vector<MeasurementRecord>& records,
                         const TrainConfig& tcfg) {
  mcfg.validate();
  if (records.empty()) throw ConfigError("pretrain needs at least one record");
  if (mcfg.kind == ModelKind::NaiveINR) {
    throw ConfigError("naive INR has no shared pair to pre-train; fit records one at a time");
  }
  Model model =
      Model::build(mcfg, static_cast<int>(records.size()), sub_seed(tcfg.seed, "model_init"));
  std::vector<TrainItem> items;
  items.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    items.push_back({std::to_string(i), &records[i], records[i].op.instantiate()});
  }
  LoopResult res = run_loop(model, items, tcfg);
  return {std::move(model), std::move(res.log)};
}

PretrainOutcome fit_single(const ModelConfig& mcfg, const MeasurementRecord& record,
                           const TrainConfig& tcfg) {
  mcfg.validate();
  Model model = Model::build(mcfg, 1, sub_seed(tcfg.seed, "model_init"));
  std::vector<TrainItem> items{{"0", &record, record.op.instantiate()}};
  LoopResult res = run_loop(model, items, tcfg);
  return {std::move(model), std::move(res.log)};
}

AdaptOutcome adapt(Model& model, const MeasurementRecord& record, const TrainConfig& tcfg,
                   const AdaptOptions& opts) {
  tcfg.validate();
  model.spawn_subject(opts.subject, sub_seed(tcfg.seed, "adapt:" + opts.subject),
                      opts.copy_from);

  ParameterSet& params = model.params();
  params.freeze_all();
  params.unfreeze({subject_partition_name(opts.subject)});
  if (!opts.freeze_shared) {
    for (const char* name : {"shared_encoder", "shared_decoder"}) {
      if (params.has(name)) params.unfreeze({name});
    }
  }

  std::vector<TrainItem> items{{opts.subject, &record, record.op.instantiate()}};
  LoopResult res = run_loop(model, items, tcfg);
  return {std::move(res.final_images.front()), std::move(res.log)};
}

std::string to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::FreezeAllShared: return "freeze_all_shared";
    case AblationMode::FreezeNone: return "freeze_none";
    case AblationMode::StrainerFreezeEncoder: return "strainer_freeze_encoder";
    case AblationMode::StrainerFull: return "strainer_full";
  }
  throw ConfigError("unknown ablation mode");
}

MetricReport run_ablation(AblationMode mode, const Model& pretrained,
                          const std::vector<MeasurementRecord>& records,
                          const TrainConfig& tcfg) {
  const bool strainer_mode = mode == AblationMode::StrainerFreezeEncoder ||
                             mode == AblationMode::StrainerFull;
  const ModelKind kind = pretrained.config().kind;
  if (strainer_mode && kind != ModelKind::StrainerLike) {
    throw ConfigError("mode '" + to_string(mode) + "' expects a strainer model, got " +
                      to_string(kind));
  }
  if (!strainer_mode && kind != ModelKind::DisINR) {
    throw ConfigError("mode '" + to_string(mode) + "' expects a disinr model, got " +
                      to_string(kind));
  }

  AdaptOptions opts;
  opts.freeze_shared =
      mode == AblationMode::FreezeAllShared || mode == AblationMode::StrainerFreezeEncoder;

  MetricReport report;
  report.method = to_string(mode);
  for (const MeasurementRecord& record : records) {
    Model work = pretrained.clone();
    AdaptOutcome out = adapt(work, record, tcfg, opts);
    RecordMetrics m;
    m.record_id = record.id;
    auto pair = metric_images(out.reconstruction, record);
    if (pair) {
      m.psnr_db = psnr(pair->first, pair->second, 1.0);
      m.ssim = ssim(pair->first, pair->second, 1.0);
    } else {
      m.psnr_db = std::numeric_limits<double>::quiet_NaN();
      m.ssim = std::numeric_limits<double>::quiet_NaN();
    }
    report.records.push_back(std::move(m));
  }
  return report;
}

std::vector<MetricReport> run_ablation_suite(const Model& disinr, const Model& strainer,
                                             const std::vector<MeasurementRecord>& records,
                                             const TrainConfig& tcfg) {
  return {run_ablation(AblationMode::FreezeAllShared, disinr, records, tcfg),
          run_ablation(AblationMode::FreezeNone, disinr, records, tcfg),
          run_ablation(AblationMode::StrainerFreezeEncoder, strainer, records, tcfg),
          run_ablation(AblationMode::StrainerFull, strainer, records, tcfg)};
}

}  // namespace disinr
