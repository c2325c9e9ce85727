#include "disinr_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "disinr/checkpoint.hpp"
#include "disinr/container.hpp"
#include "disinr/curves.hpp"
#include "disinr/fbp.hpp"
#include "disinr/fourier_op.hpp"
#include "disinr/grid.hpp"
#include "disinr/image_io.hpp"
#include "disinr/ops.hpp"
#include "disinr/pca.hpp"
#include "disinr/rng.hpp"
#include "disinr/trainer.hpp"

namespace fs = std::filesystem;

namespace disinr::cli {
namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// The measurement-domain section kind for an operator.
std::string y_kind(const std::string& op_kind) {
  if (op_kind == "identity") return "image";
  if (op_kind == "fanbeam") return "sinogram";
  if (op_kind == "fourier") return "kspace";
  throw ConfigError("unknown operator kind: " + op_kind);
}

Shape image_extents(const LinearOperator& op) {
  const Shape in = op.in_shape();
  return {in.at(0), in.at(1)};
}

// Off-tape forward pass of one subject over the full image grid.
Tensor render_subject(const Model& model, const std::string& subject, const Shape& extents,
                      const Shape& in_shape) {
  const CoordinateGrid grid = make_grid(extents);
  return ops::reshape(model.forward(subject, grid.coords), in_shape);
}

Tensor as_display_image(const Tensor& recon) {
  return recon.ndim() == 3 ? complex_magnitude(recon) : recon;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

void write_metrics_csv(const std::string& path, const std::vector<MetricReport>& reports) {
  std::ostringstream out;
  out << "method,record_id,psnr_db,ssim\n";
  for (const MetricReport& report : reports)
    for (const RecordMetrics& row : report.records)
      out << report.method << "," << row.record_id << "," << fmt("%.9g", row.psnr_db) << ","
          << fmt("%.9g", row.ssim) << "\n";
  write_text(path, out.str());
}

MetricReport score_recon(const std::string& method, const std::string& record_id,
                         const Tensor& recon, const MeasurementRecord& record) {
  MetricReport report;
  report.method = method;
  report.records.push_back(
      {record_id, reconstruction_psnr(recon, record), reconstruction_ssim(recon, record)});
  return report;
}

void check_task(const ExperimentConfig& cfg, const LoadedDataset& ds) {
  if (cfg.task != ds.cfg.task)
    throw ConfigError("config task '" + to_string(cfg.task) + "' does not match dataset task '" +
                      to_string(ds.cfg.task) + "'");
}

TrainConfig with_dump(TrainConfig tcfg, const std::string& out_dir) {
  tcfg.diverge_dump_path = join(out_dir, "diverged.ckpt");
  return tcfg;
}

}  // namespace

const MeasurementRecord& LoadedDataset::find(const std::string& id) const {
  for (const MeasurementRecord& r : records)
    if (r.id == id) return r;
  throw LookupError("record '" + id + "' is not in the dataset");
}

std::vector<MeasurementRecord> LoadedDataset::select(const std::vector<std::string>& ids) const {
  std::vector<MeasurementRecord> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) out.push_back(find(id));
  return out;
}

bool LoadedDataset::in_test_split(const std::string& id) const {
  const auto has = [&](const std::vector<std::string>& ids) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
  };
  return has(test_in_ids) || has(test_out_ids);
}

LoadedDataset load_dataset(const std::string& dir) {
  LoadedDataset ds;
  ds.cfg = load_config(join(dir, "config.txt"));

  std::vector<std::string> order;
  std::map<std::string, Tensor> gts, ys;
  for (ContainerSection& sec : load_container(join(dir, "dataset.dinr"))) {
    if (sec.name.rfind("gt:", 0) == 0) {
      order.push_back(sec.name.substr(3));
      gts.emplace(sec.name.substr(3), std::move(sec.data));
    } else if (sec.name.rfind("y:", 0) == 0) {
      ys.emplace(sec.name.substr(2), std::move(sec.data));
    }
  }
  const OperatorDescriptor desc = resolved_operator(ds.cfg);
  for (const std::string& id : order) {
    const auto y = ys.find(id);
    if (y == ys.end()) throw IoError("dataset is missing measurements for record " + id);
    ds.records.push_back({id, y->second, desc, ds.cfg.noise_sigma, gts.at(id)});
  }

  std::ifstream in(join(dir, "splits.txt"));
  if (!in) throw IoError("cannot open " + join(dir, "splits.txt"));
  std::string split, id;
  while (in >> split >> id) {
    if (split == "pretrain") ds.pretrain_ids.push_back(id);
    else if (split == "test_in") ds.test_in_ids.push_back(id);
    else if (split == "test_out") ds.test_out_ids.push_back(id);
    else throw IoError("unknown split '" + split + "' in splits.txt");
  }
  return ds;
}

void cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  save_config(join(out_dir, "config.txt"), cfg);

  const std::vector<Tensor> images = gen_family(cfg.phantom);
  const OperatorDescriptor desc = resolved_operator(cfg);
  const std::vector<MeasurementRecord> records =
      simulate_measurements(images, desc, cfg.noise_sigma, sub_seed(cfg.seed, "noise"));
  const DatasetSplit split = split_records(records, cfg.split_pretrain, cfg.split_test_in,
                                           cfg.split_test_out, sub_seed(cfg.seed, "split"));

  std::vector<ContainerSection> sections;
  const std::string yk = y_kind(desc.kind);
  for (const MeasurementRecord& r : records) {
    sections.push_back({"image", "gt:" + r.id, r.ground_truth});
    sections.push_back({yk, "y:" + r.id, r.y});
  }
  double realized = 0.0;
  if (cfg.task == TaskKind::Mri) {
    const auto op = desc.instantiate();
    const auto* fop = dynamic_cast<const FourierOperator*>(op.get());
    sections.push_back({"mask", "mask", fop->mask()});
    sections.push_back({"coilmaps", "coils", fop->coil_maps()});
    realized = realized_af(fop->mask());
  }
  save_container(join(out_dir, "dataset.dinr"), sections);

  std::ostringstream splits;
  for (const MeasurementRecord& r : split.pretrain) splits << "pretrain " << r.id << "\n";
  for (const MeasurementRecord& r : split.test_in) splits << "test_in " << r.id << "\n";
  for (const MeasurementRecord& r : split.test_out) splits << "test_out " << r.id << "\n";
  write_text(join(out_dir, "splits.txt"), splits.str());

  std::ostringstream summary;
  summary << "task " << to_string(cfg.task) << "\n";
  summary << "records " << records.size() << "\n";
  summary << "image " << shape_str(image_extents(*desc.instantiate())) << "\n";
  summary << "measurement " << shape_str(records.front().y.shape()) << "\n";
  summary << "split pretrain " << split.pretrain.size() << "\n";
  summary << "split test_in " << split.test_in.size() << "\n";
  summary << "split test_out " << split.test_out.size() << "\n";
  if (cfg.task == TaskKind::Mri) {
    summary << "requested_af " << fmt("%.9g", cfg.mask.af) << "\n";
    summary << "realized_af " << fmt("%.9g", realized) << "\n";
  }
  write_text(join(out_dir, "summary.txt"), summary.str());
  std::cout << summary.str();
}

void cmd_pretrain(const ExperimentConfig& cfg, const std::string& dataset_dir,
                  const std::string& out_dir) {
  cfg.validate();
  const LoadedDataset ds = load_dataset(dataset_dir);
  check_task(cfg, ds);
  const std::vector<MeasurementRecord> records = ds.select(ds.pretrain_ids);
  if (records.empty()) throw ConfigError("dataset has an empty pretrain split");

  fs::create_directories(out_dir);
  save_config(join(out_dir, "config.txt"), cfg);
  PretrainOutcome outcome =
      pretrain(resolved_model(cfg), records, with_dump(cfg.train, out_dir));
  save_checkpoint(join(out_dir, "checkpoint.bin"), outcome.model);
  outcome.log.save_csv(join(out_dir, "runlog.csv"));

  const auto op = records.front().op.instantiate();
  const Shape extents = image_extents(*op);
  std::vector<ContainerSection> sections;
  for (std::size_t i = 0; i < records.size(); ++i) {
    Tensor recon = render_subject(outcome.model, std::to_string(i), extents, op->in_shape());
    save_pgm(join(out_dir, "recon_" + records[i].id + ".pgm"), as_display_image(recon));
    sections.push_back({"image", "recon:" + records[i].id, std::move(recon)});
  }
  save_container(join(out_dir, "recon.dinr"), sections);

  std::ostringstream summary;
  summary << "records " << records.size() << "\n";
  summary << "iterations " << cfg.train.iterations << "\n";
  const int last_iter = outcome.log.entries().back().iteration;
  for (const RunLogEntry& e : outcome.log.entries())
    if (e.iteration == last_iter)
      summary << "final_loss " << e.subject_id << " " << fmt("%.9g", e.loss) << "\n";
  summary << "params_total " << outcome.model.params().total_count() << "\n";
  for (const Partition& p : outcome.model.params().partitions())
    summary << "params " << p.name << " " << p.parameter_count() << "\n";
  write_text(join(out_dir, "summary.txt"), summary.str());
  std::cout << summary.str();
}

void cmd_adapt(const ExperimentConfig& cfg, const std::string& dataset_dir,
               const std::string& checkpoint_path, const AdaptArgs& args,
               const std::string& out_dir) {
  cfg.validate();
  const LoadedDataset ds = load_dataset(dataset_dir);
  check_task(cfg, ds);
  const MeasurementRecord& record = ds.find(args.record_id);
  const bool flagged = !ds.in_test_split(args.record_id);
  if (flagged)
    std::cerr << "warning: record " << args.record_id << " is not in a test split\n";

  fs::create_directories(out_dir);
  save_config(join(out_dir, "config.txt"), cfg);
  const TrainConfig acfg = with_dump(cfg.adapt, out_dir);

  Model model = load_checkpoint(checkpoint_path, resolved_model(cfg));
  const std::string method = to_string(model.config().kind);
  AdaptOutcome outcome = adapt(model, record, acfg);
  const std::int64_t total = model.params().total_count();
  const std::int64_t trainable = model.params().trainable_count();
  save_checkpoint(join(out_dir, "adapted.bin"), model);
  outcome.log.save_csv(join(out_dir, "runlog.csv"));
  save_pgm(join(out_dir, "recon.pgm"), as_display_image(outcome.reconstruction));

  std::vector<ContainerSection> sections;
  sections.push_back({"image", "recon:" + record.id, outcome.reconstruction});
  std::vector<std::pair<std::string, ConvergenceCurve>> curves;
  curves.emplace_back(method, curve_report({outcome.log}));
  std::vector<MetricReport> reports;
  reports.push_back(score_recon(method, record.id, outcome.reconstruction, record));

  if (!args.baseline.empty() && args.baseline != "none") {
    TrainConfig bcfg = acfg;
    bcfg.seed = sub_seed(acfg.seed, "baseline");
    Tensor brecon;
    if (args.baseline == "naive") {
      ModelConfig nm = resolved_model(cfg);
      nm.kind = ModelKind::NaiveINR;
      PretrainOutcome b = fit_single(nm, record, bcfg);
      brecon = render_subject(b.model, "0", image_extents(*record.op.instantiate()),
                              record.op.instantiate()->in_shape());
      curves.emplace_back(args.baseline, curve_report({b.log}));
    } else if (args.baseline == "strainer") {
      if (args.baseline_checkpoint.empty())
        throw ConfigError("the strainer baseline needs --baseline-checkpoint");
      ModelConfig sm = resolved_model(cfg);
      sm.kind = ModelKind::StrainerLike;
      Model sb = load_checkpoint(args.baseline_checkpoint, sm);
      AdaptOptions opts;
      opts.freeze_shared = false;  // the strainer recipe fine-tunes everything
      AdaptOutcome b = adapt(sb, record, bcfg, opts);
      brecon = std::move(b.reconstruction);
      curves.emplace_back(args.baseline, curve_report({b.log}));
    } else if (args.baseline == "fbp") {
      if (record.op.kind != "fanbeam")
        throw ConfigError("the fbp baseline is defined for the ct task only");
      brecon = fbp_reconstruct(record.op.geometry, record.y);
    } else if (args.baseline == "zf") {
      if (record.op.kind != "fourier")
        throw ConfigError("the zf baseline is defined for the mri task only");
      brecon = record.op.instantiate()->adjoint(record.y);
    } else {
      throw ConfigError("unknown baseline: " + args.baseline);
    }
    save_pgm(join(out_dir, "recon_" + args.baseline + ".pgm"), as_display_image(brecon));
    reports.push_back(score_recon(args.baseline, record.id, brecon, record));
    sections.push_back({"image", "baseline:" + record.id, std::move(brecon)});
  }

  save_container(join(out_dir, "recon.dinr"), sections);
  save_curves_csv(join(out_dir, "curve.csv"), curves);
  write_metrics_csv(join(out_dir, "metrics.csv"), reports);

  std::ostringstream params;
  params << "params_total " << total << "\n";
  params << "params_trainable_adapt " << trainable << "\n";
  params << "trainable_fraction " << fmt("%.9g", double(trainable) / double(total)) << "\n";
  write_text(join(out_dir, "params.txt"), params.str());

  std::ostringstream summary;
  summary << "record " << record.id << "\n";
  if (flagged) summary << "warning record " << record.id << " is not in a test split\n";
  for (const MetricReport& r : reports)
    summary << "metrics " << r.method << " psnr " << fmt("%.9g", r.records.front().psnr_db)
            << " ssim " << fmt("%.9g", r.records.front().ssim) << "\n";
  summary << params.str();
  write_text(join(out_dir, "summary.txt"), summary.str());
  std::cout << summary.str();
}

void cmd_ablate(const ExperimentConfig& cfg, const std::string& dataset_dir,
                const std::string& disinr_checkpoint, const std::string& strainer_checkpoint,
                const std::string& out_dir) {
  cfg.validate();
  const LoadedDataset ds = load_dataset(dataset_dir);
  check_task(cfg, ds);
  std::vector<std::string> ids = ds.test_in_ids;
  ids.insert(ids.end(), ds.test_out_ids.begin(), ds.test_out_ids.end());
  const std::vector<MeasurementRecord> records = ds.select(ids);
  if (records.empty()) throw ConfigError("dataset has no test records to ablate on");

  ModelConfig dm = resolved_model(cfg);
  dm.kind = ModelKind::DisINR;
  ModelConfig sm = resolved_model(cfg);
  sm.kind = ModelKind::StrainerLike;
  const Model disinr = load_checkpoint(disinr_checkpoint, dm);
  const Model strainer = load_checkpoint(strainer_checkpoint, sm);

  fs::create_directories(out_dir);
  save_config(join(out_dir, "config.txt"), cfg);
  const std::vector<MetricReport> reports =
      run_ablation_suite(disinr, strainer, records, with_dump(cfg.adapt, out_dir));
  write_metrics_csv(join(out_dir, "ablation.csv"), reports);

  std::ostringstream md;
  md << "| variant | mean PSNR (dB) | std | mean SSIM | std |\n";
  md << "|---|---|---|---|---|\n";
  for (const MetricReport& r : reports)
    md << "| " << r.method << " | " << fmt("%.2f", r.mean_psnr()) << " | "
       << fmt("%.2f", r.std_psnr()) << " | " << fmt("%.4f", r.mean_ssim()) << " | "
       << fmt("%.4f", r.std_ssim()) << " |\n";
  write_text(join(out_dir, "ablation.md"), md.str());
  std::cout << md.str();
}

void cmd_eval(const ExperimentConfig& cfg, const std::string& dataset_dir,
              const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  cfg.validate();
  const LoadedDataset ds = load_dataset(dataset_dir);
  check_task(cfg, ds);
  if (run_dirs.empty()) throw ConfigError("eval needs at least one run directory");

  std::vector<MetricReport> reports;
  for (const std::string& run : run_dirs) {
    MetricReport report;
    report.method = fs::path(run).filename().string();
    if (report.method.empty()) report.method = run;
    for (const ContainerSection& sec : load_container(join(run, "recon.dinr"))) {
      if (sec.name.rfind("recon:", 0) != 0) continue;
      const std::string id = sec.name.substr(6);
      const MeasurementRecord& record = ds.find(id);
      report.records.push_back({id, reconstruction_psnr(sec.data, record),
                                reconstruction_ssim(sec.data, record)});
    }
    if (report.records.empty())
      throw IoError("no reconstructions found under " + run);
    reports.push_back(std::move(report));
  }

  fs::create_directories(out_dir);
  write_metrics_csv(join(out_dir, "metrics.csv"), reports);
  for (const MetricReport& r : reports)
    for (const RecordMetrics& row : r.records)
      std::cout << r.method << " " << row.record_id << " psnr " << fmt("%.9g", row.psnr_db)
                << " ssim " << fmt("%.9g", row.ssim) << "\n";
}

void cmd_viz(const ExperimentConfig& cfg, const std::string& dataset_dir,
             const std::string& checkpoint_path, const std::string& record_id,
             const std::string& subject, const std::string& out_dir) {
  cfg.validate();
  const LoadedDataset ds = load_dataset(dataset_dir);
  check_task(cfg, ds);
  const MeasurementRecord& record = ds.find(record_id);

  ModelConfig mcfg = resolved_model(cfg);
  if (mcfg.kind != ModelKind::DisINR)
    throw ConfigError("viz needs a disentangled checkpoint (model.kind = disinr)");
  const Model model = load_checkpoint(checkpoint_path, mcfg);
  const std::string subj = subject.empty() ? model.subject_ids().front() : subject;

  const auto op = record.op.instantiate();
  const Shape extents = image_extents(*op);
  const CoordinateGrid grid = make_grid(extents);

  fs::create_directories(out_dir);
  const auto save_components = [&](const Tensor& features, const std::string& prefix) {
    const PcaResult pca = pca_features(features, 3);
    if (pca.retained() < 3)
      throw NumericalError("feature matrix is too degenerate for 3 components");
    for (int c = 0; c < 3; ++c) {
      Tensor img = Tensor::zeros(extents);
      auto iv = img.data_mut();
      for (std::int64_t r = 0; r < pca.components.dim(0); ++r)
        iv[r] = pca.components.data()[r * pca.components.dim(1) + c];
      save_pgm(join(out_dir, prefix + "_pc" + std::to_string(c + 1) + ".pgm"), img);
    }
  };
  save_components(model.shared_features(grid.coords), "shared");
  save_components(model.subject_features(subj, grid.coords), "subject");

  const Tensor recon = ops::reshape(model.forward(subj, grid.coords), op->in_shape());
  const auto pair = metric_images(recon, record);
  if (!pair) throw ConfigError("record " + record_id + " has no ground truth for the error map");
  Tensor err = Tensor::zeros(extents);
  auto ev = err.data_mut();
  for (std::int64_t i = 0; i < err.size(); ++i)
    ev[i] = std::abs(pair->first.data()[i] - pair->second.data()[i]);
  save_pgm(join(out_dir, "error_map.pgm"), err);
  std::cout << "subject " << subj << "\n";
  std::cout << "components 6\n";
  std::cout << "error_map 1\n";
}

}  // namespace disinr::cli
