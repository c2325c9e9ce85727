#pragma once

#include <string>
#include <vector>

#include "disinr/dataset.hpp"
#include "disinr_cli/experiment.hpp"

namespace disinr::cli {

// A dataset directory as written by cmd_simulate: the frozen config, the
// records in simulation order and the split membership lists.
struct LoadedDataset {
  ExperimentConfig cfg;
  std::vector<MeasurementRecord> records;
  std::vector<std::string> pretrain_ids;
  std::vector<std::string> test_in_ids;
  std::vector<std::string> test_out_ids;

  const MeasurementRecord& find(const std::string& id) const;  // LookupError
  std::vector<MeasurementRecord> select(const std::vector<std::string>& ids) const;
  bool in_test_split(const std::string& id) const;
};

LoadedDataset load_dataset(const std::string& dir);

// Generates the phantom family, simulates measurements and writes the
// dataset directory (config.txt, dataset.dinr, splits.txt, summary.txt).
void cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir);

// Joint pre-training over the dataset's pretrain split. Writes
// checkpoint.bin, runlog.csv, recon.dinr plus one PGM per record, config.txt
// and summary.txt (final losses, parameter counts).
void cmd_pretrain(const ExperimentConfig& cfg, const std::string& dataset_dir,
                  const std::string& out_dir);

struct AdaptArgs {
  std::string record_id;
  std::string baseline;             // "", "naive", "strainer", "fbp", "zf"
  std::string baseline_checkpoint;  // pre-trained model for the strainer baseline
};

// Test-time adaptation of a pre-trained checkpoint to one record, with an
// optional side-by-side baseline. Writes adapted.bin, runlog.csv, curve.csv,
// metrics.csv, params.txt, recon.dinr and PGMs, config.txt and summary.txt.
void cmd_adapt(const ExperimentConfig& cfg, const std::string& dataset_dir,
               const std::string& checkpoint_path, const AdaptArgs& args,
               const std::string& out_dir);

// Four-variant freezing study over the dataset's test records. Writes
// ablation.csv, ablation.md and config.txt.
void cmd_ablate(const ExperimentConfig& cfg, const std::string& dataset_dir,
                const std::string& disinr_checkpoint, const std::string& strainer_checkpoint,
                const std::string& out_dir);

// Re-scores stored reconstructions (recon.dinr of earlier runs) against the
// dataset's ground truth. One metrics row per reconstruction per run, method
// names taken from the run directory basenames. Writes metrics.csv.
void cmd_eval(const ExperimentConfig& cfg, const std::string& dataset_dir,
              const std::vector<std::string>& run_dirs, const std::string& out_dir);

// Feature-space visualization for a disentangled checkpoint: top-3 PCA
// component images of the shared and of one subject's features (6 PGMs:
// shared_pc{1..3}.pgm, subject_pc{1..3}.pgm) plus the |recon - gt| error map
// (error_map.pgm) for the record.
void cmd_viz(const ExperimentConfig& cfg, const std::string& dataset_dir,
             const std::string& checkpoint_path, const std::string& record_id,
             const std::string& subject, const std::string& out_dir);

}  // namespace disinr::cli
