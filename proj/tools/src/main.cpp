#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "disinr_cli/commands.hpp"

namespace {

using disinr::cli::ExperimentConfig;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string preset = "desk";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_out = true) {
  cmd->add_option("--config", args.config_path, "Experiment config file");
  auto* out = cmd->add_option("--out", args.out_dir, "Output directory");
  if (needs_out) out->required();
  cmd->add_option("--preset", args.preset, "Defaults when no --config is given")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", args.seed, "Override the top-level seed");
}

// --config wins; otherwise the dataset's frozen config; otherwise preset
// defaults. --seed re-derives every sub-seed.
ExperimentConfig resolve_config(const CommonArgs& args, const std::string& dataset_dir,
                                disinr::cli::TaskKind default_task) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) {
    cfg = disinr::cli::load_config(args.config_path);
  } else if (!dataset_dir.empty()) {
    cfg = disinr::cli::load_config((std::filesystem::path(dataset_dir) / "config.txt").string());
  } else {
    cfg = disinr::cli::preset_config(args.preset, default_task);
  }
  if (args.seed) cfg.reseed(*args.seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"disinr: disentangled implicit neural representations for tomographic imaging"};
  app.require_subcommand(1);
  app.footer("Set DISINR_THREADS to cap internal parallelism.");

  CommonArgs sim_args;
  std::string sim_task = "volume_fit";
  auto* sim = app.add_subcommand("simulate", "Generate a phantom family dataset");
  add_common(sim, sim_args);
  sim->add_option("--task", sim_task, "Task when no --config is given")
      ->check(CLI::IsMember({"volume_fit", "mri", "ct"}));

  CommonArgs pre_args;
  std::string pre_dataset;
  auto* pre = app.add_subcommand("pretrain", "Pre-train the shared pair on the pretrain split");
  add_common(pre, pre_args);
  pre->add_option("--dataset", pre_dataset, "Dataset directory")->required();

  CommonArgs ad_args;
  std::string ad_dataset, ad_checkpoint;
  disinr::cli::AdaptArgs adapt_args;
  auto* ad = app.add_subcommand("adapt", "Adapt a pre-trained checkpoint to one record");
  add_common(ad, ad_args);
  ad->add_option("--dataset", ad_dataset, "Dataset directory")->required();
  ad->add_option("--checkpoint", ad_checkpoint, "Pre-trained checkpoint")->required();
  ad->add_option("--record", adapt_args.record_id, "Record id to adapt to")->required();
  ad->add_option("--baseline", adapt_args.baseline, "Side-by-side baseline")
      ->check(CLI::IsMember({"none", "naive", "strainer", "fbp", "zf"}));
  ad->add_option("--baseline-checkpoint", adapt_args.baseline_checkpoint,
                 "Checkpoint for the strainer baseline");

  CommonArgs ab_args;
  std::string ab_dataset, ab_checkpoint, ab_strainer;
  auto* ab = app.add_subcommand("ablate", "Freezing ablation over the test records");
  add_common(ab, ab_args);
  ab->add_option("--dataset", ab_dataset, "Dataset directory")->required();
  ab->add_option("--checkpoint", ab_checkpoint, "Disentangled checkpoint")->required();
  ab->add_option("--strainer-checkpoint", ab_strainer, "Shared-encoder checkpoint")->required();

  CommonArgs ev_args;
  std::string ev_dataset;
  std::vector<std::string> ev_runs;
  auto* ev = app.add_subcommand("eval", "Re-score stored reconstructions");
  add_common(ev, ev_args);
  ev->add_option("--dataset", ev_dataset, "Dataset directory")->required();
  ev->add_option("--run", ev_runs, "Run directories with recon.dinr")->required();

  CommonArgs vz_args;
  std::string vz_dataset, vz_checkpoint, vz_record, vz_subject;
  auto* vz = app.add_subcommand("viz", "Export PCA component images and the error map");
  add_common(vz, vz_args);
  vz->add_option("--dataset", vz_dataset, "Dataset directory")->required();
  vz->add_option("--checkpoint", vz_checkpoint, "Disentangled checkpoint")->required();
  vz->add_option("--record", vz_record, "Record id for the error map")->required();
  vz->add_option("--subject", vz_subject, "Subject id (default: first in the checkpoint)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    using disinr::cli::TaskKind;
    if (sim->parsed()) {
      cmd_simulate(resolve_config(sim_args, "", disinr::cli::task_from_string(sim_task)),
                   sim_args.out_dir);
    } else if (pre->parsed()) {
      cmd_pretrain(resolve_config(pre_args, pre_dataset, TaskKind::VolumeFit), pre_dataset,
                   pre_args.out_dir);
    } else if (ad->parsed()) {
      cmd_adapt(resolve_config(ad_args, ad_dataset, TaskKind::VolumeFit), ad_dataset,
                ad_checkpoint, adapt_args, ad_args.out_dir);
    } else if (ab->parsed()) {
      cmd_ablate(resolve_config(ab_args, ab_dataset, TaskKind::VolumeFit), ab_dataset,
                 ab_checkpoint, ab_strainer, ab_args.out_dir);
    } else if (ev->parsed()) {
      cmd_eval(resolve_config(ev_args, ev_dataset, TaskKind::VolumeFit), ev_dataset, ev_runs,
               ev_args.out_dir);
    } else if (vz->parsed()) {
      cmd_viz(resolve_config(vz_args, vz_dataset, TaskKind::VolumeFit), vz_dataset, vz_checkpoint,
              vz_record, vz_subject, vz_args.out_dir);
    }
  } catch (const disinr::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const disinr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
