#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "disinr/checkpoint.hpp"
#include "disinr/dataset.hpp"
#include "disinr/grad_check.hpp"
#include "disinr/grid.hpp"
#include "disinr/ops.hpp"
#include "disinr/phantom.hpp"
#include "disinr/tape.hpp"
#include "disinr/trainer.hpp"

using namespace disinr;

namespace {

ModelConfig tiny_model(ModelKind kind = ModelKind::DisINR, int channels = 1) {
  ModelConfig cfg;
  cfg.kind = kind;
  cfg.channels = channels;
  cfg.hash.levels = 5;
  cfg.hash.table_size = 1 << 10;
  cfg.hash.features = 2;
  cfg.encoder_hidden = 32;
  cfg.decoder_hidden = 32;
  return cfg;
}

// Capacity for a decent 64 px fit without slowing the suite down.
ModelConfig fit_model(int channels = 1) {
  ModelConfig cfg;
  cfg.kind = ModelKind::DisINR;
  cfg.channels = channels;
  cfg.hash.levels = 6;
  cfg.hash.table_size = 1 << 12;
  cfg.hash.features = 2;
  cfg.encoder_hidden = 48;
  cfg.decoder_hidden = 48;
  return cfg;
}

std::vector<Tensor> family_images(std::int64_t extent, int population, std::uint64_t seed) {
  PhantomFamilyConfig cfg;
  cfg.family = PhantomFamily::EllipseFamily;
  cfg.extents = {extent, extent};
  cfg.population = population;
  cfg.seed = seed;
  return gen_family(cfg);
}

std::vector<MeasurementRecord> identity_records(const std::vector<Tensor>& imgs,
                                                std::uint64_t seed) {
  return simulate_measurements(imgs, OperatorDescriptor::identity(imgs.front().shape()), 0.0,
                               seed);
}

std::vector<std::vector<real>> snapshot(const Model& model,
                                        const std::vector<std::string>& parts) {
  std::vector<std::vector<real>> out;
  for (const auto& name : parts)
    for (const Tensor& t : model.params().get(name).tensors)
      out.emplace_back(t.data().begin(), t.data().end());
  return out;
}

bool bitwise_equal(const std::vector<std::vector<real>>& a,
                   const std::vector<std::vector<real>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("pretrain rejects unusable configurations") {
  auto imgs = family_images(16, 2, 3);
  auto records = identity_records(imgs, 5);
  TrainConfig tcfg;
  tcfg.iterations = 2;

  CHECK_THROWS_AS(pretrain(tiny_model(), {}, tcfg), ConfigError);
  CHECK_THROWS_AS(pretrain(tiny_model(ModelKind::NaiveINR), records, tcfg), ConfigError);

  // mixed image domains
  auto extra = identity_records(family_images(32, 1, 4), 6);
  auto mixed = records;
  mixed.push_back(extra.front());
  CHECK_THROWS_AS(pretrain(tiny_model(), mixed, tcfg), ConfigError);

  // a complex-domain operator needs a two-channel model
  SamplingMaskConfig mask;
  mask.af = 1.0;
  auto kspace = simulate_measurements({imgs.front()},
                                      OperatorDescriptor::fourier({16, 16}, mask, 1, 0), 0.0, 7);
  CHECK_THROWS_AS(pretrain(tiny_model(), kspace, tcfg), ConfigError);
}

TEST_CASE("single-subject identity fit clears 35 dB and the loss trends down") {
  auto imgs = family_images(64, 1, 11);
  auto records = identity_records(imgs, 12);

  TrainConfig tcfg;
  tcfg.iterations = 1200;
  tcfg.lr = 8e-3;
  tcfg.lr_decay = 0.5;
  tcfg.decay_interval = 400;
  tcfg.seed = 1;
  tcfg.log_interval = 25;

  PretrainOutcome out = pretrain(fit_model(), records, tcfg);

  const CoordinateGrid grid = make_grid({64, 64});
  Tensor recon = ops::reshape(out.model.forward("0", grid.coords), {64, 64});
  const double db = reconstruction_psnr(recon, records.front());
  INFO("identity fit PSNR ", db);
  CHECK(db >= 35.0);

  const auto& entries = out.log.entries();
  REQUIRE(entries.size() >= 20);
  const std::size_t tenth = entries.size() / 10;
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < tenth; ++i) {
    head += entries[i].loss;
    tail += entries[entries.size() - 1 - i].loss;
  }
  CHECK(tail < head);
}

TEST_CASE("one subject's loss sends no gradient to another subject's encoder") {
  auto imgs = family_images(16, 2, 21);
  auto records = identity_records(imgs, 22);
  Model model = Model::build(tiny_model(), 2, 23);
  const CoordinateGrid grid = make_grid({16, 16});

  model.params().zero_grad();
  Tape tape;
  Tape::Scope scope(tape);
  Tensor shared = model.shared_features(grid.coords);
  Tensor img = ops::reshape(model.forward_from_shared("0", shared, grid.coords), {16, 16});
  Tensor loss = ops::l1_loss(img, records[0].y);
  tape.backward(loss);

  bool other_touched = false;
  for (const Tensor& t : model.params().get("subject:1").tensors) {
    if (!t.has_grad()) continue;
    for (real g : t.grad())
      if (g != 0.0f) other_touched = true;
  }
  CHECK_FALSE(other_touched);

  auto any_nonzero = [](const Partition& part) {
    for (const Tensor& t : part.tensors) {
      if (!t.has_grad()) continue;
      for (real g : t.grad())
        if (g != 0.0f) return true;
    }
    return false;
  };
  CHECK(any_nonzero(model.params().get("subject:0")));
  CHECK(any_nonzero(model.params().get("shared_encoder")));
  CHECK(any_nonzero(model.params().get("shared_decoder")));
}

TEST_CASE("adapt spawns the subject and never touches frozen partitions") {
  auto imgs = family_images(16, 3, 31);
  auto records = identity_records(imgs, 32);
  TrainConfig tcfg;
  tcfg.iterations = 40;
  tcfg.lr = 5e-3;
  tcfg.seed = 33;
  tcfg.log_interval = 10;

  PretrainOutcome pre = pretrain(tiny_model(), {records[0], records[1]}, tcfg);
  const std::vector<std::string> kept = {"shared_encoder", "shared_decoder", "subject:0",
                                         "subject:1"};
  auto before = snapshot(pre.model, kept);

  TrainConfig acfg = tcfg;
  acfg.iterations = 30;
  AdaptOutcome out = adapt(pre.model, records[2], acfg);

  CHECK(bitwise_equal(before, snapshot(pre.model, kept)));
  const auto ids = pre.model.subject_ids();
  CHECK(std::find(ids.begin(), ids.end(), "test") != ids.end());
  CHECK(out.reconstruction.shape() == Shape{16, 16});
  REQUIRE_FALSE(out.log.empty());
  CHECK(out.log.entries().front().iteration == 0);
  CHECK(out.log.entries().back().iteration == acfg.iterations - 1);
  CHECK(std::isfinite(out.log.entries().back().psnr_db));
}

TEST_CASE("adapt can warm-start from an existing subject and unfreeze the shared pair") {
  auto imgs = family_images(16, 2, 41);
  auto records = identity_records(imgs, 42);
  TrainConfig tcfg;
  tcfg.iterations = 30;
  tcfg.lr = 5e-3;
  tcfg.seed = 43;

  PretrainOutcome pre = pretrain(tiny_model(), {records[0]}, tcfg);

  Model warm = pre.model.clone();
  AdaptOptions wopts;
  wopts.subject = "warm";
  wopts.copy_from = "0";
  CHECK_NOTHROW(adapt(warm, records[1], tcfg, wopts));

  Model loose = pre.model.clone();
  auto shared_before = snapshot(loose, {"shared_encoder", "shared_decoder"});
  AdaptOptions lopts;
  lopts.freeze_shared = false;
  adapt(loose, records[1], tcfg, lopts);
  CHECK_FALSE(bitwise_equal(shared_before, snapshot(loose, {"shared_encoder", "shared_decoder"})));
}

TEST_CASE("adapt rejects duplicate subjects and naive models") {
  auto imgs = family_images(16, 2, 51);
  auto records = identity_records(imgs, 52);
  TrainConfig tcfg;
  tcfg.iterations = 5;
  tcfg.seed = 53;

  PretrainOutcome pre = pretrain(tiny_model(), {records[0]}, tcfg);
  adapt(pre.model, records[1], tcfg);
  CHECK_THROWS_AS(adapt(pre.model, records[1], tcfg), LookupError);

  PretrainOutcome naive = fit_single(tiny_model(ModelKind::NaiveINR), records[0], tcfg);
  CHECK_THROWS_AS(adapt(naive.model, records[1], tcfg), ConfigError);
}

TEST_CASE("full-mask mri adaptation clears 40 dB") {
  auto imgs = family_images(64, 3, 61);
  SamplingMaskConfig mask;
  mask.af = 1.0;
  mask.acs = 16;
  auto records = simulate_measurements(
      imgs, OperatorDescriptor::fourier({64, 64}, mask, 1, 62), 0.0, 63);

  TrainConfig pcfg;
  pcfg.iterations = 500;
  pcfg.lr = 5e-3;
  pcfg.lr_decay = 0.5;
  pcfg.decay_interval = 250;
  pcfg.seed = 64;
  pcfg.log_interval = 100;
  PretrainOutcome pre = pretrain(fit_model(2), {records[0], records[1]}, pcfg);

  TrainConfig acfg = pcfg;
  acfg.iterations = 900;
  acfg.decay_interval = 300;
  AdaptOutcome out = adapt(pre.model, records[2], acfg);
  const double db = reconstruction_psnr(out.reconstruction, records[2]);
  INFO("mri adapt PSNR ", db);
  CHECK(db >= 40.0);
}

TEST_CASE("fixed seeds reproduce the log and the parameters bitwise") {
  auto imgs = family_images(16, 2, 71);
  auto records = identity_records(imgs, 72);
  TrainConfig tcfg;
  tcfg.iterations = 25;
  tcfg.lr = 5e-3;
  tcfg.seed = 73;
  tcfg.log_interval = 5;

  PretrainOutcome a = pretrain(tiny_model(), records, tcfg);
  PretrainOutcome b = pretrain(tiny_model(), records, tcfg);

  REQUIRE(a.log.entries().size() == b.log.entries().size());
  for (std::size_t i = 0; i < a.log.entries().size(); ++i) {
    const auto& ea = a.log.entries()[i];
    const auto& eb = b.log.entries()[i];
    CHECK(ea.iteration == eb.iteration);
    CHECK(ea.subject_id == eb.subject_id);
    CHECK(ea.loss == eb.loss);
    CHECK(ea.psnr_db == eb.psnr_db);
  }
  const std::vector<std::string> parts = {"shared_encoder", "shared_decoder", "subject:0",
                                          "subject:1"};
  CHECK(bitwise_equal(snapshot(a.model, parts), snapshot(b.model, parts)));

  TrainConfig other = tcfg;
  other.seed = 74;
  PretrainOutcome c = pretrain(tiny_model(), records, other);
  CHECK_FALSE(bitwise_equal(snapshot(a.model, parts), snapshot(c.model, parts)));
}

TEST_CASE("analytic gradients of the full pipeline match finite differences") {
  FanBeamGeometry geo;
  geo.image_h = geo.image_w = 16;
  geo.voxel_mm = 1.0;
  geo.source_to_center_mm = 40.0;
  geo.center_to_detector_mm = 40.0;
  geo.detectors = 20;
  geo.detector_spacing_mm = 2.0;
  for (int v = 0; v < 8; ++v) geo.angles.push_back(2.0 * M_PI * v / 8.0);

  auto op = OperatorDescriptor::fanbeam(geo).instantiate();
  Tensor image = family_images(16, 1, 81).front();
  Tensor y = op->apply(image);
  // Finite differences are meaningless across the L1 kink; shift the target
  // so no residual sits at zero.
  for (auto& v : y.data_mut()) v += 0.5f;

  ModelConfig mcfg = tiny_model();
  mcfg.hash.levels = 3;
  mcfg.hash.table_size = 1 << 8;
  mcfg.encoder_hidden = 16;
  mcfg.decoder_hidden = 16;
  // Near-zero tables park every ReLU pre-activation at the kink; scale up.
  mcfg.table_init_scale = 0.5;
  Model model = Model::build(mcfg, 1, 82);
  const CoordinateGrid grid = make_grid({16, 16});

  std::vector<Tensor> params;
  for (const auto& part : model.params().partitions())
    for (const Tensor& t : part.tensors) params.push_back(t);

  auto loss = [&] {
    Tensor shared = model.shared_features(grid.coords);
    Tensor img = ops::reshape(model.forward_from_shared("0", shared, grid.coords), {16, 16});
    return ops::l1_loss(ops::apply_operator(op, img), y);
  };
  GradCheckOptions opts;
  opts.max_coords_per_tensor = 8;
  // Small enough that no sampled step straddles a ReLU kink, large enough to
  // stay above float quantization of the loss.
  opts.step = 1e-4;
  GradCheckResult res = grad_check(loss, params, opts);
  INFO("max rel error ", res.max_rel_error, " over ", res.coords_checked, " coords");
  CHECK(res.max_rel_error < 1e-2);
}

TEST_CASE("divergence aborts the run and dumps a checkpoint") {
  auto imgs = family_images(16, 1, 91);
  auto records = identity_records(imgs, 92);
  TrainConfig tcfg;
  tcfg.iterations = 60;
  tcfg.lr = 1e3;  // guaranteed blow-up
  tcfg.seed = 93;
  tcfg.diverge_dump_path = "/tmp/disinr_diverged.ckpt";
  std::remove(tcfg.diverge_dump_path.c_str());

  CHECK_THROWS_AS(pretrain(tiny_model(), records, tcfg), NumericalError);
  std::ifstream probe(tcfg.diverge_dump_path);
  CHECK(probe.good());
  probe.close();
  Model dumped = load_checkpoint(tcfg.diverge_dump_path);
  CHECK(dumped.config().kind == ModelKind::DisINR);
  std::remove(tcfg.diverge_dump_path.c_str());
}

TEST_CASE("freeze variants share the first-iteration loss; the suite reports all modes") {
  auto imgs = family_images(16, 4, 101);
  auto records = identity_records(imgs, 102);
  std::vector<MeasurementRecord> train = {records[0], records[1]};
  std::vector<MeasurementRecord> held = {records[2], records[3]};

  TrainConfig tcfg;
  tcfg.iterations = 30;
  tcfg.lr = 5e-3;
  tcfg.seed = 103;
  tcfg.log_interval = 10;
  PretrainOutcome dis = pretrain(tiny_model(), train, tcfg);
  PretrainOutcome str = pretrain(tiny_model(ModelKind::StrainerLike), train, tcfg);

  TrainConfig acfg = tcfg;
  acfg.iterations = 15;

  Model frozen = dis.model.clone();
  AdaptOptions fopts;
  fopts.freeze_shared = true;
  AdaptOutcome fout = adapt(frozen, held[0], acfg, fopts);

  Model open = dis.model.clone();
  AdaptOptions oopts;
  oopts.freeze_shared = false;
  AdaptOutcome oout = adapt(open, held[0], acfg, oopts);

  REQUIRE_FALSE(fout.log.empty());
  CHECK(fout.log.entries().front().loss == oout.log.entries().front().loss);

  auto reports = run_ablation_suite(dis.model, str.model, held, acfg);
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].method == "freeze_all_shared");
  CHECK(reports[1].method == "freeze_none");
  CHECK(reports[2].method == "strainer_freeze_encoder");
  CHECK(reports[3].method == "strainer_full");
  for (const auto& rep : reports) {
    REQUIRE(rep.records.size() == held.size());
    for (const auto& r : rep.records) {
      CHECK(std::isfinite(r.psnr_db));
      CHECK(std::isfinite(r.ssim));
    }
  }

  CHECK_THROWS_AS(run_ablation(AblationMode::StrainerFull, dis.model, held, acfg), ConfigError);
  CHECK_THROWS_AS(run_ablation(AblationMode::FreezeNone, str.model, held, acfg), ConfigError);
}

TEST_CASE("reconstruction psnr handles missing truth and complex pairs") {
  auto imgs = family_images(16, 1, 111);
  MeasurementRecord blind;
  blind.id = "blind";
  blind.y = imgs.front();
  blind.op = OperatorDescriptor::identity({16, 16});
  CHECK(std::isnan(reconstruction_psnr(imgs.front(), blind)));

  auto records = identity_records(imgs, 112);
  CHECK(std::isinf(reconstruction_psnr(imgs.front(), records.front())));

  MeasurementRecord complex_rec;
  complex_rec.id = "c";
  complex_rec.op = OperatorDescriptor::identity({16, 16});
  complex_rec.ground_truth = complexify(imgs.front());
  complex_rec.y = complex_rec.ground_truth;
  CHECK(std::isinf(reconstruction_psnr(complexify(imgs.front()), complex_rec)));
  CHECK_THROWS_AS(reconstruction_psnr(imgs.front(), complex_rec), DimensionError);
}
