#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "disinr/ops.hpp"
#include "disinr/optimizer.hpp"
#include "disinr/params.hpp"
#include "disinr/runlog.hpp"
#include "disinr/tape.hpp"

using namespace disinr;

namespace {

std::string temp_path(const char* name) {
  return std::string("/tmp/disinr_optim_") + name;
}

}  // namespace

TEST_CASE("lr schedule halves every interval, exactly") {
  TrainConfig cfg;
  cfg.lr = 2e-3;
  cfg.lr_decay = 0.5;
  cfg.decay_interval = 1000;
  CHECK(scheduled_lr(cfg, 0) == 2e-3);
  CHECK(scheduled_lr(cfg, 999) == 2e-3);
  CHECK(scheduled_lr(cfg, 1000) == 1e-3);
  CHECK(scheduled_lr(cfg, 1999) == 1e-3);
  CHECK(scheduled_lr(cfg, 2000) == 5e-4);
  CHECK(scheduled_lr(cfg, 3500) == 2.5e-4);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  TrainConfig bad = cfg;
  bad.iterations = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.lr = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.decay_interval = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.log_interval = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("adam minimizes (w - 3)^2 to 1e-2 in 500 steps") {
  ParameterSet params;
  Partition& part = params.add("w");
  Tensor w = track(part, Tensor::scalar(0.0));

  TrainConfig cfg;
  cfg.lr = 0.1;
  cfg.lr_decay = 1.0;
  cfg.iterations = 500;
  Adam adam(params, cfg);

  for (int it = 0; it < cfg.iterations; ++it) {
    params.zero_grad();
    Tape tape;
    Tape::Scope scope(tape);
    Tensor d = ops::add_scalar(w, static_cast<real>(-3.0));
    Tensor loss = ops::mul(d, d);
    tape.backward(loss);
    adam.step(it);
  }
  CHECK(std::abs(static_cast<double>(w.item()) - 3.0) < 1e-2);
}

TEST_CASE("zero gradient leaves parameters in place") {
  ParameterSet params;
  Partition& part = params.add("w");
  Tensor w = track(part, Tensor::from_data({3}, {1.0f, -2.0f, 0.5f}));
  std::vector<real> before(w.data().begin(), w.data().end());

  TrainConfig cfg;
  Adam adam(params, cfg);
  for (int it = 0; it < 5; ++it) {
    params.zero_grad();
    adam.step(it);  // no backward ran, gradient counts as zero
  }
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(w.data()[i] == before[i]);
}

TEST_CASE("frozen partition is bitwise untouched while others move") {
  ParameterSet params;
  Tensor a = track(params.add("a"), Tensor::scalar(0.0));
  Tensor b = track(params.add("b"), Tensor::scalar(0.0));
  params.freeze({"b"});
  std::vector<real> b_before(b.data().begin(), b.data().end());

  TrainConfig cfg;
  cfg.lr = 0.05;
  Adam adam(params, cfg);
  for (int it = 0; it < 20; ++it) {
    params.zero_grad();
    Tape tape;
    Tape::Scope scope(tape);
    Tensor da = ops::add_scalar(a, static_cast<real>(-3.0));
    Tensor db = ops::add_scalar(b, static_cast<real>(-3.0));
    Tensor loss = ops::add(ops::mul(da, da), ops::mul(db, db));
    tape.backward(loss);
    adam.step(it);
  }
  CHECK(a.item() != 0.0f);
  CHECK(b.data()[0] == b_before[0]);
}

TEST_CASE("partition added after construction still gets updates") {
  ParameterSet params;
  Tensor a = track(params.add("a"), Tensor::scalar(0.0));
  TrainConfig cfg;
  cfg.lr = 0.1;
  Adam adam(params, cfg);

  Tensor b = track(params.add("late"), Tensor::scalar(0.0));
  for (int it = 0; it < 200; ++it) {
    params.zero_grad();
    Tape tape;
    Tape::Scope scope(tape);
    Tensor da = ops::add_scalar(a, static_cast<real>(-1.0));
    Tensor db = ops::add_scalar(b, static_cast<real>(-2.0));
    Tensor loss = ops::add(ops::mul(da, da), ops::mul(db, db));
    tape.backward(loss);
    adam.step(it);
  }
  CHECK(std::abs(static_cast<double>(b.item()) - 2.0) < 5e-2);
}

TEST_CASE("nan gradient aborts the step") {
  ParameterSet params;
  Tensor w = track(params.add("w"), Tensor::scalar(1.0));
  TrainConfig cfg;
  Adam adam(params, cfg);

  params.zero_grad();
  const real bad[] = {std::numeric_limits<real>::quiet_NaN()};
  w.accumulate_grad(std::span<const real>(bad, 1));
  CHECK_THROWS_AS(adam.step(0), NumericalError);
}

TEST_CASE("run log enforces ordering and finite losses") {
  RunLog log;
  log.append({0, "s0", 1.0, 20.0, 0.0});
  log.append({0, "s1", 1.1, 19.0, 0.1});
  log.append({50, "s0", 0.5, 24.0, 3.0});
  CHECK(log.entries().size() == 3);
  CHECK_THROWS_AS(log.append({49, "s0", 0.4, 25.0, 4.0}), ConfigError);
  CHECK_THROWS_AS(
      log.append({50, "s0", std::numeric_limits<double>::infinity(), 0.0, 0.0}),
      NumericalError);
}

TEST_CASE("run log csv layout, missing psnr as empty field") {
  RunLog log;
  log.append({0, "s0", 0.25, 18.0625, 1.5});
  log.append({10, "s0", 0.125, std::numeric_limits<double>::quiet_NaN(), 2.5});
  const std::string path = temp_path("runlog.csv");
  log.save_csv(path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,subject_id,loss,psnr,wall_ms");
  std::getline(in, line);
  CHECK(line == "0,s0,0.25,18.0625,1.500");
  std::getline(in, line);
  CHECK(line == "10,s0,0.125,,2.500");
  std::remove(path.c_str());
}
