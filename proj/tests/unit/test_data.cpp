#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "disinr/container.hpp"
#include "disinr/dataset.hpp"
#include "disinr/fourier_op.hpp"
#include "disinr/image_io.hpp"
#include "disinr/phantom.hpp"
#include "disinr/rng.hpp"

using namespace disinr;

namespace {

double pearson(const Tensor& a, const Tensor& b) {
  auto av = a.data(), bv = b.data();
  REQUIRE(av.size() == bv.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    ma += double(av[i]);
    mb += double(bv[i]);
  }
  ma /= double(av.size());
  mb /= double(bv.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double da = double(av[i]) - ma, db = double(bv[i]) - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < av.size(); ++i)
    m = std::max(m, std::abs(double(av[i]) - double(bv[i])));
  return m;
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/disinr_test_") + name;
}

}  // namespace

TEST_CASE("phantoms live in the unit interval") {
  PhantomFamilyConfig cfg;
  cfg.extents = {96, 96};
  cfg.population = 3;
  cfg.lesion_prob = 1.0;
  for (const auto& img : gen_family(cfg)) {
    REQUIRE(img.shape() == Shape{96, 96});
    for (real v : img.data()) {
      CHECK(v >= real(0));
      CHECK(v <= real(1));
    }
  }
}

TEST_CASE("the head phantom has its canonical structure") {
  Tensor img = rasterize(shepp_logan_ellipses(), {128, 128});
  // outer shell is bright, the interior tissue sits near 0.2, outside is 0
  CHECK(double(img.at(8 * 128 + 64)) == doctest::Approx(1.0));
  CHECK(double(img.at(64 * 128 + 64)) == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(double(img.at(64 * 128)) == doctest::Approx(0.0));
}

TEST_CASE("zero perturbation reproduces the base phantom for every subject") {
  PhantomFamilyConfig cfg;
  cfg.extents = {64, 64};
  cfg.population = 4;
  cfg.center_jitter = 0.0;
  cfg.axis_jitter = 0.0;
  cfg.intensity_jitter = 0.0;
  cfg.lesion_prob = 0.0;
  auto family = gen_family(cfg);
  Tensor base = rasterize(shepp_logan_ellipses(), {64, 64});
  for (const auto& img : family) CHECK(max_abs_diff(img, base) == 0.0);
}

TEST_CASE("family generation is deterministic and jitter decorrelates subjects") {
  PhantomFamilyConfig cfg;
  cfg.extents = {64, 64};
  cfg.population = 5;
  cfg.seed = 31;
  auto a = gen_family(cfg);
  auto b = gen_family(cfg);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs_diff(a[i], b[i]) == 0.0);
  CHECK(max_abs_diff(a[0], a[1]) > 0.0);
}

TEST_CASE("the family mean tracks the base layout") {
  PhantomFamilyConfig cfg;
  cfg.extents = {64, 64};
  cfg.population = 50;
  cfg.seed = 7;
  cfg.lesion_prob = 0.3;
  auto family = gen_family(cfg);
  Tensor mean = Tensor::zeros({64, 64});
  auto mv = mean.data_mut();
  for (const auto& img : family) {
    auto iv = img.data();
    for (std::size_t p = 0; p < mv.size(); ++p) mv[p] += iv[p] / real(family.size());
  }
  Tensor base = rasterize(shepp_logan_ellipses(), {64, 64});
  CHECK(pearson(mean, base) > 0.9);
}

TEST_CASE("ellipse families differ across seeds but not across calls") {
  PhantomFamilyConfig cfg;
  cfg.family = PhantomFamily::EllipseFamily;
  cfg.extents = {64, 64};
  cfg.population = 2;
  cfg.seed = 100;
  auto a = gen_family(cfg);
  auto b = gen_family(cfg);
  CHECK(max_abs_diff(a[0], b[0]) == 0.0);
  cfg.seed = 101;
  auto c = gen_family(cfg);
  CHECK(pearson(a[0], c[0]) < 0.999);
}

TEST_CASE("bad phantom configs are rejected") {
  PhantomFamilyConfig cfg;
  cfg.population = 0;
  CHECK_THROWS_AS(gen_family(cfg), ConfigError);
  cfg.population = 1;
  cfg.axis_jitter = 1.5;
  CHECK_THROWS_AS(gen_family(cfg), ConfigError);
  cfg.axis_jitter = 0.1;
  cfg.extents = {0, 64};
  CHECK_THROWS_AS(gen_family(cfg), ConfigError);
  CHECK_THROWS_AS(rasterize({{0.0, 0.0, 0.0, 0.5, 0.0, 1.0}}, {32, 32}), ConfigError);
}

TEST_CASE("identity measurements without noise reproduce the image") {
  PhantomFamilyConfig cfg;
  cfg.extents = {32, 32};
  cfg.population = 3;
  auto family = gen_family(cfg);
  auto records = simulate_measurements(family, OperatorDescriptor::identity({32, 32}), 0.0, 5);
  REQUIRE(records.size() == 3);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(max_abs_diff(records[i].y, family[i]) == 0.0);
    CHECK(max_abs_diff(records[i].ground_truth, family[i]) == 0.0);
    CHECK(records[i].id == "s" + std::to_string(i));
  }
}

TEST_CASE("noiseless measurements equal the clean forward projection") {
  PhantomFamilyConfig cfg;
  cfg.extents = {64, 64};
  auto family = gen_family(cfg);
  FanBeamGeometry g = FanBeamGeometry::desk(8);
  g.image_h = 64;
  g.image_w = 64;
  auto desc = OperatorDescriptor::fanbeam(g);
  auto records = simulate_measurements(family, desc, 0.0, 9);
  Tensor clean = FanBeamOperator(g).apply(family[0]);
  CHECK(max_abs_diff(records[0].y, clean) == 0.0);
}

TEST_CASE("measurement noise has the requested strength") {
  Tensor flat = Tensor::full({128, 128}, real(0.5));
  const double sigma = 0.25;
  auto records = simulate_measurements({flat}, OperatorDescriptor::identity({128, 128}), sigma, 21);
  double ss = 0.0;
  auto yv = records[0].y.data();
  for (std::size_t p = 0; p < yv.size(); ++p) {
    const double d = double(yv[p]) - 0.5;
    ss += d * d;
  }
  const double measured = std::sqrt(ss / double(yv.size()));
  CHECK(measured == doctest::Approx(sigma).epsilon(0.05));

  // same seed, same noise; different seed, different noise
  auto again = simulate_measurements({flat}, OperatorDescriptor::identity({128, 128}), sigma, 21);
  CHECK(max_abs_diff(records[0].y, again[0].y) == 0.0);
  auto other = simulate_measurements({flat}, OperatorDescriptor::identity({128, 128}), sigma, 22);
  CHECK(max_abs_diff(records[0].y, other[0].y) > 0.0);
}

TEST_CASE("fourier descriptor rebuilds the same operator") {
  SamplingMaskConfig mc;
  mc.pattern = MaskPattern::Poisson;
  mc.af = 4.0;
  mc.acs = 8;
  mc.seed = 77;
  auto desc = OperatorDescriptor::fourier({32, 32}, mc, 3, 13);
  auto a = desc.instantiate();
  auto b = desc.instantiate();
  Tensor x({32, 32, 2});
  Rng rng(5);
  for (auto& v : x.data_mut()) v = static_cast<real>(rng.uniform(-1.0, 1.0));
  CHECK(max_abs_diff(a->apply(x), b->apply(x)) == 0.0);
  CHECK(a->out_shape() == Shape{3, 32, 32, 2});
}

TEST_CASE("records measured through the fourier operator carry real ground truth") {
  PhantomFamilyConfig cfg;
  cfg.extents = {32, 32};
  auto family = gen_family(cfg);
  SamplingMaskConfig mc;
  mc.af = 1.0;
  auto desc = OperatorDescriptor::fourier({32, 32}, mc, 1, 0);
  auto records = simulate_measurements(family, desc, 0.0, 3);
  // single coil + full mask: zero filling inverts the measurement exactly
  auto op = std::dynamic_pointer_cast<const FourierOperator>(desc.instantiate());
  REQUIRE(op);
  Tensor recon = complex_magnitude(zero_filling(*op, records[0].y));
  CHECK(max_abs_diff(recon, records[0].ground_truth) < 1e-4);
}

TEST_CASE("splits are disjoint, covering and deterministic") {
  PhantomFamilyConfig cfg;
  cfg.extents = {16, 16};
  cfg.population = 20;
  auto family = gen_family(cfg);
  auto records = simulate_measurements(family, OperatorDescriptor::identity({16, 16}), 0.0, 1);
  auto s = split_records(records, 0.6, 0.2, 0.2, 17);
  CHECK(s.pretrain.size() == 12);
  CHECK(s.test_in.size() == 4);
  CHECK(s.test_out.size() == 4);

  std::set<std::string> seen;
  for (const auto* group : {&s.pretrain, &s.test_in, &s.test_out})
    for (const auto& r : *group) CHECK(seen.insert(r.id).second);
  CHECK(seen.size() == records.size());

  auto again = split_records(records, 0.6, 0.2, 0.2, 17);
  for (std::size_t i = 0; i < s.pretrain.size(); ++i)
    CHECK(s.pretrain[i].id == again.pretrain[i].id);

  auto all = split_records(records, 1.0, 0.0, 0.0, 17);
  CHECK(all.pretrain.size() == 20);
  CHECK(all.test_in.empty());
  CHECK(all.test_out.empty());

  CHECK_THROWS_AS(split_records(records, 0.5, 0.2, 0.2, 17), ConfigError);
}

TEST_CASE("container round trips sections bitwise") {
  Tensor image({5, 4});
  Tensor kspace({2, 3, 3, 2});
  Rng rng(8);
  for (auto& v : image.data_mut()) v = static_cast<real>(rng.uniform(-2.0, 2.0));
  for (auto& v : kspace.data_mut()) v = static_cast<real>(rng.gaussian());
  const std::string path = temp_path("container.dinr");
  save_container(path, {{"image", "gt", image}, {"kspace", "y", kspace}});
  auto sections = load_container(path);
  REQUIRE(sections.size() == 2);
  CHECK(sections[0].kind == "image");
  CHECK(sections[0].name == "gt");
  REQUIRE(sections[0].data.shape() == image.shape());
  CHECK(max_abs_diff(sections[0].data, image) == 0.0);
  CHECK(sections[1].kind == "kspace");
  REQUIRE(sections[1].data.shape() == kspace.shape());
  CHECK(max_abs_diff(sections[1].data, kspace) == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("container rejects junk") {
  const std::string path = temp_path("container_bad.dinr");
  CHECK_THROWS_AS(save_container(path, {{"sonogram", "oops", Tensor::zeros({2, 2})}}),
                  ConfigError);
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("NOTADINR????", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_container(path), IoError);
  CHECK_THROWS_AS(load_container(temp_path("missing.dinr")), IoError);
  std::remove(path.c_str());
}

TEST_CASE("pgm export windows the image and records the window") {
  Tensor img({2, 3});
  img.data_mut()[0] = real(-1.0);
  img.data_mut()[1] = real(0.0);
  img.data_mut()[2] = real(1.0);
  img.data_mut()[3] = real(3.0);
  img.data_mut()[4] = real(0.5);
  img.data_mut()[5] = real(2.0);
  const std::string path = temp_path("img.pgm");
  save_pgm(path, img);
  Tensor back = load_pgm(path);
  REQUIRE(back.shape() == Shape{2, 3});
  // windowed to [-1, 3]: -1 -> 0, 3 -> 255
  CHECK(back.at(0) == real(0));
  CHECK(back.at(3) == real(1));
  CHECK(double(back.at(2)) == doctest::Approx(0.5).epsilon(0.01));

  std::ifstream sc(path + ".window.txt");
  REQUIRE(sc.good());
  std::string key;
  double lo = 0.0, hi = 0.0;
  sc >> key >> lo;
  CHECK(key == "min");
  CHECK(lo == doctest::Approx(-1.0));
  sc >> key >> hi;
  CHECK(key == "max");
  CHECK(hi == doctest::Approx(3.0));
  std::remove(path.c_str());
  std::remove((path + ".window.txt").c_str());
}

TEST_CASE("constant images export as mid-gray") {
  const std::string path = temp_path("flat.pgm");
  save_pgm(path, Tensor::full({4, 4}, real(0.7)));
  Tensor back = load_pgm(path);
  for (real v : back.data()) CHECK(double(v) == doctest::Approx(128.0 / 255.0));
  std::remove(path.c_str());
  std::remove((path + ".window.txt").c_str());
}
