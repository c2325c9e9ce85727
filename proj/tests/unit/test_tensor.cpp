#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "disinr/tensor.hpp"

using namespace disinr;

TEST_CASE("shape and size bookkeeping") {
  Tensor t({2, 3});
  CHECK(t.ndim() == 2);
  CHECK(t.dim(0) == 2);
  CHECK(t.dim(1) == 3);
  CHECK(t.size() == 6);
  CHECK(numel(t.shape()) == static_cast<std::int64_t>(t.data().size()));

  CHECK_THROWS_AS(Tensor({2, 0}), DimensionError);
  CHECK_THROWS_AS(Tensor({-1}), DimensionError);
}

TEST_CASE("factories") {
  Tensor z = Tensor::zeros({4});
  for (real v : z.data()) CHECK(v == real(0));

  Tensor f = Tensor::full({2, 2}, real(1.5));
  for (real v : f.data()) CHECK(v == real(1.5));

  Tensor d = Tensor::from_data({3}, {real(1), real(2), real(3)});
  CHECK(d.at(2) == real(3));
  CHECK_THROWS_AS(Tensor::from_data({3}, {real(1)}), DimensionError);

  Tensor s = Tensor::scalar(real(7));
  CHECK(s.size() == 1);
  CHECK(s.item() == real(7));
}

TEST_CASE("item requires a single element") {
  Tensor t = Tensor::zeros({2});
  CHECK_THROWS_AS(t.item(), DimensionError);
}

TEST_CASE("copying shares storage, clone does not") {
  Tensor a = Tensor::from_data({2}, {real(1), real(2)});
  Tensor b = a;
  CHECK(a.same_storage(b));
  b.data_mut()[0] = real(9);
  CHECK(a.at(0) == real(9));

  Tensor c = a.clone();
  CHECK_FALSE(a.same_storage(c));
  c.data_mut()[0] = real(5);
  CHECK(a.at(0) == real(9));
}

TEST_CASE("grad accumulator is lazy and shape-checked") {
  Tensor t = Tensor::zeros({3});
  CHECK_FALSE(t.has_grad());
  auto g = t.grad_mut();
  CHECK(t.has_grad());
  CHECK(g.size() == 3);
  for (real v : g) CHECK(v == real(0));

  t.accumulate_grad(std::vector<real>{real(1), real(1), real(1)});
  CHECK(t.grad()[0] == real(1));
  t.accumulate_grad(std::vector<real>{real(0.5), real(0), real(0)});
  CHECK(t.grad()[0] == real(1.5));

  CHECK_THROWS_AS(t.accumulate_grad(std::vector<real>{real(1)}), DimensionError);

  t.zero_grad();
  CHECK(t.grad()[0] == real(0));
  t.drop_grad();
  CHECK_FALSE(t.has_grad());
}

TEST_CASE("requires_grad marks the tensor connected") {
  Tensor t = Tensor::zeros({1});
  CHECK_FALSE(t.grad_connected());
  t.set_requires_grad(true);
  CHECK(t.requires_grad());
  CHECK(t.grad_connected());
}

TEST_CASE("all_finite flags NaN and Inf") {
  Tensor t = Tensor::from_data({2}, {real(1), real(2)});
  CHECK(t.all_finite());
  t.data_mut()[1] = std::numeric_limits<real>::quiet_NaN();
  CHECK_FALSE(t.all_finite());
  t.data_mut()[1] = std::numeric_limits<real>::infinity();
  CHECK_FALSE(t.all_finite());
}
