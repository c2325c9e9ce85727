#include "disinr/ops.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>

#include "disinr/operators.hpp"
#include "disinr/threading.hpp"

namespace disinr::ops {
namespace {

using EMat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<EMat>;
using MapConst = Eigen::Map<const EMat>;

MapConst as_mat(const Tensor& t, std::int64_t rows, std::int64_t cols) {
  return MapConst(t.data().data(), rows, cols);
}
MapMat grad_mat(Tensor& t, std::int64_t rows, std::int64_t cols) {
  return MapMat(t.grad_mut().data(), rows, cols);
}

void require_2d(const Tensor& t, const char* op) {
  if (t.ndim() != 2) throw DimensionError(std::string(op) + ": expected 2-D tensor, got " + shape_str(t.shape()));
}

bool scalar_like(const Tensor& t) { return t.size() == 1; }

}  // namespace

namespace detail {

bool connect(Tensor& out, std::initializer_list<const Tensor*> inputs) {
  if (Tape::active() == nullptr) return false;
  bool any = false;
  for (const Tensor* t : inputs) any = any || t->grad_connected();
  if (any) out.mark_connected();
  return any;
}

void check_finite(const char* op, const Tensor& out) {
  if (finite_checks_enabled() && !out.all_finite())
    throw NumericalError(std::string(op) + " produced non-finite values");
}

}  // namespace detail

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul");
  require_2d(b, "matmul");
  const std::int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k)
    throw DimensionError("matmul: inner dimensions disagree, " + shape_str(a.shape()) + " * " +
                         shape_str(b.shape()));
  Tensor out({m, n});
  MapMat(out.data_mut().data(), m, n).noalias() = as_mat(a, m, k) * as_mat(b, k, n);
  detail::check_finite("matmul", out);
  if (detail::connect(out, {&a, &b})) {
    Tensor ac = a, bc = b, oc = out;
    Tape::active()->record("matmul", [ac, bc, oc, m, k, n]() mutable {
      if (!oc.has_grad()) return;
      MapConst g(oc.grad().data(), m, n);
      if (ac.grad_connected()) grad_mat(ac, m, k).noalias() += g * as_mat(bc, k, n).transpose();
      if (bc.grad_connected()) grad_mat(bc, k, n).noalias() += as_mat(ac, m, k).transpose() * g;
    });
  }
  return out;
}

namespace {

enum class BinKind { Add, Sub, Mul };

Tensor binary_op(const char* name, BinKind kind, const Tensor& a, const Tensor& b) {
  const bool sa = scalar_like(a), sb = scalar_like(b);
  if (!sa && !sb && a.shape() != b.shape())
    throw DimensionError(std::string(name) + ": incompatible shapes " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
  const Tensor& big = sa ? b : a;
  Tensor out(big.shape());
  auto av = a.data(), bv = b.data();
  auto ov = out.data_mut();
  const std::int64_t n = out.size();
  const real va = av[0], vb = bv[0];
  switch (kind) {
    case BinKind::Add:
      if (sa)
        for (std::int64_t i = 0; i < n; ++i) ov[i] = va + bv[i];
      else if (sb)
        for (std::int64_t i = 0; i < n; ++i) ov[i] = av[i] + vb;
      else
        for (std::int64_t i = 0; i < n; ++i) ov[i] = av[i] + bv[i];
      break;
    case BinKind::Sub:
      if (sa)
        for (std::int64_t i = 0; i < n; ++i) ov[i] = va - bv[i];
      else if (sb)
        for (std::int64_t i = 0; i < n; ++i) ov[i] = av[i] - vb;
      else
        for (std::int64_t i = 0; i < n; ++i) ov[i] = av[i] - bv[i];
      break;
    case BinKind::Mul:
      if (sa)
        for (std::int64_t i = 0; i < n; ++i) ov[i] = va * bv[i];
      else if (sb)
        for (std::int64_t i = 0; i < n; ++i) ov[i] = av[i] * vb;
      else
        for (std::int64_t i = 0; i < n; ++i) ov[i] = av[i] * bv[i];
      break;
  }
  detail::check_finite(name, out);
  if (detail::connect(out, {&a, &b})) {
    Tensor ac = a, bc = b, oc = out;
    Tape::active()->record(name, [name, kind, ac, bc, oc]() mutable {
      if (!oc.has_grad()) return;
      auto g = oc.grad();
      const std::int64_t n = oc.size();
      const bool sa = scalar_like(ac), sb = scalar_like(bc);
      auto reduce_into = [&](Tensor& t, auto per_elem) {
        // scalar operand: fixed-order double accumulation
        double acc = 0.0;
        for (std::int64_t i = 0; i < n; ++i) acc += per_elem(i);
        t.grad_mut()[0] += static_cast<real>(acc);
      };
      switch (kind) {
        case BinKind::Add:
          if (ac.grad_connected()) {
            if (sa && n > 1) reduce_into(ac, [&](std::int64_t i) { return double(g[i]); });
            else ac.accumulate_grad(g);
          }
          if (bc.grad_connected()) {
            if (sb && n > 1) reduce_into(bc, [&](std::int64_t i) { return double(g[i]); });
            else bc.accumulate_grad(g);
          }
          break;
        case BinKind::Sub:
          if (ac.grad_connected()) {
            if (sa && n > 1) reduce_into(ac, [&](std::int64_t i) { return double(g[i]); });
            else ac.accumulate_grad(g);
          }
          if (bc.grad_connected()) {
            if (sb && n > 1) reduce_into(bc, [&](std::int64_t i) { return -double(g[i]); });
            else {
              auto gb = bc.grad_mut();
              for (std::int64_t i = 0; i < n; ++i) gb[i] -= g[i];
            }
          }
          break;
        case BinKind::Mul: {
          auto av = ac.data(), bv = bc.data();
          if (ac.grad_connected()) {
            if (sa && n > 1) reduce_into(ac, [&](std::int64_t i) { return double(g[i]) * double(bv[i]); });
            else {
              auto ga = ac.grad_mut();
              if (sb)
                for (std::int64_t i = 0; i < n; ++i) ga[i] += g[i] * bv[0];
              else
                for (std::int64_t i = 0; i < n; ++i) ga[i] += g[i] * bv[i];
            }
          }
          if (bc.grad_connected()) {
            if (sb && n > 1) reduce_into(bc, [&](std::int64_t i) { return double(g[i]) * double(av[i]); });
            else {
              auto gb = bc.grad_mut();
              if (sa)
                for (std::int64_t i = 0; i < n; ++i) gb[i] += g[i] * av[0];
              else
                for (std::int64_t i = 0; i < n; ++i) gb[i] += g[i] * av[i];
            }
          }
          break;
        }
      }
    });
  }
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary_op("add", BinKind::Add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary_op("sub", BinKind::Sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary_op("mul", BinKind::Mul, a, b); }

Tensor scale(const Tensor& x, real factor) {
  Tensor out(x.shape());
  auto xv = x.data();
  auto ov = out.data_mut();
  for (std::int64_t i = 0; i < x.size(); ++i) ov[i] = xv[i] * factor;
  detail::check_finite("scale", out);
  if (detail::connect(out, {&x})) {
    Tensor xc = x, oc = out;
    Tape::active()->record("scale", [xc, oc, factor]() mutable {
      if (!oc.has_grad()) return;
      auto g = oc.grad();
      auto gx = xc.grad_mut();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * factor;
    });
  }
  return out;
}

Tensor add_scalar(const Tensor& x, real c) {
  Tensor out(x.shape());
  auto xv = x.data();
  auto ov = out.data_mut();
  for (std::int64_t i = 0; i < x.size(); ++i) ov[i] = xv[i] + c;
  detail::check_finite("add_scalar", out);
  if (detail::connect(out, {&x})) {
    Tensor xc = x, oc = out;
    Tape::active()->record("add_scalar", [xc, oc]() mutable {
      if (!oc.has_grad()) return;
      xc.accumulate_grad(oc.grad());
    });
  }
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out(x.shape());
  auto xv = x.data();
  auto ov = out.data_mut();
  for (std::int64_t i = 0; i < x.size(); ++i) ov[i] = xv[i] > real(0) ? xv[i] : real(0);
  detail::check_finite("relu", out);
  if (detail::connect(out, {&x})) {
    Tensor xc = x, oc = out;
    Tape::active()->record("relu", [xc, oc]() mutable {
      if (!oc.has_grad()) return;
      auto g = oc.grad();
      auto xv = xc.data();
      auto gx = xc.grad_mut();
      for (std::size_t i = 0; i < gx.size(); ++i)
        if (xv[i] > real(0)) gx[i] += g[i];
    });
  }
  return out;
}

Tensor sine(const Tensor& x) {
  Tensor out(x.shape());
  auto xv = x.data();
  auto ov = out.data_mut();
  for (std::int64_t i = 0; i < x.size(); ++i) ov[i] = std::sin(xv[i]);
  detail::check_finite("sine", out);
  if (detail::connect(out, {&x})) {
    Tensor xc = x, oc = out;
    Tape::active()->record("sine", [xc, oc]() mutable {
      if (!oc.has_grad()) return;
      auto g = oc.grad();
      auto xv = xc.data();
      auto gx = xc.grad_mut();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * std::cos(xv[i]);
    });
  }
  return out;
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  require_2d(x, "add_bias");
  const std::int64_t r = x.dim(0), n = x.dim(1);
  if (bias.size() != n)
    throw DimensionError("add_bias: bias " + shape_str(bias.shape()) + " vs features " +
                         std::to_string(n));
  Tensor out({r, n});
  auto xv = x.data();
  auto bv = bias.data();
  auto ov = out.data_mut();
  for (std::int64_t i = 0; i < r; ++i)
    for (std::int64_t j = 0; j < n; ++j) ov[i * n + j] = xv[i * n + j] + bv[j];
  detail::check_finite("add_bias", out);
  if (detail::connect(out, {&x, &bias})) {
    Tensor xc = x, bc = bias, oc = out;
    Tape::active()->record("add_bias", [xc, bc, oc, r, n]() mutable {
      if (!oc.has_grad()) return;
      auto g = oc.grad();
      if (xc.grad_connected()) xc.accumulate_grad(g);
      if (bc.grad_connected()) {
        auto gb = bc.grad_mut();
        for (std::int64_t j = 0; j < n; ++j) {
          double acc = 0.0;
          for (std::int64_t i = 0; i < r; ++i) acc += double(g[i * n + j]);
          gb[j] += static_cast<real>(acc);
        }
      }
    });
  }
  return out;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  require_2d(a, "concat_cols");
  require_2d(b, "concat_cols");
  const std::int64_t r = a.dim(0), p = a.dim(1), q = b.dim(1);
  if (b.dim(0) != r)
    throw DimensionError("concat_cols: row counts disagree, " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  Tensor out({r, p + q});
  auto av = a.data(), bv = b.data();
  auto ov = out.data_mut();
  for (std::int64_t i = 0; i < r; ++i) {
    std::memcpy(&ov[i * (p + q)], &av[i * p], sizeof(real) * static_cast<std::size_t>(p));
    std::memcpy(&ov[i * (p + q) + p], &bv[i * q], sizeof(real) * static_cast<std::size_t>(q));
  }
  if (detail::connect(out, {&a, &b})) {
    Tensor ac = a, bc = b, oc = out;
    Tape::active()->record("concat_cols", [ac, bc, oc, r, p, q]() mutable {
      if (!oc.has_grad()) return;
      auto g = oc.grad();
      if (ac.grad_connected()) {
        auto ga = ac.grad_mut();
        for (std::int64_t i = 0; i < r; ++i)
          for (std::int64_t j = 0; j < p; ++j) ga[i * p + j] += g[i * (p + q) + j];
      }
      if (bc.grad_connected()) {
        auto gb = bc.grad_mut();
        for (std::int64_t i = 0; i < r; ++i)
          for (std::int64_t j = 0; j < q; ++j) gb[i * q + j] += g[i * (p + q) + p + j];
      }
    });
  }
  return out;
}

Tensor slice_cols(const Tensor& x, std::int64_t c0, std::int64_t c1) {
  require_2d(x, "slice_cols");
  const std::int64_t r = x.dim(0), n = x.dim(1);
  if (c0 < 0 || c1 > n || c0 >= c1)
    throw DimensionError("slice_cols: range [" + std::to_string(c0) + "," + std::to_string(c1) +
                         ") out of " + std::to_string(n) + " columns");
  const std::int64_t w = c1 - c0;
  Tensor out({r, w});
  auto xv = x.data();
  auto ov = out.data_mut();
  for (std::int64_t i = 0; i < r; ++i)
    std::memcpy(&ov[i * w], &xv[i * n + c0], sizeof(real) * static_cast<std::size_t>(w));
  if (detail::connect(out, {&x})) {
    Tensor xc = x, oc = out;
    Tape::active()->record("slice_cols", [xc, oc, r, n, c0, w]() mutable {
      if (!oc.has_grad()) return;
      auto g = oc.grad();
      auto gx = xc.grad_mut();
      for (std::int64_t i = 0; i < r; ++i)
        for (std::int64_t j = 0; j < w; ++j) gx[i * n + c0 + j] += g[i * w + j];
    });
  }
  return out;
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.size())
    throw DimensionError("reshape: " + shape_str(x.shape()) + " to " + shape_str(shape));
  Tensor out(std::move(shape));
  auto xv = x.data();
  std::memcpy(out.data_mut().data(), xv.data(), sizeof(real) * xv.size());
  if (detail::connect(out, {&x})) {
    Tensor xc = x, oc = out;
    Tape::active()->record("reshape", [xc, oc]() mutable {
      if (!oc.has_grad()) return;
      xc.accumulate_grad(oc.grad());
    });
  }
  return out;
}

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (real v : x.data()) acc += double(v);
  Tensor out = Tensor::scalar(static_cast<real>(acc));
  detail::check_finite("sum", out);
  if (detail::connect(out, {&x})) {
    Tensor xc = x, oc = out;
    Tape::active()->record("sum", [xc, oc]() mutable {
      if (!oc.has_grad()) return;
      const real g = oc.grad()[0];
      auto gx = xc.grad_mut();
      for (auto& v : gx) v += g;
    });
  }
  return out;
}

Tensor l1_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape())
    throw DimensionError("l1_loss: shapes disagree, " + shape_str(pred.shape()) + " vs " +
                         shape_str(target.shape()));
  const std::int64_t n = pred.size();
  auto pv = pred.data(), tv = target.data();
  double acc = 0.0;
  for (std::int64_t i = 0; i < n; ++i) acc += std::abs(double(pv[i]) - double(tv[i]));
  Tensor out = Tensor::scalar(static_cast<real>(acc / double(n)));
  detail::check_finite("l1_loss", out);
  if (detail::connect(out, {&pred, &target})) {
    Tensor pc = pred, tc = target, oc = out;
    Tape::active()->record("l1_loss", [pc, tc, oc, n]() mutable {
      if (!oc.has_grad()) return;
      const real g = oc.grad()[0] / static_cast<real>(n);
      auto pv = pc.data();
      auto tv = tc.data();
      auto signed_g = [&](std::int64_t i) {
        const real d = pv[i] - tv[i];
        return d > real(0) ? g : (d < real(0) ? -g : real(0));
      };
      if (pc.grad_connected()) {
        auto gp = pc.grad_mut();
        for (std::int64_t i = 0; i < n; ++i) gp[i] += signed_g(i);
      }
      if (tc.grad_connected()) {
        auto gt = tc.grad_mut();
        for (std::int64_t i = 0; i < n; ++i) gt[i] -= signed_g(i);
      }
    });
  }
  return out;
}

Tensor apply_operator(std::shared_ptr<const LinearOperator> op, const Tensor& x) {
  if (!op) throw ConfigError("apply_operator: null operator");
  Tensor out = op->apply(x);
  detail::check_finite("apply_operator", out);
  if (detail::connect(out, {&x})) {
    Tensor xc = x, oc = out;
    Tape::active()->record("apply_operator", [op, xc, oc]() mutable {
      if (!oc.has_grad()) return;
      Tensor gy = Tensor::from_data(oc.shape(), std::vector<real>(oc.grad().begin(), oc.grad().end()));
      Tensor gx = op->adjoint(gy);
      xc.accumulate_grad(gx.data());
    });
  }
  return out;
}

}  // namespace disinr::ops
