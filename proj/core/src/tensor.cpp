#include "disinr/tensor.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace disinr {

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << 'x';
    os << s[i];
  }
  os << ']';
  return os.str();
}

namespace {
bool g_finite_checks = false;
}

void set_finite_checks(bool on) { g_finite_checks = on; }
bool finite_checks_enabled() { return g_finite_checks; }

Tensor::Tensor(Shape shape) {
  for (auto e : shape) {
    if (e <= 0) throw DimensionError("tensor extents must be positive, got " + shape_str(shape));
  }
  st_ = std::make_shared<Storage>();
  st_->data.assign(static_cast<std::size_t>(numel(shape)), real(0));
  st_->shape = std::move(shape);
}

Tensor Tensor::zeros(Shape shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(Shape shape, real value) {
  Tensor t(std::move(shape));
  for (auto& v : t.st_->data) v = value;
  return t;
}

Tensor Tensor::from_data(Shape shape, std::vector<real> data) {
  Tensor t(std::move(shape));
  if (t.size() != static_cast<std::int64_t>(data.size()))
    throw DimensionError("from_data: " + std::to_string(data.size()) + " values for shape " +
                         shape_str(t.shape()));
  t.st_->data = std::move(data);
  return t;
}

Tensor Tensor::scalar(real value) { return full({1}, value); }

const Shape& Tensor::shape() const { return st_->shape; }
int Tensor::ndim() const { return static_cast<int>(st_->shape.size()); }
std::int64_t Tensor::dim(int axis) const { return st_->shape[static_cast<std::size_t>(axis)]; }
std::int64_t Tensor::size() const { return static_cast<std::int64_t>(st_->data.size()); }

std::span<const real> Tensor::data() const { return st_->data; }
std::span<real> Tensor::data_mut() { return st_->data; }

real Tensor::item() const {
  if (size() != 1) throw DimensionError("item() on non-scalar tensor " + shape_str(shape()));
  return st_->data[0];
}

bool Tensor::requires_grad() const { return st_ && st_->requires_grad; }

Tensor& Tensor::set_requires_grad(bool on) {
  // leaf toggle: freezing a parameter also disconnects it from the tape
  st_->requires_grad = on;
  st_->connected = on;
  return *this;
}

bool Tensor::grad_connected() const { return st_ && st_->connected; }
void Tensor::mark_connected() { st_->connected = true; }

bool Tensor::has_grad() const { return st_ && !st_->grad.empty(); }

std::span<const real> Tensor::grad() const { return st_->grad; }

std::span<real> Tensor::grad_mut() {
  if (st_->grad.empty()) st_->grad.assign(st_->data.size(), real(0));
  return st_->grad;
}

void Tensor::zero_grad() {
  if (!st_->grad.empty()) std::fill(st_->grad.begin(), st_->grad.end(), real(0));
}

void Tensor::drop_grad() { st_->grad.clear(); }

void Tensor::accumulate_grad(std::span<const real> g) {
  auto dst = grad_mut();
  if (g.size() != dst.size()) throw DimensionError("gradient size mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
}

Tensor Tensor::clone() const {
  Tensor t;
  t.st_ = std::make_shared<Storage>();
  t.st_->shape = st_->shape;
  t.st_->data = st_->data;
  return t;
}

bool Tensor::all_finite() const {
  for (real v : st_->data) {
    if (!std::isfinite(static_cast<double>(v))) return false;
  }
  return true;
}

}  // namespace disinr
