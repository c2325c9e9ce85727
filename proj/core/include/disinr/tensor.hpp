#pragma once

#include <memory>
#include <span>
#include <vector>

#include "disinr/common.hpp"

namespace disinr {

// Dense real tensor with shared storage. Copying a Tensor copies the handle;
// clone() copies the data. A tensor is "grad-connected" when it requires
// gradients itself or was produced from a connected input while a tape was
// active; only connected tensors receive gradient accumulation.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);

  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, real value);
  static Tensor from_data(Shape shape, std::vector<real> data);
  static Tensor scalar(real value);

  bool defined() const { return st_ != nullptr; }
  const Shape& shape() const;
  int ndim() const;
  std::int64_t dim(int axis) const;
  std::int64_t size() const;

  std::span<const real> data() const;
  std::span<real> data_mut();
  real item() const;
  real at(std::int64_t i) const { return data()[static_cast<std::size_t>(i)]; }

  bool requires_grad() const;
  Tensor& set_requires_grad(bool on = true);
  bool grad_connected() const;
  void mark_connected();

  bool has_grad() const;
  std::span<const real> grad() const;
  // Allocates a zero-filled accumulator on first use.
  std::span<real> grad_mut();
  void zero_grad();
  void drop_grad();
  void accumulate_grad(std::span<const real> g);

  Tensor clone() const;
  bool all_finite() const;
  bool same_storage(const Tensor& other) const { return st_ == other.st_; }
  const void* storage_id() const { return st_.get(); }

 private:
  struct Storage {
    Shape shape;
    std::vector<real> data;
    std::vector<real> grad;  // empty until touched by backward
    bool requires_grad = false;
    bool connected = false;
  };
  std::shared_ptr<Storage> st_;
};

}  // namespace disinr
