#pragma once

#include <memory>
#include <string>

#include "disinr/tensor.hpp"

namespace disinr {

// Linear measurement model A. `apply` maps an image-domain tensor to the
// measurement domain; `adjoint` is the exact transpose (same weights,
// scatter instead of gather), which backpropagation relies on.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Tensor apply(const Tensor& x) const = 0;
  virtual Tensor adjoint(const Tensor& y) const = 0;

  virtual Shape in_shape() const = 0;
  virtual Shape out_shape() const = 0;

  // Short stable identifier ("identity", "fanbeam", "fourier").
  virtual std::string kind() const = 0;

  void check_in(const Tensor& x) const;
  void check_out(const Tensor& y) const;
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(Shape shape);

  Tensor apply(const Tensor& x) const override;
  Tensor adjoint(const Tensor& y) const override;
  Shape in_shape() const override { return shape_; }
  Shape out_shape() const override { return shape_; }
  std::string kind() const override { return "identity"; }

 private:
  Shape shape_;
};

}  // namespace disinr
