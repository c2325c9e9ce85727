#include "disinr/operators.hpp"

namespace disinr {

void LinearOperator::check_in(const Tensor& x) const {
  if (x.shape() != in_shape())
    throw DimensionError(kind() + ": input " + shape_str(x.shape()) + ", expected " +
                         shape_str(in_shape()));
}

void LinearOperator::check_out(const Tensor& y) const {
  if (y.shape() != out_shape())
    throw DimensionError(kind() + ": measurement " + shape_str(y.shape()) + ", expected " +
                         shape_str(out_shape()));
}

IdentityOperator::IdentityOperator(Shape shape) : shape_(std::move(shape)) {
  if (numel(shape_) <= 0) throw DimensionError("identity: empty shape");
}

Tensor IdentityOperator::apply(const Tensor& x) const {
  check_in(x);
  return x.clone();
}

Tensor IdentityOperator::adjoint(const Tensor& y) const {
  check_out(y);
  return y.clone();
}

}  // namespace disinr
