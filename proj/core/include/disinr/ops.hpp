#pragma once

#include <initializer_list>
#include <memory>

#include "disinr/tape.hpp"
#include "disinr/tensor.hpp"

namespace disinr {

class LinearOperator;

namespace ops {

// a [MxK] * b [KxN] -> [MxN]
Tensor matmul(const Tensor& a, const Tensor& b);

// Elementwise; operands must have equal shapes, or one of them may be a
// single-element tensor broadcast against the other.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& x, real factor);
Tensor add_scalar(const Tensor& x, real c);
Tensor relu(const Tensor& x);
Tensor sine(const Tensor& x);

// x [RxN] + bias [N] (or [1xN]) broadcast over rows.
Tensor add_bias(const Tensor& x, const Tensor& bias);

// Columns of a then columns of b; backward splits the incoming gradient.
Tensor concat_cols(const Tensor& a, const Tensor& b);
// Column range [c0, c1) of a 2-D tensor.
Tensor slice_cols(const Tensor& x, std::int64_t c0, std::int64_t c1);

Tensor reshape(const Tensor& x, Shape shape);

Tensor sum(const Tensor& x);
// Mean absolute deviation; subgradient uses sign(0) = 0.
Tensor l1_loss(const Tensor& pred, const Tensor& target);

// y = A(x); the backward contribution is the operator's adjoint.
Tensor apply_operator(std::shared_ptr<const LinearOperator> op, const Tensor& x);

namespace detail {
// True when a tape is active and any input is grad-connected; marks out.
bool connect(Tensor& out, std::initializer_list<const Tensor*> inputs);
void check_finite(const char* op, const Tensor& out);
}  // namespace detail

}  // namespace ops
}  // namespace disinr
