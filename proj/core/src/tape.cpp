#include "disinr/tape.hpp"

namespace disinr {
namespace {
thread_local Tape* g_active_tape = nullptr;
}

Tape::Scope::Scope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }
Tape::Scope::~Scope() { g_active_tape = previous_; }

Tape* Tape::active() { return g_active_tape; }

void Tape::record(std::string op_name, std::function<void()> backward) {
  nodes_.push_back({std::move(op_name), std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
  if (loss.size() != 1) throw DimensionError("backward() requires a scalar loss");
  Tensor seed = loss;  // shared storage
  seed.grad_mut()[0] += real(1);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->backward();
}

}  // namespace disinr
