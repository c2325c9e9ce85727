#pragma once

#include <functional>
#include <string>
#include <vector>

#include "disinr/tensor.hpp"

namespace disinr {

// Records backward rules in forward order; backward() replays them once each,
// in reverse. Ops only record while a tape is active (Tape::Scope), so the
// same code paths serve both training and pure evaluation.
class Tape {
 public:
  class Scope {
   public:
    explicit Scope(Tape& tape);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* previous_;
  };

  static Tape* active();

  void record(std::string op_name, std::function<void()> backward);
  // Seeds d(loss)/d(loss) = 1 and replays every node exactly once.
  void backward(const Tensor& loss);
  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    std::string op;
    std::function<void()> backward;
  };
  std::vector<Node> nodes_;
};

}  // namespace disinr
