#pragma once

#include <string>
#include <vector>

#include "disinr/tensor.hpp"

namespace disinr {

// Named group of trainable tensors. Freezing a partition clears requires_grad
// on its tensors (so the tape skips their gradient paths) and excludes the
// partition from optimizer updates; forward evaluation is unaffected.
struct Partition {
  std::string name;
  std::vector<Tensor> tensors;
  bool frozen = false;

  std::int64_t parameter_count() const;
};

class ParameterSet {
 public:
  Partition& add(const std::string& name);
  bool has(const std::string& name) const;
  Partition& get(const std::string& name);
  const Partition& get(const std::string& name) const;

  void freeze(const std::vector<std::string>& names);
  void unfreeze(const std::vector<std::string>& names);
  void freeze_all();

  const std::vector<Partition>& partitions() const { return parts_; }
  std::vector<Partition>& partitions() { return parts_; }

  std::vector<std::string> names() const;
  std::int64_t total_count() const;
  std::int64_t trainable_count() const;

  void zero_grad();

 private:
  std::vector<Partition> parts_;  // insertion order, stable across runs
};

// Registers `t` in the partition and marks it trainable.
Tensor track(Partition& part, Tensor t);

}  // namespace disinr
