#include "disinr/params.hpp"

namespace disinr {

std::int64_t Partition::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

Partition& ParameterSet::add(const std::string& name) {
  if (has(name)) throw LookupError("parameter partition already exists: " + name);
  parts_.push_back(Partition{name, {}, false});
  return parts_.back();
}

bool ParameterSet::has(const std::string& name) const {
  for (const auto& p : parts_)
    if (p.name == name) return true;
  return false;
}

Partition& ParameterSet::get(const std::string& name) {
  for (auto& p : parts_)
    if (p.name == name) return p;
  throw LookupError("unknown parameter partition: " + name);
}

const Partition& ParameterSet::get(const std::string& name) const {
  for (const auto& p : parts_)
    if (p.name == name) return p;
  throw LookupError("unknown parameter partition: " + name);
}

void ParameterSet::freeze(const std::vector<std::string>& names) {
  for (const auto& n : names) {
    Partition& p = get(n);
    p.frozen = true;
    for (auto& t : p.tensors) {
      t.set_requires_grad(false);
      t.drop_grad();
    }
  }
}

void ParameterSet::unfreeze(const std::vector<std::string>& names) {
  for (const auto& n : names) {
    Partition& p = get(n);
    p.frozen = false;
    for (auto& t : p.tensors) t.set_requires_grad(true);
  }
}

void ParameterSet::freeze_all() {
  std::vector<std::string> all = names();
  freeze(all);
}

std::vector<std::string> ParameterSet::names() const {
  std::vector<std::string> out;
  out.reserve(parts_.size());
  for (const auto& p : parts_) out.push_back(p.name);
  return out;
}

std::int64_t ParameterSet::total_count() const {
  std::int64_t n = 0;
  for (const auto& p : parts_) n += p.parameter_count();
  return n;
}

std::int64_t ParameterSet::trainable_count() const {
  std::int64_t n = 0;
  for (const auto& p : parts_)
    if (!p.frozen) n += p.parameter_count();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : parts_)
    for (auto& t : p.tensors) t.zero_grad();
}

Tensor track(Partition& part, Tensor t) {
  t.set_requires_grad(true);
  part.tensors.push_back(t);
  return t;
}

}  // namespace disinr
