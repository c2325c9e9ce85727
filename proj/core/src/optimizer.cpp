#include "disinr/optimizer.hpp"

#include <cmath>

namespace disinr {

void TrainConfig::validate() const {
  if (iterations < 1) throw ConfigError("train: iterations must be positive");
  if (lr <= 0.0) throw ConfigError("train: learning rate must be positive");
  if (lr_decay <= 0.0 || lr_decay > 1.0)
    throw ConfigError("train: lr decay factor must lie in (0, 1]");
  if (decay_interval < 1) throw ConfigError("train: decay interval must be positive");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0)
    throw ConfigError("train: Adam betas must lie in [0, 1)");
  if (adam_eps <= 0.0) throw ConfigError("train: Adam epsilon must be positive");
  if (log_interval < 1) throw ConfigError("train: log interval must be positive");
}

double scheduled_lr(const TrainConfig& cfg, int iteration) {
  return cfg.lr * std::pow(cfg.lr_decay, iteration / cfg.decay_interval);
}

Adam::Adam(ParameterSet& params, TrainConfig cfg) : params_(params), cfg_(std::move(cfg)) {
  cfg_.validate();
}

void Adam::step(int iteration) {
  const double lr = scheduled_lr(cfg_, iteration);
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.adam_beta1, double(t_));
  const double bc2 = 1.0 - std::pow(cfg_.adam_beta2, double(t_));

  for (auto& part : params_.partitions()) {
    if (part.frozen) continue;
    auto& slots = moments_[part.name];
    slots.resize(part.tensors.size());
    for (std::size_t k = 0; k < part.tensors.size(); ++k) {
      Tensor& p = part.tensors[k];
      auto& mom = slots[k];
      const auto n = static_cast<std::size_t>(p.size());
      if (mom.m.size() != n) {
        mom.m.assign(n, 0.0);
        mom.v.assign(n, 0.0);
      }
      auto pv = p.data_mut();
      const bool has_grad = p.has_grad();
      auto gv = has_grad ? p.grad() : std::span<const real>{};
      for (std::size_t i = 0; i < n; ++i) {
        const double g = has_grad ? double(gv[i]) : 0.0;
        if (std::isnan(g))
          throw NumericalError("adam: NaN gradient in partition '" + part.name + "' tensor " +
                               std::to_string(k) + " at step " + std::to_string(t_));
        mom.m[i] = cfg_.adam_beta1 * mom.m[i] + (1.0 - cfg_.adam_beta1) * g;
        mom.v[i] = cfg_.adam_beta2 * mom.v[i] + (1.0 - cfg_.adam_beta2) * g * g;
        const double mhat = mom.m[i] / bc1;
        const double vhat = mom.v[i] / bc2;
        pv[i] = static_cast<real>(double(pv[i]) - lr * mhat / (std::sqrt(vhat) + cfg_.adam_eps));
      }
    }
  }
}

void Adam::reset_moments() {
  moments_.clear();
  t_ = 0;
}

}  // namespace disinr
