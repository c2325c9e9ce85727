#include "disinr/models.hpp"

#include <algorithm>
#include <cmath>

#include "disinr/ops.hpp"

namespace disinr {
namespace {

Tensor he_uniform(std::int64_t fan_in, std::int64_t fan_out, double scale, Rng& rng) {
  const double bound = scale * std::sqrt(6.0 / double(fan_in));
  Tensor w({fan_in, fan_out});
  for (auto& v : w.data_mut()) v = static_cast<real>(rng.uniform(-bound, bound));
  return w;
}

Tensor siren_first_layer(std::int64_t fan_in, std::int64_t fan_out, double scale, Rng& rng) {
  const double bound = scale / double(fan_in);
  Tensor w({fan_in, fan_out});
  for (auto& v : w.data_mut()) v = static_cast<real>(rng.uniform(-bound, bound));
  return w;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::DisINR: return "disinr";
    case ModelKind::NaiveINR: return "naive";
    case ModelKind::StrainerLike: return "strainer";
  }
  throw ConfigError("unknown model kind");
}

std::string to_string(Backbone backbone) {
  switch (backbone) {
    case Backbone::NGP: return "ngp";
    case Backbone::NeRF: return "nerf";
    case Backbone::SIREN: return "siren";
  }
  throw ConfigError("unknown backbone");
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "disinr") return ModelKind::DisINR;
  if (s == "naive") return ModelKind::NaiveINR;
  if (s == "strainer") return ModelKind::StrainerLike;
  throw ConfigError("unknown model kind: " + s);
}

Backbone backbone_from_string(const std::string& s) {
  if (s == "ngp") return Backbone::NGP;
  if (s == "nerf") return Backbone::NeRF;
  if (s == "siren") return Backbone::SIREN;
  throw ConfigError("unknown backbone: " + s);
}

std::int64_t ModelConfig::encoding_dim() const {
  switch (backbone) {
    case Backbone::NGP: return hash.feature_dim();
    case Backbone::NeRF: return std::int64_t(2) * dims * fourier_freqs;
    case Backbone::SIREN: return siren_features;
  }
  throw ConfigError("unknown backbone");
}

void ModelConfig::validate() const {
  if (dims < 1 || dims > 3) throw ConfigError("model: dims must be 1..3");
  if (channels != 1 && channels != 2) throw ConfigError("model: channels must be 1 or 2");
  if (encoder_hidden < 1 || decoder_hidden < 1) throw ConfigError("model: hidden widths must be positive");
  if (backbone == Backbone::NGP) hash.validate();
  if (backbone == Backbone::NeRF && fourier_freqs < 1)
    throw ConfigError("model: fourier_freqs must be positive");
  if (backbone == Backbone::SIREN && siren_features < 1)
    throw ConfigError("model: siren_features must be positive");
}

std::string Model::subject_partition(const std::string& subject) { return "subject:" + subject; }

Model::EncoderHandles Model::init_encoder(Partition& part, int hidden, Rng& rng) const {
  EncoderHandles enc;
  enc.hidden = hidden;
  std::int64_t in_dim = cfg_.encoding_dim();
  switch (cfg_.backbone) {
    case Backbone::NGP: {
      enc.table = HashTable::init(cfg_.hash, cfg_.dims, rng, cfg_.table_init_scale);
      for (auto& level : enc.table.levels) level = track(part, level);
      break;
    }
    case Backbone::NeRF:
      break;
    case Backbone::SIREN:
      enc.siren_w = track(part, siren_first_layer(cfg_.dims, cfg_.siren_features, cfg_.init_scale, rng));
      enc.siren_b = track(part, Tensor::zeros({cfg_.siren_features}));
      break;
  }
  enc.w1 = track(part, he_uniform(in_dim, hidden, cfg_.init_scale, rng));
  enc.b1 = track(part, Tensor::zeros({hidden}));
  enc.w2 = track(part, he_uniform(hidden, hidden, cfg_.init_scale, rng));
  enc.b2 = track(part, Tensor::zeros({hidden}));
  return enc;
}

Model::DecoderHandles Model::init_decoder(Partition& part, std::int64_t in_dim, Rng& rng) const {
  DecoderHandles dec;
  dec.w1 = track(part, he_uniform(in_dim, cfg_.decoder_hidden, cfg_.init_scale, rng));
  dec.b1 = track(part, Tensor::zeros({cfg_.decoder_hidden}));
  dec.w2 = track(part, he_uniform(cfg_.decoder_hidden, cfg_.channels, cfg_.init_scale, rng));
  dec.b2 = track(part, Tensor::zeros({cfg_.channels}));
  return dec;
}

Tensor Model::encoder_forward(const EncoderHandles& enc, const Tensor& coords) const {
  Tensor feat;
  switch (cfg_.backbone) {
    case Backbone::NGP:
      feat = hash_encode(enc.table, coords);
      break;
    case Backbone::NeRF:
      feat = fourier_encode(coords, cfg_.fourier_freqs);
      break;
    case Backbone::SIREN:
      feat = ops::sine(ops::scale(ops::add_bias(ops::matmul(coords, enc.siren_w), enc.siren_b),
                                  static_cast<real>(cfg_.siren_omega)));
      break;
  }
  Tensor h = ops::relu(ops::add_bias(ops::matmul(feat, enc.w1), enc.b1));
  return ops::relu(ops::add_bias(ops::matmul(h, enc.w2), enc.b2));
}

Tensor Model::decoder_forward(const DecoderHandles& dec, const Tensor& h) const {
  Tensor z = ops::relu(ops::add_bias(ops::matmul(h, dec.w1), dec.b1));
  return ops::add_bias(ops::matmul(z, dec.w2), dec.b2);
}

Model Model::build(const ModelConfig& cfg, int num_subjects, std::uint64_t seed) {
  cfg.validate();
  if (num_subjects < 0) throw ConfigError("model: negative subject count");
  Model m;
  m.cfg_ = cfg;
  switch (cfg.kind) {
    case ModelKind::DisINR: {
      {
        Rng rng(sub_seed(seed, "shared_encoder"));
        m.encoders_["shared_encoder"] = m.init_encoder(m.params_.add("shared_encoder"), cfg.encoder_hidden, rng);
      }
      {
        Rng rng(sub_seed(seed, "shared_decoder"));
        m.decoders_["shared_decoder"] =
            m.init_decoder(m.params_.add("shared_decoder"), std::int64_t(2) * cfg.encoder_hidden, rng);
      }
      for (int i = 0; i < num_subjects; ++i) m.spawn_subject(std::to_string(i), sub_seed(seed, "subject:" + std::to_string(i)));
      break;
    }
    case ModelKind::NaiveINR: {
      Rng rng(sub_seed(seed, "network"));
      Partition& part = m.params_.add("network");
      const int wide = 2 * cfg.encoder_hidden;
      m.encoders_["network"] = m.init_encoder(part, wide, rng);
      m.decoders_["network"] = m.init_decoder(part, wide, rng);
      break;
    }
    case ModelKind::StrainerLike: {
      {
        Rng rng(sub_seed(seed, "shared_encoder"));
        m.encoders_["shared_encoder"] = m.init_encoder(m.params_.add("shared_encoder"), cfg.encoder_hidden, rng);
      }
      for (int i = 0; i < num_subjects; ++i) m.spawn_subject(std::to_string(i), sub_seed(seed, "subject:" + std::to_string(i)));
      break;
    }
  }
  return m;
}

void Model::spawn_subject(const std::string& subject, std::uint64_t seed,
                          const std::optional<std::string>& copy_from) {
  const std::string pname = subject_partition(subject);
  if (params_.has(pname)) throw LookupError("subject already exists: " + subject);
  Partition& part = params_.add(pname);
  Rng rng(seed);
  switch (cfg_.kind) {
    case ModelKind::DisINR: {
      if (copy_from) {
        const auto it = encoders_.find(subject_partition(*copy_from));
        if (it == encoders_.end()) throw LookupError("no subject encoder to copy: " + *copy_from);
        EncoderHandles enc = it->second;
        for (auto& level : enc.table.levels) level = track(part, level.clone());
        if (enc.siren_w.defined()) enc.siren_w = track(part, enc.siren_w.clone());
        if (enc.siren_b.defined()) enc.siren_b = track(part, enc.siren_b.clone());
        enc.w1 = track(part, enc.w1.clone());
        enc.b1 = track(part, enc.b1.clone());
        enc.w2 = track(part, enc.w2.clone());
        enc.b2 = track(part, enc.b2.clone());
        encoders_[pname] = std::move(enc);
      } else {
        encoders_[pname] = init_encoder(part, cfg_.encoder_hidden, rng);
      }
      break;
    }
    case ModelKind::StrainerLike: {
      if (copy_from) {
        const auto it = decoders_.find(subject_partition(*copy_from));
        if (it == decoders_.end()) throw LookupError("no subject decoder to copy: " + *copy_from);
        DecoderHandles dec = it->second;
        dec.w1 = track(part, dec.w1.clone());
        dec.b1 = track(part, dec.b1.clone());
        dec.w2 = track(part, dec.w2.clone());
        dec.b2 = track(part, dec.b2.clone());
        decoders_[pname] = std::move(dec);
      } else {
        decoders_[pname] = init_decoder(part, cfg_.encoder_hidden, rng);
      }
      break;
    }
    case ModelKind::NaiveINR:
      throw ConfigError("naive baseline has no subject partitions");
  }
}

std::vector<std::string> Model::subject_ids() const {
  std::vector<std::string> out;
  for (const auto& p : params_.partitions())
    if (p.name.rfind("subject:", 0) == 0) out.push_back(p.name.substr(8));
  return out;
}

Model Model::clone() const {
  Model out = build(cfg_, 0, 0);
  for (const auto& part : params_.partitions()) {
    if (!out.params_.has(part.name)) {
      if (part.name.rfind("subject:", 0) != 0)
        throw LookupError("clone: unexpected partition " + part.name);
      out.spawn_subject(part.name.substr(8), 0);
    }
    Partition& dst = out.params_.get(part.name);
    if (dst.tensors.size() != part.tensors.size())
      throw DimensionError("clone: partition layout mismatch in " + part.name);
    for (std::size_t k = 0; k < part.tensors.size(); ++k) {
      if (dst.tensors[k].shape() != part.tensors[k].shape())
        throw DimensionError("clone: tensor shape mismatch in " + part.name);
      auto src = part.tensors[k].data();
      auto d = dst.tensors[k].data_mut();
      std::copy(src.begin(), src.end(), d.begin());
    }
    dst.frozen = part.frozen;
    for (auto& t : dst.tensors) t.set_requires_grad(!part.frozen);
  }
  return out;
}

Tensor Model::shared_features(const Tensor& coords) const {
  const auto it = encoders_.find(cfg_.kind == ModelKind::NaiveINR ? "network" : "shared_encoder");
  if (it == encoders_.end()) throw LookupError("model has no shared encoder");
  return encoder_forward(it->second, coords);
}

Tensor Model::subject_features(const std::string& subject, const Tensor& coords) const {
  if (cfg_.kind != ModelKind::DisINR)
    throw ConfigError("only the disentangled model has subject encoders");
  const auto it = encoders_.find(subject_partition(subject));
  if (it == encoders_.end()) throw LookupError("unknown subject encoder: " + subject);
  return encoder_forward(it->second, coords);
}

Tensor Model::forward(const std::string& subject, const Tensor& coords) const {
  return forward_from_shared(subject, shared_features(coords), coords);
}

Tensor Model::forward_from_shared(const std::string& subject, const Tensor& shared,
                                  const Tensor& coords) const {
  switch (cfg_.kind) {
    case ModelKind::DisINR: {
      const auto it = encoders_.find(subject_partition(subject));
      if (it == encoders_.end()) throw LookupError("unknown subject encoder: " + subject);
      Tensor subj = encoder_forward(it->second, coords);
      // concatenation order is pinned: shared features first
      return decoder_forward(decoders_.at("shared_decoder"), ops::concat_cols(shared, subj));
    }
    case ModelKind::NaiveINR:
      return decoder_forward(decoders_.at("network"), shared);
    case ModelKind::StrainerLike: {
      const auto it = decoders_.find(subject_partition(subject));
      if (it == decoders_.end()) throw LookupError("unknown subject decoder: " + subject);
      return decoder_forward(it->second, shared);
    }
  }
  throw ConfigError("unknown model kind");
}

}  // namespace disinr
