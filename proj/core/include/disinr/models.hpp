#pragma once

#include <map>
#include <optional>
#include <string>

#include "disinr/encoding.hpp"
#include "disinr/params.hpp"
#include "disinr/tensor.hpp"

namespace disinr {

enum class ModelKind { DisINR, NaiveINR, StrainerLike };
enum class Backbone { NGP, NeRF, SIREN };

std::string to_string(ModelKind kind);
std::string to_string(Backbone backbone);
ModelKind model_kind_from_string(const std::string& s);
Backbone backbone_from_string(const std::string& s);

struct ModelConfig {
  ModelKind kind = ModelKind::DisINR;
  Backbone backbone = Backbone::NGP;
  int dims = 2;
  int channels = 1;  // 1 scalar image, 2 complex as (real, imag)
  HashEncodingConfig hash;    // NGP front-end
  int fourier_freqs = 10;     // NeRF front-end
  int siren_features = 128;   // SIREN first-layer width
  double siren_omega = 30.0;
  int encoder_hidden = 128;   // doubled internally for the naive baseline
  int decoder_hidden = 128;
  double init_scale = 1.0;    // multiplies the He-uniform bound
  double table_init_scale = 1e-4;

  bool operator==(const ModelConfig&) const = default;

  std::int64_t encoding_dim() const;
  void validate() const;
};

// Composite network with named parameter partitions:
//   DisINR       shared_encoder + shared_decoder + subject:<id> encoders
//   NaiveINR     a single "network" partition (wider encoder)
//   StrainerLike shared_encoder + subject:<id> decoders
// Subject ids are decimal indices from build(), plus "test" once spawned.
class Model {
 public:
  static Model build(const ModelConfig& cfg, int num_subjects, std::uint64_t seed);

  Tensor forward(const std::string& subject, const Tensor& coords) const;
  // Shared-encoder features; reusable across subjects within an iteration and
  // cacheable during adaptation while the shared pair is frozen.
  Tensor shared_features(const Tensor& coords) const;
  // Subject-encoder features (disentangled model only).
  Tensor subject_features(const std::string& subject, const Tensor& coords) const;
  Tensor forward_from_shared(const std::string& subject, const Tensor& shared,
                             const Tensor& coords) const;

  // Fresh subject partition (encoder for DisINR, decoder for StrainerLike).
  // `copy_from` clones an existing subject's tensors instead of re-initializing.
  void spawn_subject(const std::string& subject, std::uint64_t seed,
                     const std::optional<std::string>& copy_from = std::nullopt);

  std::vector<std::string> subject_ids() const;

  // Deep copy: fresh storage for every partition, preserving values and
  // freeze flags. Copying the object itself only shares tensor handles.
  Model clone() const;

  const ModelConfig& config() const { return cfg_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

 private:
  struct EncoderHandles {
    HashTable table;            // NGP only
    Tensor siren_w, siren_b;    // SIREN only
    Tensor w1, b1, w2, b2;
    int hidden = 0;
  };
  struct DecoderHandles {
    Tensor w1, b1, w2, b2;
  };

  EncoderHandles init_encoder(Partition& part, int hidden, Rng& rng) const;
  DecoderHandles init_decoder(Partition& part, std::int64_t in_dim, Rng& rng) const;
  Tensor encoder_forward(const EncoderHandles& enc, const Tensor& coords) const;
  Tensor decoder_forward(const DecoderHandles& dec, const Tensor& h) const;
  static std::string subject_partition(const std::string& subject);

  ModelConfig cfg_;
  ParameterSet params_;
  std::map<std::string, EncoderHandles> encoders_;
  std::map<std::string, DecoderHandles> decoders_;
};

}  // namespace disinr
