#include "disinr_cli/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "disinr/rng.hpp"

namespace disinr::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& key) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ConfigError("config: bad value '" + text + "' for key '" + key + "'");
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// One config key: how to set it from text and how to echo it back. A single
// table drives parsing, serialization and the unknown-key check.
struct KeyDef {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T, class Member>
KeyDef num_key(const char* key, Member member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            std::invoke(member, c) = parse_number<T>(v, key);
          },
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>)
              return format_double(std::invoke(member, c));
            else
              return std::to_string(std::invoke(member, c));
          }};
}

const std::vector<KeyDef>& key_table() {
  using C = ExperimentConfig;
  static const std::vector<KeyDef> table = {
      {"task", [](C& c, const std::string& v) { c.task = task_from_string(v); },
       [](const C& c) { return to_string(c.task); }},
      {"preset",
       [](C& c, const std::string& v) {
         if (v != "desk" && v != "paper") throw ConfigError("config: unknown preset: " + v);
         c.preset = v;
       },
       [](const C& c) { return c.preset; }},
      num_key<std::uint64_t>("seed", &C::seed),

      {"model.kind",
       [](C& c, const std::string& v) { c.model.kind = model_kind_from_string(v); },
       [](const C& c) { return to_string(c.model.kind); }},
      {"model.backbone",
       [](C& c, const std::string& v) { c.model.backbone = backbone_from_string(v); },
       [](const C& c) { return to_string(c.model.backbone); }},
      num_key<int>("model.encoder_hidden", [](auto& c) -> auto& { return c.model.encoder_hidden; }),
      num_key<int>("model.decoder_hidden", [](auto& c) -> auto& { return c.model.decoder_hidden; }),
      num_key<double>("model.init_scale", [](auto& c) -> auto& { return c.model.init_scale; }),
      num_key<double>("model.table_init_scale",
                      [](auto& c) -> auto& { return c.model.table_init_scale; }),
      num_key<int>("model.hash.levels", [](auto& c) -> auto& { return c.model.hash.levels; }),
      num_key<std::int64_t>("model.hash.table_size",
                            [](auto& c) -> auto& { return c.model.hash.table_size; }),
      num_key<int>("model.hash.features", [](auto& c) -> auto& { return c.model.hash.features; }),
      num_key<int>("model.hash.base_resolution",
                   [](auto& c) -> auto& { return c.model.hash.base_resolution; }),
      num_key<double>("model.hash.per_level_scale",
                      [](auto& c) -> auto& { return c.model.hash.per_level_scale; }),
      num_key<int>("model.fourier_freqs", [](auto& c) -> auto& { return c.model.fourier_freqs; }),
      num_key<int>("model.siren_features", [](auto& c) -> auto& { return c.model.siren_features; }),
      num_key<double>("model.siren_omega", [](auto& c) -> auto& { return c.model.siren_omega; }),

      {"phantom.family",
       [](C& c, const std::string& v) { c.phantom.family = phantom_family_from_string(v); },
       [](const C& c) { return to_string(c.phantom.family); }},
      {"phantom.extent",
       [](C& c, const std::string& v) {
         const auto e = parse_number<std::int64_t>(v, "phantom.extent");
         c.phantom.extents = {e, e};
       },
       [](const C& c) { return std::to_string(c.phantom.extents.at(0)); }},
      num_key<int>("phantom.population", [](auto& c) -> auto& { return c.phantom.population; }),
      num_key<double>("phantom.center_jitter",
                      [](auto& c) -> auto& { return c.phantom.center_jitter; }),
      num_key<double>("phantom.axis_jitter", [](auto& c) -> auto& { return c.phantom.axis_jitter; }),
      num_key<double>("phantom.intensity_jitter",
                      [](auto& c) -> auto& { return c.phantom.intensity_jitter; }),
      num_key<double>("phantom.lesion_prob", [](auto& c) -> auto& { return c.phantom.lesion_prob; }),
      num_key<double>("phantom.lesion_min", [](auto& c) -> auto& { return c.phantom.lesion_min; }),
      num_key<double>("phantom.lesion_max", [](auto& c) -> auto& { return c.phantom.lesion_max; }),
      num_key<double>("phantom.contrast", [](auto& c) -> auto& { return c.phantom.contrast; }),

      num_key<int>("ct.views", &C::ct_views),
      {"mri.pattern",
       [](C& c, const std::string& v) { c.mask.pattern = mask_pattern_from_string(v); },
       [](const C& c) { return to_string(c.mask.pattern); }},
      num_key<double>("mri.af", [](auto& c) -> auto& { return c.mask.af; }),
      num_key<int>("mri.acs", [](auto& c) -> auto& { return c.mask.acs; }),
      num_key<int>("mri.coils", &C::coils),
      num_key<double>("noise_sigma", &C::noise_sigma),

      num_key<double>("split.pretrain", &C::split_pretrain),
      num_key<double>("split.test_in", &C::split_test_in),
      num_key<double>("split.test_out", &C::split_test_out),

      num_key<int>("train.iterations", [](auto& c) -> auto& { return c.train.iterations; }),
      num_key<double>("train.lr", [](auto& c) -> auto& { return c.train.lr; }),
      num_key<double>("train.lr_decay", [](auto& c) -> auto& { return c.train.lr_decay; }),
      num_key<int>("train.decay_interval", [](auto& c) -> auto& { return c.train.decay_interval; }),
      num_key<double>("train.beta1", [](auto& c) -> auto& { return c.train.adam_beta1; }),
      num_key<double>("train.beta2", [](auto& c) -> auto& { return c.train.adam_beta2; }),
      num_key<double>("train.eps", [](auto& c) -> auto& { return c.train.adam_eps; }),
      num_key<int>("train.log_interval", [](auto& c) -> auto& { return c.train.log_interval; }),

      num_key<int>("adapt.iterations", [](auto& c) -> auto& { return c.adapt.iterations; }),
      num_key<double>("adapt.lr", [](auto& c) -> auto& { return c.adapt.lr; }),
      num_key<double>("adapt.lr_decay", [](auto& c) -> auto& { return c.adapt.lr_decay; }),
      num_key<int>("adapt.decay_interval", [](auto& c) -> auto& { return c.adapt.decay_interval; }),
      num_key<double>("adapt.beta1", [](auto& c) -> auto& { return c.adapt.adam_beta1; }),
      num_key<double>("adapt.beta2", [](auto& c) -> auto& { return c.adapt.adam_beta2; }),
      num_key<double>("adapt.eps", [](auto& c) -> auto& { return c.adapt.adam_eps; }),
      num_key<int>("adapt.log_interval", [](auto& c) -> auto& { return c.adapt.log_interval; }),
  };
  return table;
}

const KeyDef* find_key(const std::string& key) {
  for (const auto& def : key_table())
    if (key == def.key) return &def;
  return nullptr;
}

}  // namespace

TaskKind task_from_string(const std::string& s) {
  if (s == "volume_fit") return TaskKind::VolumeFit;
  if (s == "mri") return TaskKind::Mri;
  if (s == "ct") return TaskKind::Ct;
  throw ConfigError("unknown task: " + s);
}

std::string to_string(TaskKind task) {
  switch (task) {
    case TaskKind::VolumeFit: return "volume_fit";
    case TaskKind::Mri: return "mri";
    case TaskKind::Ct: return "ct";
  }
  throw ConfigError("invalid task enum");
}

void ExperimentConfig::reseed(std::uint64_t s) {
  seed = s;
  phantom.seed = sub_seed(s, "phantom");
  mask.seed = sub_seed(s, "mask");
  train.seed = sub_seed(s, "train");
  adapt.seed = sub_seed(s, "adapt");
}

void ExperimentConfig::validate() const {
  phantom.validate();
  train.validate();
  adapt.validate();
  resolved_model(*this).validate();
  if (phantom.extents.size() != 2 || phantom.extents[0] != phantom.extents[1])
    throw ConfigError("config: phantom extent must be square");
  if (ct_views < 1) throw ConfigError("config: ct.views must be >= 1");
  if (coils < 1) throw ConfigError("config: mri.coils must be >= 1");
  if (noise_sigma < 0.0) throw ConfigError("config: noise_sigma must be >= 0");
  if (split_pretrain < 0.0 || split_test_in < 0.0 || split_test_out < 0.0)
    throw ConfigError("config: split fractions must be >= 0");
  const double sum = split_pretrain + split_test_in + split_test_out;
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("config: split fractions must sum to 1, got " + format_double(sum));
  if (task == TaskKind::Ct) {
    const auto& g = resolved_geometry(*this);
    if (phantom.extents[0] != g.image_h || phantom.extents[1] != g.image_w)
      throw ConfigError("config: ct task needs phantom.extent " + std::to_string(g.image_h) +
                        " to match the " + preset + " geometry");
  }
}

ExperimentConfig preset_config(const std::string& preset, TaskKind task) {
  ExperimentConfig cfg;
  cfg.task = task;
  cfg.preset = preset;
  cfg.phantom.family = PhantomFamily::EllipseFamily;
  cfg.phantom.population = 10;
  cfg.phantom.lesion_prob = 0.5;
  if (preset == "desk") {
    cfg.model.hash = HashEncodingConfig::desk();
    cfg.model.encoder_hidden = 64;
    cfg.model.decoder_hidden = 64;
    cfg.phantom.extents = task == TaskKind::Ct ? Shape{128, 128} : Shape{64, 64};
    cfg.mask.af = 4.0;
    cfg.mask.acs = 12;
    cfg.train.iterations = 600;
    cfg.train.lr = 5e-3;
    cfg.train.lr_decay = 0.5;
    cfg.train.decay_interval = 300;
    cfg.train.log_interval = 25;
    cfg.adapt = cfg.train;
    cfg.adapt.iterations = 500;
    cfg.adapt.decay_interval = 250;
  } else if (preset == "paper") {
    cfg.model.hash = HashEncodingConfig::paper();
    cfg.model.encoder_hidden = 128;
    cfg.model.decoder_hidden = 128;
    cfg.phantom.extents = {256, 256};
    cfg.mask.af = 6.0;
    cfg.mask.acs = 24;
    cfg.coils = 8;
    cfg.train.iterations = 2000;
    cfg.train.lr = 5e-3;
    cfg.train.lr_decay = 0.5;
    cfg.train.decay_interval = 1000;
    cfg.train.log_interval = 50;
    cfg.adapt = cfg.train;
    cfg.adapt.iterations = 1000;
    cfg.adapt.decay_interval = 500;
  } else {
    throw ConfigError("config: unknown preset: " + preset);
  }
  cfg.reseed(0);
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    if (!find_key(key))
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    pairs.emplace_back(key, value);
  }

  // task and preset pick the defaults, so they apply before everything else
  // regardless of where they appear in the file
  TaskKind task = TaskKind::VolumeFit;
  std::string preset = "desk";
  for (const auto& [key, value] : pairs) {
    if (key == "task") task = task_from_string(value);
    if (key == "preset") {
      if (value != "desk" && value != "paper") throw ConfigError("config: unknown preset: " + value);
      preset = value;
    }
  }
  ExperimentConfig cfg = preset_config(preset, task);
  for (const auto& [key, value] : pairs) find_key(key)->set(cfg, value);
  cfg.reseed(cfg.seed);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# disinr experiment configuration (resolved)\n";
  std::string section;
  for (const auto& def : key_table()) {
    const std::string key = def.key;
    const auto dot = key.find('.');
    const std::string head = dot == std::string::npos ? "" : key.substr(0, dot);
    if (head != section) {
      out << "\n";
      section = head;
    }
    out << key << " = " << def.get(cfg) << "\n";
  }
  return out.str();
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write config file: " + path);
  out << config_text(cfg);
  if (!out) throw IoError("failed writing config file: " + path);
}

ModelConfig resolved_model(const ExperimentConfig& cfg) {
  ModelConfig m = cfg.model;
  m.dims = 2;
  m.channels = cfg.task == TaskKind::Mri ? 2 : 1;
  return m;
}

FanBeamGeometry resolved_geometry(const ExperimentConfig& cfg) {
  if (cfg.task != TaskKind::Ct) throw ConfigError("config: geometry is defined for the ct task only");
  return cfg.preset == "paper" ? FanBeamGeometry::paper(cfg.ct_views)
                               : FanBeamGeometry::desk(cfg.ct_views);
}

OperatorDescriptor resolved_operator(const ExperimentConfig& cfg) {
  switch (cfg.task) {
    case TaskKind::VolumeFit: return OperatorDescriptor::identity(cfg.phantom.extents);
    case TaskKind::Ct: return OperatorDescriptor::fanbeam(resolved_geometry(cfg));
    case TaskKind::Mri:
      return OperatorDescriptor::fourier(cfg.phantom.extents, cfg.mask, cfg.coils,
                                         sub_seed(cfg.seed, "coils"));
  }
  throw ConfigError("invalid task enum");
}

}  // namespace disinr::cli
