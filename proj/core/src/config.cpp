#include "sbrnn/config.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sbrnn/error.hpp"
#include "sbrnn/rng.hpp"
#include "sbrnn/text.hpp"

namespace sbrnn {

namespace {

struct Key {
  const char* section;
  const char* name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }
std::string fmt(long long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

int parse_int(const std::string& s) {
  // Accept integral values written in floating notation (e.g. 1e5).
  const double d = parse_double(s);
  require(d == static_cast<double>(static_cast<long long>(d)) && std::abs(d) < 2147483648.0,
          "not an integer: '" + s + "'");
  return static_cast<int>(d);
}

long long parse_long(const std::string& s) {
  const double d = parse_double(s);
  require(d == static_cast<double>(static_cast<long long>(d)), "not an integer: '" + s + "'");
  return static_cast<long long>(d);
}

std::uint64_t parse_u64(const std::string& s) { return parse_unsigned(s); }

template <class T, class Parse>
std::string join(const std::vector<T>& v, Parse fmt_one) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt_one(v[i]);
  return out;
}

std::vector<std::string> list_items(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& item : split(s, ',')) {
    const auto t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

#define SBRNN_KEY(sec, key, field, parse)                                         \
  Key {                                                                          \
    sec, key, [](const ExperimentConfig& c) { return fmt(c.field); },            \
        [](ExperimentConfig& c, const std::string& v) { c.field = parse(v); } \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      SBRNN_KEY("channel", "dac_rate", channel.dac_rate, parse_double),
      SBRNN_KEY("channel", "oversampling", channel.oversampling, parse_int),
      SBRNN_KEY("channel", "lpf_bandwidth", channel.lpf_bandwidth, parse_double),
      SBRNN_KEY("channel", "enob", channel.enob, parse_int),
      SBRNN_KEY("channel", "dispersion_ps_nm_km", channel.dispersion_ps_nm_km, parse_double),
      SBRNN_KEY("channel", "attenuation_db_km", channel.attenuation_db_km, parse_double),
      SBRNN_KEY("channel", "wavelength", channel.wavelength, parse_double),
      SBRNN_KEY("channel", "rx_noise_power", channel.rx_noise_power, parse_double),
      SBRNN_KEY("channel", "noise_reference_power", channel.noise_reference_power, parse_double),
      SBRNN_KEY("channel", "include_tx_lpf", channel.include_tx_lpf, parse_bool),
      SBRNN_KEY("channel", "include_rx_lpf", channel.include_rx_lpf, parse_bool),
      SBRNN_KEY("channel", "dac_noise", channel.noise.dac, parse_bool),
      SBRNN_KEY("channel", "receiver_noise", channel.noise.receiver, parse_bool),
      SBRNN_KEY("channel", "adc_noise", channel.noise.adc, parse_bool),
      Key{"channel", "modulator",
          [](const ExperimentConfig& c) {
            return std::string(c.channel.modulator == ModulatorModel::sine ? "sine" : "identity");
          },
          [](ExperimentConfig& c, const std::string& v) {
            if (v == "sine")
              c.channel.modulator = ModulatorModel::sine;
            else if (v == "identity")
              c.channel.modulator = ModulatorModel::identity;
            else
              throw ConfigError("unknown modulator '" + v + "'");
          }},

      SBRNN_KEY("autoencoder", "messages", dims.messages, parse_int),
      SBRNN_KEY("autoencoder", "samples", dims.samples, parse_int),

      SBRNN_KEY("train", "sequences", train.sequences, parse_int),
      SBRNN_KEY("train", "train_length", train.train_length, parse_long),
      SBRNN_KEY("train", "step_blocks", train.step_blocks, parse_int),
      SBRNN_KEY("train", "reinit_period", train.reinit_period, parse_int),
      SBRNN_KEY("train", "max_iters", train.max_iters, parse_long),
      SBRNN_KEY("train", "learning_rate", train.adam.learning_rate, parse_double),
      SBRNN_KEY("train", "beta1", train.adam.beta1, parse_double),
      SBRNN_KEY("train", "beta2", train.adam.beta2, parse_double),
      SBRNN_KEY("train", "epsilon", train.adam.epsilon, parse_double),
      SBRNN_KEY("train", "seed_train", train.seed_train, parse_u64),
      SBRNN_KEY("train", "seed_test", train.seed_test, parse_u64),
      SBRNN_KEY("train", "seed_init", train.seed_init, parse_u64),
      SBRNN_KEY("train", "validation_period", train.validation_period, parse_long),
      SBRNN_KEY("train", "validation_window", train.validation_window, parse_int),
      SBRNN_KEY("train", "validation_length", train.validation_length, parse_int),
      SBRNN_KEY("train", "checkpoint_period", train.checkpoint_period, parse_long),

      Key{"estimator", "windows",
          [](const ExperimentConfig& c) { return join(c.estimator.windows, [](int w) { return fmt(w); }); },
          [](ExperimentConfig& c, const std::string& v) {
            c.estimator.windows.clear();
            for (const auto& s : list_items(v)) c.estimator.windows.push_back(parse_int(s));
          }},
      SBRNN_KEY("estimator", "optimize_weights", estimator.optimize_weights, parse_bool),
      SBRNN_KEY("estimator", "fit_sequences", estimator.fit_sequences, parse_int),
      SBRNN_KEY("estimator", "fit_length", estimator.fit_length, parse_int),
      SBRNN_KEY("estimator", "max_iterations", estimator.max_iterations, parse_int),
      SBRNN_KEY("estimator", "tolerance", estimator.tolerance, parse_double),

      SBRNN_KEY("labeling", "iterations", labeling.iterations, parse_int),
      SBRNN_KEY("labeling", "tabu_list", labeling.tabu_list, parse_int),

      SBRNN_KEY("mlsd", "pam2_memory", mlsd.pam2_memory, parse_int),
      SBRNN_KEY("mlsd", "pam4_memory", mlsd.pam4_memory, parse_int),
      SBRNN_KEY("mlsd", "samples_per_symbol", mlsd.samples_per_symbol, parse_int),
      SBRNN_KEY("mlsd", "rolloff", mlsd.rolloff, parse_double),
      SBRNN_KEY("mlsd", "span_symbols", mlsd.span_symbols, parse_int),
      SBRNN_KEY("mlsd", "pam2_dac_rate", mlsd.pam2_dac_rate, parse_double),
      SBRNN_KEY("mlsd", "pam4_dac_rate", mlsd.pam4_dac_rate, parse_double),
      SBRNN_KEY("mlsd", "pam2_rx_noise_power", mlsd.pam2_rx_noise_power, parse_double),
      SBRNN_KEY("mlsd", "pam4_rx_noise_power", mlsd.pam4_rx_noise_power, parse_double),
      SBRNN_KEY("mlsd", "train_symbols", mlsd.train_symbols, parse_long),
      SBRNN_KEY("mlsd", "test_symbols", mlsd.test_symbols, parse_long),
      SBRNN_KEY("mlsd", "frame_symbols", mlsd.frame_symbols, parse_int),
      SBRNN_KEY("mlsd", "rx_lpf", mlsd.rx_lpf, parse_bool),

      Key{"experiment", "systems",
          [](const ExperimentConfig& c) { return join(c.systems, [](SystemKind s) { return to_string(s); }); },
          [](ExperimentConfig& c, const std::string& v) {
            c.systems.clear();
            for (const auto& s : list_items(v)) c.systems.push_back(parse_system(s));
          }},
      Key{"experiment", "distances",
          [](const ExperimentConfig& c) { return join(c.distances, [](double d) { return fmt(d); }); },
          [](ExperimentConfig& c, const std::string& v) {
            c.distances.clear();
            for (const auto& s : list_items(v)) c.distances.push_back(parse_double(s));
          }},
      SBRNN_KEY("experiment", "seed", seed, parse_u64),
      SBRNN_KEY("experiment", "test_sequences", test_sequences, parse_int),
      SBRNN_KEY("experiment", "test_length", test_length, parse_int),
      SBRNN_KEY("experiment", "train_missing", train_missing, parse_bool),
      Key{"experiment", "checkpoint_dir", [](const ExperimentConfig& c) { return c.checkpoint_dir; },
          [](ExperimentConfig& c, const std::string& v) { c.checkpoint_dir = v; }},
      Key{"experiment", "output_dir", [](const ExperimentConfig& c) { return c.output_dir; },
          [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }},
      Key{"experiment", "hd_fec_threshold",
          [](const ExperimentConfig& c) { return c.hd_fec_threshold ? fmt(*c.hd_fec_threshold) : std::string(); },
          [](ExperimentConfig& c, const std::string& v) {
            if (v.empty())
              c.hd_fec_threshold.reset();
            else
              c.hd_fec_threshold = parse_double(v);
          }},
  };
  return table;
}

#undef SBRNN_KEY

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

SystemKind parse_system(const std::string& s) {
  if (s == "sbrnn") return SystemKind::sbrnn;
  if (s == "pam2_mlsd") return SystemKind::pam2_mlsd;
  if (s == "pam4_mlsd") return SystemKind::pam4_mlsd;
  throw ConfigError("unknown system '" + s + "'");
}

std::string to_string(SystemKind s) {
  switch (s) {
    case SystemKind::sbrnn:
      return "sbrnn";
    case SystemKind::pam2_mlsd:
      return "pam2_mlsd";
    case SystemKind::pam4_mlsd:
      return "pam4_mlsd";
  }
  return "?";
}

int eta_sbrnn(const AutoencoderDims& dims, int window) { return window * dims.bits(); }

int eta_mlsd(int order, int memory) {
  require(order >= 2 && std::has_single_bit(static_cast<unsigned>(order)), "PAM order must be a power of two");
  return memory * std::countr_zero(static_cast<unsigned>(order));
}

void ExperimentConfig::validate() const {
  channel.validate();
  dims.validate();
  require(!systems.empty(), "experiment.systems is empty");
  for (double d : distances) require(d >= 0.0, "distances must be >= 0");
  require(test_sequences >= 1 && test_length >= 1, "test set must be non-empty");
  require(!estimator.windows.empty(), "estimator.windows is empty");
  for (int w : estimator.windows) require(w >= 1, "windows must be >= 1");
  require(estimator.fit_sequences >= 1 && estimator.fit_length >= 1, "fit set must be non-empty");
  require(labeling.iterations >= 1 && labeling.tabu_list >= 0, "tabu iterations must be >= 1");
  require(mlsd.pam2_memory % 2 == 0 && mlsd.pam4_memory % 2 == 0, "mu must be even");
  require(mlsd.train_symbols >= 1 && mlsd.test_symbols >= 1 && mlsd.frame_symbols >= 1, "MLSD sizes must be >= 1");
  require(!hd_fec_threshold || (*hd_fec_threshold > 0.0 && *hd_fec_threshold < 1.0),
          "hd_fec_threshold must lie in (0, 1)");
  for (auto s : systems)
    if (s == SystemKind::sbrnn) train.validate();
}

ChannelConfig ExperimentConfig::channel_for(SystemKind system, double distance_km) const {
  ChannelConfig c = channel;
  c.distance_km = distance_km;
  if (system == SystemKind::pam2_mlsd) {
    c.dac_rate = mlsd.pam2_dac_rate;
    c.rx_noise_power = mlsd.pam2_rx_noise_power;
    c.include_rx_lpf = mlsd.rx_lpf;
  } else if (system == SystemKind::pam4_mlsd) {
    c.dac_rate = mlsd.pam4_dac_rate;
    c.rx_noise_power = mlsd.pam4_rx_noise_power;
    c.include_rx_lpf = mlsd.rx_lpf;
  }
  return c;
}

PamConfig ExperimentConfig::pam_for(SystemKind system) const {
  require(system != SystemKind::sbrnn, "pam_for: not an MLSD system");
  PamConfig p = system == SystemKind::pam2_mlsd ? PamConfig::pam2() : PamConfig::pam4();
  p.rolloff = mlsd.rolloff;
  p.samples_per_symbol = mlsd.samples_per_symbol;
  p.span_symbols = mlsd.span_symbols;
  p.dac_rate = system == SystemKind::pam2_mlsd ? mlsd.pam2_dac_rate : mlsd.pam4_dac_rate;
  return p;
}

int ExperimentConfig::memory_for(SystemKind system) const {
  require(system != SystemKind::sbrnn, "memory_for: not an MLSD system");
  return system == SystemKind::pam2_mlsd ? mlsd.pam2_memory : mlsd.pam4_memory;
}

ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::set<std::string> known;
  for (const auto& k : keys()) known.insert(std::string(k.section) + "." + k.name);
  for (const auto& [section, body] : tree) {
    require(!body.empty() || body.data().empty(), "config: key '" + section + "' outside a section");
    for (const auto& [name, value] : body)
      require(known.count(section + "." + name) == 1, "config: unknown key [" + section + "] " + name);
  }
  ExperimentConfig cfg;
  for (const auto& k : keys()) {
    const auto v = tree.get_optional<std::string>(boost::property_tree::ptree::path_type(
        std::string(k.section) + "." + k.name, '.'));
    if (v) k.set(cfg, std::string(trim(*v)));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    if (section != k.section) {
      section = k.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::string text;
  for (const auto& k : keys()) {
    const std::string name = k.name;
    if (name == "output_dir" || name == "checkpoint_dir") continue;
    text += std::string(k.section) + "." + name + " = " + k.get(cfg) + "\n";
  }
  return hex(fnv1a(text));
}

std::string model_hash(const ExperimentConfig& cfg, double distance_km) {
  std::string text = "distance = " + fmt(distance_km) + "\n";
  for (const auto& k : keys()) {
    const std::string s = k.section;
    if (s == "channel" || s == "autoencoder" || s == "train") text += s + "." + k.name + " = " + k.get(cfg) + "\n";
  }
  return hex(fnv1a(text));
}

}  // namespace sbrnn
