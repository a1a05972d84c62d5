#include "sbrnn/sweep.hpp"

#include <cstdio>
#include <filesystem>

#include "sbrnn/checkpoint.hpp"
#include "sbrnn/complexity.hpp"
#include "sbrnn/error.hpp"
#include "sbrnn/rng.hpp"
#include "sbrnn/text.hpp"
#include "sbrnn/trainer.hpp"

namespace sbrnn {

namespace {

void say(const LogFn& log, const std::string& msg) {
  if (log) log(msg);
}

std::string km_tag(double d) { return format_double(d) + "km"; }

struct FitPass {
  std::vector<int> labels;
  std::vector<int> decisions;
  Matrix label_probs;
};

// Decisions (and optionally label probabilities) over the fit set.
FitPass fit_pass(const ExperimentConfig& cfg, const TransceiverParams& params, const Channel& channel, int window,
                 const Vector& weights, bool want_probs) {
  const auto& est = cfg.estimator;
  FitPass out;
  std::vector<Matrix> parts;
  for (int s = 0; s < est.fit_sequences; ++s) {
    const auto idx = static_cast<std::uint64_t>(s);
    const auto msgs = generate_messages(static_cast<std::size_t>(est.fit_length + window - 1), params.dims.messages,
                                        RngFamily::mersenne_twister, derive_seed(cfg.train.seed_train, "fit-messages", idx));
    const Matrix blocks = transmit(params, channel, msgs, derive_seed(cfg.train.seed_train, "fit-noise", idx));
    const auto tensor = collect_probabilities(params.rx, blocks, window);
    const auto d = decide(combine(tensor, weights));
    out.labels.insert(out.labels.end(), msgs.begin(), msgs.begin() + est.fit_length);
    out.decisions.insert(out.decisions.end(), d.begin(), d.end());
    if (want_probs) parts.push_back(label_probabilities(tensor, msgs));
  }
  if (want_probs) {
    Eigen::Index rows = 0;
    for (const auto& p : parts) rows += p.rows();
    out.label_probs.resize(rows, window);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
      out.label_probs.middleRows(at, p.rows()) = p;
      at += p.rows();
    }
  }
  return out;
}

double bit_error_rate(const Evaluation& ev, const BitLabeling& labeling) {
  return ber_from_decisions(ev.labels, ev.decisions, labeling);
}

}  // namespace

std::string checkpoint_path(const ExperimentConfig& cfg, double distance_km) {
  return (std::filesystem::path(cfg.checkpoint_dir) /
          ("sbrnn-M" + std::to_string(cfg.dims.messages) + "-n" + std::to_string(cfg.dims.samples) + "-" +
           km_tag(distance_km) + "-" + model_hash(cfg, distance_km) + ".ckpt"))
      .string();
}

std::string nu_table_path(const ExperimentConfig& cfg, SystemKind system, double distance_km) {
  const auto text = canonical_text(cfg);
  const auto section = [&](const std::string& from, const std::string& to) {
    const auto a = text.find(from);
    return text.substr(a, text.find(to) - a);
  };
  const std::string key = to_string(system) + "|" + format_double(distance_km) + "|" + std::to_string(cfg.seed) +
                          "|" + section("[channel]", "[autoencoder]") + section("[mlsd]", "[experiment]");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
  return (std::filesystem::path(cfg.checkpoint_dir) / ("nu-" + to_string(system) + "-mu" +
                                                       std::to_string(cfg.memory_for(system)) + "-" +
                                                       km_tag(distance_km) + "-" + buf + ".txt"))
      .string();
}

std::string results_path(const ExperimentConfig& cfg, const std::string& extension) {
  return (std::filesystem::path(cfg.output_dir) / ("results-" + config_hash(cfg) + "." + extension)).string();
}

TransceiverParams obtain_model(const ExperimentConfig& cfg, double distance_km, const LogFn& log) {
  const auto path = checkpoint_path(cfg, distance_km);
  if (std::filesystem::exists(path)) {
    say(log, "loading " + path);
    return load_checkpoint(path);
  }
  if (!cfg.train_missing)
    throw ConfigError("missing checkpoint '" + path + "' (train it first or set experiment.train_missing = true)");
  say(log, "training SBRNN at " + km_tag(distance_km));
  const Channel channel(cfg.channel_for(SystemKind::sbrnn, distance_km));
  auto result = train(cfg.train, channel, cfg.dims, [&](long long step, const TransceiverParams& p) {
    save_checkpoint(path + ".partial", p);
    say(log, "checkpoint at step " + std::to_string(step));
  });
  save_checkpoint(path, result.best);
  std::filesystem::remove(path + ".partial");
  return result.best;
}

SbrnnFit fit_sbrnn(const ExperimentConfig& cfg, const TransceiverParams& params, const Channel& channel, int window) {
  const int m = params.dims.messages;
  SbrnnFit fit;
  fit.window = window;
  fit.gray = BitLabeling::gray(m);
  fit.random = BitLabeling::random(m, derive_seed(cfg.seed, "random-labeling", static_cast<std::uint64_t>(window)));

  const auto uniform = uniform_weights(window);
  const auto base = fit_pass(cfg, params, channel, window, uniform, cfg.estimator.optimize_weights);
  if (cfg.estimator.optimize_weights) {
    fit.weights = optimize_weights(base.label_probs, cfg.estimator.max_iterations, cfg.estimator.tolerance);
  } else {
    fit.weights.weights = uniform;
    fit.weights.converged = true;
  }
  const auto tabu = [&](const FitPass& pass) {
    return tabu_search(estimate_confusion(pass.labels, pass.decisions, m), fit.random, cfg.labeling.iterations,
                       static_cast<std::size_t>(cfg.labeling.tabu_list));
  };
  fit.uniform_labeling = tabu(base);
  if (cfg.estimator.optimize_weights)
    fit.optimized_labeling = tabu(fit_pass(cfg, params, channel, window, fit.weights.weights, false));
  return fit;
}

std::vector<ResultRow> evaluate_sbrnn(const ExperimentConfig& cfg, const TransceiverParams& params,
                                      double distance_km, int window, const LogFn& log) {
  require(params.dims == cfg.dims, "model dimensions do not match the configuration");
  const Channel channel(cfg.channel_for(SystemKind::sbrnn, distance_km));
  const auto fit = fit_sbrnn(cfg, params, channel, window);
  const auto hash = config_hash(cfg);
  const int bits = params.dims.bits();
  const double flops = flops_sbrnn_rx(params.dims.messages, params.dims.samples, window);

  std::vector<ResultRow> rows;
  auto emit = [&](const std::string& weights_name, const Vector& weights, const BitLabeling& optimized) {
    const auto ev = evaluate(params, channel, window, weights, cfg.test_sequences, cfg.test_length, cfg.seed);
    say(log, "sbrnn " + km_tag(distance_km) + " W=" + std::to_string(window) + " weights=" + weights_name +
                 " BLER=" + format_double(ev.bler));
    for (const auto& [name, labeling] :
         {std::pair<std::string, const BitLabeling*>{"gray", &fit.gray}, {"random", &fit.random},
          {"optimized", &optimized}}) {
      ResultRow r;
      r.system = "sbrnn";
      r.distance_km = distance_km;
      r.eta = eta_sbrnn(params.dims, window);
      r.bler = ev.bler;
      r.ber = bit_error_rate(ev, *labeling);
      r.ber_lower_bound = ev.bler / bits;
      r.labeling = name;
      r.weights = weights_name;
      r.flops_pdb = flops;
      r.seed = cfg.seed;
      r.config_hash = hash;
      rows.push_back(std::move(r));
    }
  };
  emit("uniform", uniform_weights(window), fit.uniform_labeling.best);
  if (cfg.estimator.optimize_weights) emit("optimized", fit.weights.weights, fit.optimized_labeling.best);
  return rows;
}

NuTable obtain_nu_table(const ExperimentConfig& cfg, SystemKind system, double distance_km, const LogFn& log) {
  const auto path = nu_table_path(cfg, system, distance_km);
  if (std::filesystem::exists(path)) {
    say(log, "loading " + path);
    return parse_nu_table(read_file(path));
  }
  const PamLink link(cfg.pam_for(system), cfg.channel_for(system, distance_km));
  auto table = estimate_nu(link, cfg.memory_for(system), static_cast<std::size_t>(cfg.mlsd.train_symbols),
                           derive_seed(cfg.seed, "nu-" + to_string(system), 0));
  if (table.coverage() < 1.0)
    say(log, "warning: nu table for " + to_string(system) + " at " + km_tag(distance_km) + " covers only " +
                 format_double(table.coverage()) + " of the windows");
  write_file(path, format_nu_table(table));
  return table;
}

ResultRow evaluate_mlsd(const ExperimentConfig& cfg, SystemKind system, double distance_km, const LogFn& log) {
  const auto table = obtain_nu_table(cfg, system, distance_km, log);
  const PamLink link(cfg.pam_for(system), cfg.channel_for(system, distance_km));
  const auto res = mlsd_ber(link, table, static_cast<std::size_t>(cfg.mlsd.test_symbols),
                            derive_seed(cfg.seed, "mlsd-" + to_string(system), 0),
                            static_cast<std::size_t>(cfg.mlsd.frame_symbols));
  const auto& pam = link.pam();
  ResultRow r;
  r.system = to_string(system);
  r.distance_km = distance_km;
  r.eta = eta_mlsd(pam.order, table.memory);
  r.bler = res.ser();
  r.ber = res.ber();
  r.labeling = "gray";
  r.weights = "none";
  r.flops_pdb = flops_mlsd(pam.order, table.memory, pam.samples_per_symbol);
  r.seed = cfg.seed;
  r.config_hash = config_hash(cfg);
  say(log, r.system + " " + km_tag(distance_km) + " BER=" + format_double(r.ber));
  return r;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const LogFn& log) {
  cfg.validate();
  std::vector<ResultRow> rows;
  for (const auto system : cfg.systems) {
    for (const double d : cfg.distances) {
      if (system == SystemKind::sbrnn) {
        const auto params = obtain_model(cfg, d, log);
        for (const int w : cfg.estimator.windows) {
          auto part = evaluate_sbrnn(cfg, params, d, w, log);
          rows.insert(rows.end(), part.begin(), part.end());
        }
      } else {
        rows.push_back(evaluate_mlsd(cfg, system, d, log));
      }
    }
  }
  for (const auto& r : rows) r.validate();
  sort_rows(rows);
  return rows;
}

}  // namespace sbrnn
