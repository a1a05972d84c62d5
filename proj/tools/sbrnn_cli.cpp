#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sbrnn/checkpoint.hpp"
#include "sbrnn/complexity.hpp"
#include "sbrnn/config.hpp"
#include "sbrnn/error.hpp"
#include "sbrnn/sweep.hpp"
#include "sbrnn/text.hpp"
#include "sbrnn/trainer.hpp"

namespace fs = std::filesystem;
using namespace sbrnn;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.output_dir = g.out;
  cfg.validate();
  return cfg;
}

LogFn logger(const Globals& g) {
  if (g.quiet) return {};
  return [](const std::string& msg) { std::cerr << msg << '\n'; };
}

// Writes `text` under the output directory and echoes it to stdout.
void emit(const ExperimentConfig& cfg, const std::string& name, const std::string& text) {
  const auto path = (fs::path(cfg.output_dir) / name).string();
  write_file(path, text);
  std::cout << text;
  std::cerr << "wrote " << path << '\n';
}

std::string tag(const ExperimentConfig& cfg, const std::string& what, double distance) {
  return what + "-" + config_hash(cfg) + "-" + format_double(distance) + "km";
}

TransceiverParams model_for(const ExperimentConfig& cfg, double distance, const std::string& checkpoint,
                            const LogFn& log) {
  if (!checkpoint.empty()) return load_checkpoint(checkpoint);
  return obtain_model(cfg, distance, log);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SBRNN autoencoder and PAM/MLSD simulator for IM/DD links"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Evaluation seed (overrides experiment.seed)");
  app.add_option("--out", g.out, "Output directory (overrides experiment.output_dir)");
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress messages");

  double distance = 0.0;
  int window = 10;
  std::string checkpoint;
  std::string system = "pam2_mlsd";
  std::optional<int> memory;

  auto* train_cmd = app.add_subcommand("train", "Train an SBRNN at one distance and save its checkpoint");
  train_cmd->add_option("--distance", distance, "Fiber length in km")->required();
  train_cmd->add_option("--checkpoint", checkpoint, "Checkpoint path (default: derived from the config)");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained SBRNN on the test set");
  eval_cmd->add_option("--distance", distance, "Fiber length in km")->required();
  eval_cmd->add_option("--window", window, "Sliding window length W");
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint path");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run every configured system over every distance");

  auto* weights_cmd = app.add_subcommand("optimize-weights", "Fit sliding-window combination weights");
  weights_cmd->add_option("--distance", distance, "Fiber length in km")->required();
  weights_cmd->add_option("--window", window, "Sliding window length W");
  weights_cmd->add_option("--checkpoint", checkpoint, "Checkpoint path");

  auto* label_cmd = app.add_subcommand("optimize-labeling", "Tabu search for a bit-to-message labeling");
  label_cmd->add_option("--distance", distance, "Fiber length in km")->required();
  label_cmd->add_option("--window", window, "Sliding window length W");
  label_cmd->add_option("--checkpoint", checkpoint, "Checkpoint path");

  auto* mlsd_cmd = app.add_subcommand("mlsd", "PAM + Viterbi baseline at one distance");
  mlsd_cmd->add_option("--distance", distance, "Fiber length in km")->required();
  mlsd_cmd->add_option("--system", system, "pam2_mlsd or pam4_mlsd")->check(CLI::IsMember({"pam2_mlsd", "pam4_mlsd"}));
  mlsd_cmd->add_option("--memory", memory, "Viterbi memory mu (overrides the config)");

  int f_messages = 64, f_samples = 48, f_window = 10, f_order = 2, f_memory = 12, f_ns = 2;
  auto* flops_cmd = app.add_subcommand("flops", "FLOPS per decoded bit of both systems");
  flops_cmd->add_option("--messages", f_messages, "M");
  flops_cmd->add_option("--samples", f_samples, "n");
  flops_cmd->add_option("--window", f_window, "W");
  flops_cmd->add_option("--order", f_order, "PAM order");
  flops_cmd->add_option("--memory", f_memory, "mu");
  flops_cmd->add_option("--samples-per-symbol", f_ns, "N_s");

  std::string results_file;
  std::optional<double> hd_fec;
  auto* plot_cmd = app.add_subcommand("plot", "Render a results CSV as an SVG BER plot");
  plot_cmd->add_option("--results", results_file, "Results CSV")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--hd-fec", hd_fec, "Reference BER line (overrides experiment.hd_fec_threshold)");

  auto* config_cmd = app.add_subcommand("show-config", "Print the effective configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load(g);
    const auto log = logger(g);

    if (*train_cmd) {
      const Channel channel(cfg.channel_for(SystemKind::sbrnn, distance));
      const auto path = checkpoint.empty() ? checkpoint_path(cfg, distance) : checkpoint;
      auto result = train(cfg.train, channel, cfg.dims, [&](long long step, const TransceiverParams& p) {
        save_checkpoint(path + ".partial", p);
        if (log) log("checkpoint at step " + std::to_string(step));
      });
      save_checkpoint(path, result.best);
      fs::remove(path + ".partial");
      std::cerr << "saved " << path << '\n';
      emit(cfg, tag(cfg, "train", distance) + ".csv", format_train_log(result.log));
    } else if (*eval_cmd) {
      auto rows = evaluate_sbrnn(cfg, model_for(cfg, distance, checkpoint, log), distance, window, log);
      sort_rows(rows);
      emit(cfg, tag(cfg, "eval", distance) + "-W" + std::to_string(window) + ".csv", format_csv(rows));
    } else if (*sweep_cmd) {
      const auto rows = run_sweep(cfg, log);
      const auto csv = format_csv(rows);
      write_file(results_path(cfg, "csv"), csv);
      std::cout << csv;
      std::cerr << "wrote " << results_path(cfg, "csv") << '\n';
      if (!rows.empty()) write_file(results_path(cfg, "svg"), render_svg(rows, cfg.hd_fec_threshold));
    } else if (*weights_cmd) {
      const auto params = model_for(cfg, distance, checkpoint, log);
      const Channel channel(cfg.channel_for(SystemKind::sbrnn, distance));
      const auto fit = fit_sbrnn(cfg, params, channel, window);
      std::string text = "k,weight\n";
      for (Eigen::Index k = 0; k < fit.weights.weights.size(); ++k)
        text += std::to_string(k) + "," + format_double(fit.weights.weights(k)) + "\n";
      if (log)
        log("cost " + format_double(fit.weights.cost) + " (uniform " + format_double(fit.weights.uniform_cost) + ")");
      emit(cfg, tag(cfg, "weights", distance) + "-W" + std::to_string(window) + ".csv", text);
    } else if (*label_cmd) {
      const auto params = model_for(cfg, distance, checkpoint, log);
      const Channel channel(cfg.channel_for(SystemKind::sbrnn, distance));
      const auto fit = fit_sbrnn(cfg, params, channel, window);
      const auto& tabu = cfg.estimator.optimize_weights ? fit.optimized_labeling : fit.uniform_labeling;
      if (log)
        log("expected BER " + format_double(tabu.best_cost) + " (start " + format_double(tabu.start_cost) + ")");
      emit(cfg, tag(cfg, "labeling", distance) + "-W" + std::to_string(window) + ".txt", format_labeling(tabu.best));
    } else if (*mlsd_cmd) {
      auto c = cfg;
      const auto kind = parse_system(system);
      if (memory) (kind == SystemKind::pam2_mlsd ? c.mlsd.pam2_memory : c.mlsd.pam4_memory) = *memory;
      c.validate();
      const auto row = evaluate_mlsd(c, kind, distance, log);
      emit(c, tag(c, system, distance) + ".csv", format_csv({row}));
    } else if (*flops_cmd) {
      const auto r = FlopsReport::compute(f_messages, f_samples, f_window, f_order, f_memory, f_ns);
      std::string text = "M,n,W,M_pam,mu,N_s,sbrnn_tx,sbrnn_rx,mlsd\n";
      text += std::to_string(r.messages) + "," + std::to_string(r.samples) + "," + std::to_string(r.window) + "," +
              std::to_string(r.pam_order) + "," + std::to_string(r.memory) + "," +
              std::to_string(r.samples_per_symbol) + "," + format_double(r.sbrnn_tx) + "," +
              format_double(r.sbrnn_rx) + "," + format_double(r.mlsd) + "\n";
      emit(cfg, "flops-" + config_hash(cfg) + ".csv", text);
    } else if (*plot_cmd) {
      const auto rows = parse_csv(read_file(results_file));
      const auto svg = render_svg(rows, hd_fec ? hd_fec : cfg.hd_fec_threshold);
      const auto path = fs::path(cfg.output_dir) / (fs::path(results_file).stem().string() + ".svg");
      write_file(path.string(), svg);
      std::cerr << "wrote " << path.string() << '\n';
    } else if (*config_cmd) {
      std::cout << canonical_text(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
