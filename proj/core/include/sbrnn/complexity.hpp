#pragma once

namespace sbrnn {

/// FLOPS per decoded bit of the transmitter BRNN (two directions, n outputs each).
double flops_sbrnn_tx(int messages, int samples);

/// FLOPS per decoded bit of the receiver BRNN over a window of W blocks.
double flops_sbrnn_rx(int messages, int samples, int window);

/// FLOPS per decoded bit of a fully populated Viterbi trellis with M^mu states,
/// (4 N_s + 1) M^(mu+1) / log2 M. Comparisons count as one FLOP; the final
/// survivor selection is not counted.
double flops_mlsd(int order, int memory, int samples_per_symbol = 2);

/// Analytic counts only; inactive ReLU units and one-hot embedding lookups are not modeled.
struct FlopsReport {
  int messages = 64;
  int samples = 48;
  int window = 10;
  int pam_order = 2;
  int memory = 12;
  int samples_per_symbol = 2;
  double sbrnn_tx = 0.0;
  double sbrnn_rx = 0.0;
  double mlsd = 0.0;

  static FlopsReport compute(int messages, int samples, int window, int pam_order, int memory,
                             int samples_per_symbol = 2);
};

}  // namespace sbrnn
