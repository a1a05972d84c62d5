#include "sbrnn/complexity.hpp"

#include <bit>

#include "sbrnn/error.hpp"

namespace sbrnn {

namespace {

double log2_order(int m) {
  require(m >= 2 && std::has_single_bit(static_cast<unsigned>(m)), "order must be a power of two >= 2");
  return static_cast<double>(std::countr_zero(static_cast<unsigned>(m)));
}

}  // namespace

double flops_sbrnn_tx(int messages, int samples) {
  require(samples >= 1, "n must be >= 1");
  const double m = messages;
  const double n = samples;
  return 2.0 * n * (2.0 * (m + n) + 1.0) / log2_order(messages);
}

double flops_sbrnn_rx(int messages, int samples, int window) {
  require(samples >= 1, "n must be >= 1");
  require(window >= 0, "window must be >= 0");
  const double m = messages;
  const double n = samples;
  return window * (24.0 * m * m + 8.0 * m * n + 5.0 * m + 2.0) / log2_order(messages);
}

double flops_mlsd(int order, int memory, int samples_per_symbol) {
  require(memory >= 0, "mu must be >= 0");
  require(samples_per_symbol >= 1, "N_s must be >= 1");
  double branches = order;
  for (int i = 0; i < memory; ++i) branches *= order;
  // Branch metric 3 N_s + (N_s - 1), then one addition and one comparison.
  const double per_branch = 4.0 * samples_per_symbol + 1.0;
  return per_branch * branches / log2_order(order);
}

FlopsReport FlopsReport::compute(int messages, int samples, int window, int pam_order, int memory,
                                 int samples_per_symbol) {
  FlopsReport r{messages, samples, window, pam_order, memory, samples_per_symbol};
  r.sbrnn_tx = flops_sbrnn_tx(messages, samples);
  r.sbrnn_rx = flops_sbrnn_rx(messages, samples, window);
  r.mlsd = flops_mlsd(pam_order, memory, samples_per_symbol);
  return r;
}

}  // namespace sbrnn
