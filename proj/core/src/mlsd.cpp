#include "sbrnn/mlsd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/random/uniform_int_distribution.hpp>

#include "sbrnn/error.hpp"
#include "sbrnn/labeling.hpp"
#include "sbrnn/rng.hpp"
#include "sbrnn/text.hpp"

namespace sbrnn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::vector<int> random_symbols(std::size_t count, int order, std::uint64_t seed) {
  Rng rng(seed);
  boost::random::uniform_int_distribution<int> dist(0, order - 1);
  std::vector<int> out(count);
  for (auto& s : out) s = dist(rng);
  return out;
}

// Index of the window x_{k-h} .. x_{k+h} read from a symbol array.
std::size_t window_at(std::span<const int> symbols, std::size_t k, int half, int order) {
  std::size_t w = 0;
  for (std::size_t j = k - static_cast<std::size_t>(half); j <= k + static_cast<std::size_t>(half); ++j)
    w = w * static_cast<std::size_t>(order) + static_cast<std::size_t>(symbols[j]);
  return w;
}

}  // namespace

NuTable::NuTable(int order_, int memory_, int samples_per_symbol_)
    : order(order_), memory(memory_), samples_per_symbol(samples_per_symbol_) {
  require(order >= 2, "nu table: order must be >= 2");
  require(memory >= 0 && memory % 2 == 0, "nu table: mu must be even and non-negative");
  require(samples_per_symbol >= 1, "nu table: N_s must be >= 1");
  require(ipow(static_cast<std::size_t>(order), memory + 1) <= (std::size_t{1} << 28), "nu table: too many states");
  const std::size_t w = ipow(static_cast<std::size_t>(order), memory + 1);
  means.assign(w * static_cast<std::size_t>(samples_per_symbol), 0.0);
  sum_sq_dev.assign(means.size(), 0.0);
  counts.assign(w, 0);
}

double NuTable::coverage() const {
  if (counts.empty()) return 0.0;
  const auto seen = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  return static_cast<double>(seen) / static_cast<double>(counts.size());
}

double NuTable::variance(std::size_t window, int phase) const {
  const auto c = counts.at(window);
  if (c < 2) return 0.0;
  return sum_sq_dev[window * static_cast<std::size_t>(samples_per_symbol) + static_cast<std::size_t>(phase)] /
         static_cast<double>(c - 1);
}

std::size_t NuTable::window_index(std::span<const int> sigma, int x) const {
  require(static_cast<int>(sigma.size()) == memory, "state length must equal mu");
  const std::size_t half = static_cast<std::size_t>(memory / 2);
  std::size_t w = 0;
  auto push = [&](int s) {
    require(s >= 0 && s < order, "symbol index out of range");
    w = w * static_cast<std::size_t>(order) + static_cast<std::size_t>(s);
  };
  for (std::size_t j = 0; j < half; ++j) push(sigma[j]);
  push(x);
  for (std::size_t j = half; j < sigma.size(); ++j) push(sigma[j]);
  return w;
}

void NuTable::accumulate(std::size_t window, std::span<const double> sqrt_samples) {
  const auto ns = static_cast<std::size_t>(samples_per_symbol);
  const auto n = static_cast<double>(++counts.at(window));
  for (std::size_t l = 0; l < ns; ++l) {
    double& mean = means[window * ns + l];
    const double delta = sqrt_samples[l] - mean;
    mean += delta / n;
    sum_sq_dev[window * ns + l] += delta * (sqrt_samples[l] - mean);
  }
}

void NuTable::merge(const NuTable& other) {
  require(other.order == order && other.memory == memory && other.samples_per_symbol == samples_per_symbol,
          "nu table: cannot merge tables of different shape");
  const auto ns = static_cast<std::size_t>(samples_per_symbol);
  for (std::size_t w = 0; w < counts.size(); ++w) {
    const auto na = static_cast<double>(counts[w]);
    const auto nb = static_cast<double>(other.counts[w]);
    if (nb == 0) continue;
    const double n = na + nb;
    for (std::size_t l = 0; l < ns; ++l) {
      const std::size_t i = w * ns + l;
      const double delta = other.means[i] - means[i];
      means[i] += delta * nb / n;
      sum_sq_dev[i] += other.sum_sq_dev[i] + delta * delta * na * nb / n;
    }
    counts[w] += other.counts[w];
  }
}

std::size_t trellis_states(int order, int memory) { return ipow(static_cast<std::size_t>(order), memory); }

double branch_metric(std::span<const double> y, std::size_t window, const NuTable& table) {
  if (table.counts[window] == 0) return kInf;
  const auto ns = static_cast<std::size_t>(table.samples_per_symbol);
  double m = 0.0;
  for (std::size_t l = 0; l < ns; ++l) {
    const double d = std::sqrt(std::max(y[l], 0.0)) - table.means[window * ns + l];
    m += d * d;
  }
  return m;
}

double branch_metric(std::span<const double> y, std::span<const int> sigma, int x, const NuTable& table) {
  require(static_cast<int>(y.size()) == table.samples_per_symbol, "branch metric needs N_s samples");
  return branch_metric(y, table.window_index(sigma, x), table);
}

std::vector<int> viterbi_detect(std::span<const double> y, const NuTable& table, std::span<const int> preamble,
                                std::span<const int> postamble) {
  const int half = table.memory / 2;
  const auto order = static_cast<std::size_t>(table.order);
  const auto ns = static_cast<std::size_t>(table.samples_per_symbol);
  require(static_cast<int>(preamble.size()) == half && static_cast<int>(postamble.size()) == half,
          "viterbi: preamble and postamble must hold mu/2 symbols");
  require(y.size() % ns == 0, "viterbi: sample count must be a multiple of N_s");
  const std::size_t n_sym = y.size() / ns;
  if (n_sym == 0) return {};
  require(n_sym >= static_cast<std::size_t>(half), "viterbi: block shorter than mu/2");

  const std::size_t states = trellis_states(table.order, table.memory);
  // State P_k = (x_{k-h} .. x_{k+h-1}); window w_k = P_k * M + x_{k+h}.
  std::vector<double> metric(states, kInf);
  std::vector<double> next(states);
  std::vector<std::uint32_t> survivors(n_sym * states);

  std::size_t prefix = 0;
  for (int s : preamble) prefix = prefix * order + static_cast<std::size_t>(s);
  const std::size_t free_states = ipow(order, half);
  for (std::size_t j = 0; j < free_states; ++j) metric[prefix * free_states + j] = 0.0;

  for (std::size_t k = 0; k < n_sym; ++k) {
    std::fill(next.begin(), next.end(), kInf);
    const auto yk = y.subspan(k * ns, ns);
    const std::size_t ahead = k + static_cast<std::size_t>(half);
    std::size_t x_lo = 0;
    std::size_t x_hi = order;
    if (ahead >= n_sym) {
      x_lo = static_cast<std::size_t>(postamble[ahead - n_sym]);
      x_hi = x_lo + 1;
    }
    auto* surv = survivors.data() + k * states;
    for (std::size_t s = 0; s < states; ++s) {
      const double base = metric[s];
      if (base == kInf) continue;
      for (std::size_t x = x_lo; x < x_hi; ++x) {
        const std::size_t w = s * order + x;
        const double cand = base + branch_metric(yk, w, table);
        const std::size_t ns_idx = w % states;
        if (cand < next[ns_idx]) {
          next[ns_idx] = cand;
          surv[ns_idx] = static_cast<std::uint32_t>(w);
        }
      }
    }
    metric.swap(next);
  }

  const auto best = static_cast<std::size_t>(std::min_element(metric.begin(), metric.end()) - metric.begin());
  require(metric[best] < kInf, "viterbi: no surviving path (nu table does not cover the trellis)");

  std::vector<int> decided(n_sym + static_cast<std::size_t>(half));  // x_0 .. x_{N+h-1}
  std::size_t state = best;
  for (std::size_t k = n_sym; k-- > 0;) {
    const std::size_t w = survivors[k * states + state];
    decided[k + static_cast<std::size_t>(half)] = static_cast<int>(w % order);
    state = w / order;
  }
  // `state` is now P_0; its low h digits are x_0 .. x_{h-1}.
  for (int j = half - 1; j >= 0; --j) {
    if (static_cast<std::size_t>(j) < n_sym) decided[static_cast<std::size_t>(j)] = static_cast<int>(state % order);
    state /= order;
  }
  decided.resize(n_sym);
  return decided;
}

double sequence_metric(std::span<const double> y, const NuTable& table, std::span<const int> preamble,
                       std::span<const int> symbols, std::span<const int> postamble) {
  const int half = table.memory / 2;
  const auto ns = static_cast<std::size_t>(table.samples_per_symbol);
  require(y.size() == symbols.size() * ns, "sequence_metric: sample count mismatch");
  std::vector<int> full(preamble.begin(), preamble.end());
  full.insert(full.end(), symbols.begin(), symbols.end());
  full.insert(full.end(), postamble.begin(), postamble.end());
  double total = 0.0;
  for (std::size_t k = 0; k < symbols.size(); ++k)
    total += branch_metric(y.subspan(k * ns, ns), window_at(full, k + static_cast<std::size_t>(half), half, table.order),
                           table);
  return total;
}

PamLink::PamLink(PamConfig pam, ChannelConfig channel)
    : pam_(std::move(pam)), channel_([&] {
        channel.dac_rate = pam_.dac_rate;
        return channel;
      }()) {
  pam_.validate();
}

std::vector<double> PamLink::transmit(std::span<const int> symbols, std::uint64_t noise_seed) const {
  const int os = channel_.config().oversampling;
  const int sps = pam_.samples_per_symbol * os;
  const auto drive = shape_symbols(symbols, pam_, sps);
  const auto [rx, noise] = channel_.forward(drive, noise_seed);
  std::vector<double> out(symbols.size() * static_cast<std::size_t>(pam_.samples_per_symbol));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rx.samples[i * static_cast<std::size_t>(os)];
  return out;
}

int PamLink::edge_symbols() const {
  const int sps = pam_.samples_per_symbol * channel_.config().oversampling;
  const auto memory = static_cast<int>(fiber_guard(channel_.config()) / 4);
  return pam_.span_symbols + (memory + sps - 1) / sps + 32;
}

NuTable estimate_nu(const PamLink& link, int memory, std::size_t train_symbols, std::uint64_t seed,
                    std::size_t chunk_symbols) {
  const auto& pam = link.pam();
  NuTable table(pam.order, memory, pam.samples_per_symbol);
  const int half = memory / 2;
  const auto edge = static_cast<std::size_t>(std::max(link.edge_symbols(), half));
  require(chunk_symbols > 2 * edge, "estimate_nu: chunk too short for the channel memory");
  const auto ns = static_cast<std::size_t>(pam.samples_per_symbol);

  std::size_t used = 0;
  for (std::uint64_t chunk = 0; used < train_symbols; ++chunk) {
    const std::size_t want = std::min(chunk_symbols - 2 * edge, train_symbols - used);
    const std::size_t len = want + 2 * edge;
    const auto symbols = random_symbols(len, pam.order, derive_seed(seed, "nu-symbols", chunk));
    const auto y = link.transmit(symbols, derive_seed(seed, "nu-noise", chunk));
    std::vector<double> root(ns);
    for (std::size_t k = edge; k < edge + want; ++k) {
      for (std::size_t l = 0; l < ns; ++l) root[l] = std::sqrt(std::max(y[k * ns + l], 0.0));
      table.accumulate(window_at(symbols, k, half, pam.order), root);
    }
    used += want;
  }
  return table;
}

MlsdResult mlsd_ber(const PamLink& link, const NuTable& table, std::size_t test_symbols, std::uint64_t seed,
                    std::size_t frame_symbols, std::size_t chunk_symbols) {
  const auto& pam = link.pam();
  require(table.order == pam.order && table.samples_per_symbol == pam.samples_per_symbol,
          "mlsd_ber: nu table does not match the PAM configuration");
  require(frame_symbols >= 1, "mlsd_ber: frame length must be >= 1");
  const auto half = static_cast<std::size_t>(table.memory / 2);
  require(frame_symbols >= half, "mlsd_ber: frame shorter than mu/2");
  const auto edge = static_cast<std::size_t>(link.edge_symbols());
  const auto ns = static_cast<std::size_t>(pam.samples_per_symbol);
  require(chunk_symbols > 2 * edge + frame_symbols + 2 * half, "mlsd_ber: chunk too short");

  MlsdResult r;
  for (std::uint64_t chunk = 0; r.symbols < test_symbols; ++chunk) {
    const auto symbols = random_symbols(chunk_symbols, pam.order, derive_seed(seed, "mlsd-test-symbols", chunk));
    const auto y = link.transmit(symbols, derive_seed(seed, "mlsd-test-noise", chunk));
    // Layout inside the usable region: [known h][frame][known h][frame]...[known h]
    std::size_t pos = edge;
    while (r.symbols < test_symbols) {
      const std::size_t start = pos + half;
      const std::size_t len = std::min(frame_symbols, test_symbols - r.symbols);
      if (len < half || start + len + half + edge > chunk_symbols) break;
      const std::span<const int> all(symbols);
      const auto decided = viterbi_detect(std::span<const double>(y).subspan(start * ns, len * ns), table,
                                          all.subspan(pos, half), all.subspan(start + len, half));
      for (std::size_t k = 0; k < len; ++k) {
        const int truth = symbols[start + k];
        r.symbol_errors += decided[k] != truth;
        r.bit_errors += static_cast<std::size_t>(hamming(gray_codeword(truth), gray_codeword(decided[k])));
      }
      r.symbols += len;
      r.bits += len * static_cast<std::size_t>(pam.bits_per_symbol());
      pos = start + len;
    }
  }
  return r;
}

std::string format_nu_table(const NuTable& table) {
  std::ostringstream out;
  out << "nu_table " << table.order << ' ' << table.memory << ' ' << table.samples_per_symbol << '\n';
  const auto ns = static_cast<std::size_t>(table.samples_per_symbol);
  for (std::size_t w = 0; w < table.windows(); ++w) {
    for (std::size_t l = 0; l < ns; ++l) out << format_double(table.means[w * ns + l]) << ' ';
    out << table.counts[w] << '\n';
  }
  return out.str();
}

NuTable parse_nu_table(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int order = 0, memory = 0, ns = 0;
  in >> magic >> order >> memory >> ns;
  require(in && magic == "nu_table", "nu table: bad header");
  NuTable table(order, memory, ns);
  for (std::size_t w = 0; w < table.windows(); ++w) {
    for (int l = 0; l < ns; ++l) {
      std::string tok;
      in >> tok;
      require(static_cast<bool>(in), "nu table: truncated file");
      table.means[w * static_cast<std::size_t>(ns) + static_cast<std::size_t>(l)] = parse_double(tok);
    }
    in >> table.counts[w];
    require(static_cast<bool>(in), "nu table: truncated file");
  }
  return table;
}

}  // namespace sbrnn
