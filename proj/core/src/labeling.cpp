#include "sbrnn/labeling.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/random/uniform_int_distribution.hpp>

#include "sbrnn/error.hpp"
#include "sbrnn/rng.hpp"

namespace sbrnn {

int hamming(std::uint32_t a, std::uint32_t b) { return std::popcount(a ^ b); }

bool BitLabeling::is_bijection() const {
  if (bits < 0 || bits > 31) return false;
  const std::size_t space = std::size_t{1} << bits;
  if (codewords.size() > space) return false;
  std::vector<bool> seen(space, false);
  for (auto c : codewords) {
    if (c >= space || seen[c]) return false;
    seen[c] = true;
  }
  return true;
}

BitLabeling BitLabeling::gray(int messages) {
  require(messages >= 2 && std::has_single_bit(static_cast<unsigned>(messages)), "labeling needs M = 2^B");
  BitLabeling l;
  l.bits = std::countr_zero(static_cast<unsigned>(messages));
  l.codewords.resize(static_cast<std::size_t>(messages));
  for (int m = 0; m < messages; ++m) l.codewords[static_cast<std::size_t>(m)] = static_cast<std::uint32_t>(m ^ (m >> 1));
  return l;
}

BitLabeling BitLabeling::random(int messages, std::uint64_t seed) {
  auto l = gray(messages);
  std::iota(l.codewords.begin(), l.codewords.end(), 0u);
  Rng rng(derive_seed(seed, "random-labeling"));
  // Fisher-Yates with a portable distribution.
  for (std::size_t i = l.codewords.size() - 1; i > 0; --i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(l.codewords[i], l.codewords[pick(rng)]);
  }
  return l;
}

ConfusionMatrix estimate_confusion(std::span<const int> labels, std::span<const int> decisions, int messages) {
  require(!labels.empty(), "estimate_confusion: empty input");
  require(labels.size() == decisions.size(), "estimate_confusion: length mismatch");
  require(messages >= 1, "estimate_confusion: invalid alphabet");
  ConfusionMatrix c;
  c.probs = Eigen::MatrixXd::Zero(messages, messages);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0 && labels[i] < messages && decisions[i] >= 0 && decisions[i] < messages,
            "estimate_confusion: message index out of range");
    c.probs(labels[i], decisions[i]) += 1.0;
  }
  c.unobserved_rows.assign(static_cast<std::size_t>(messages), false);
  for (int m = 0; m < messages; ++m) {
    const double total = c.probs.row(m).sum();
    if (total == 0.0) {
      c.unobserved_rows[static_cast<std::size_t>(m)] = true;
      c.probs.row(m).setConstant(1.0 / messages);
    } else {
      c.probs.row(m) /= total;
    }
  }
  return c;
}

double expected_ber(const BitLabeling& labeling, const ConfusionMatrix& confusion) {
  const int m_count = confusion.messages();
  require(labeling.messages() == m_count, "expected_ber: labeling size does not match confusion matrix");
  require(labeling.bits >= 1, "expected_ber: labeling needs at least one bit");
  double total = 0.0;
  for (int m = 0; m < m_count; ++m)
    for (int k = 0; k < m_count; ++k)
      total += confusion.probs(m, k) * hamming(labeling.codewords[static_cast<std::size_t>(m)],
                                               labeling.codewords[static_cast<std::size_t>(k)]);
  return total / (static_cast<double>(m_count) * labeling.bits);
}

double ber_lower_bound(const ConfusionMatrix& confusion, int bits) {
  require(bits >= 1, "ber_lower_bound: bits must be >= 1");
  const int m_count = confusion.messages();
  double err = 0.0;
  for (int m = 0; m < m_count; ++m) err += 1.0 - confusion.probs(m, m);
  return err / m_count / bits;
}

TabuResult tabu_search(const ConfusionMatrix& confusion, std::uint64_t seed, int iterations, std::size_t list_size) {
  return tabu_search(confusion, BitLabeling::random(confusion.messages(), seed), iterations, list_size);
}

TabuResult tabu_search(const ConfusionMatrix& confusion, BitLabeling start, int iterations, std::size_t list_size) {
  const int m_count = confusion.messages();
  require(std::has_single_bit(static_cast<unsigned>(m_count)) && m_count >= 2, "tabu_search: M must be 2^B");
  require(iterations >= 1, "tabu_search: iterations must be >= 1");
  require(start.messages() == m_count && start.is_bijection(), "tabu_search: start labeling must be a bijection");

  const Eigen::MatrixXd sym = confusion.probs + confusion.probs.transpose();

  TabuResult r;
  r.start = start;
  r.start_cost = expected_ber(start, confusion);
  r.best = start;
  r.best_cost = r.start_cost;

  BitLabeling current = std::move(start);
  std::deque<std::pair<int, int>> fifo;
  std::vector<int> tabu_count(static_cast<std::size_t>(m_count * m_count), 0);
  auto is_tabu = [&](int i, int j) { return tabu_count[static_cast<std::size_t>(i * m_count + j)] > 0; };

  for (int it = 0; it < iterations; ++it) {
    const auto& cw = current.codewords;
    double best_free = std::numeric_limits<double>::infinity();
    double best_any = std::numeric_limits<double>::infinity();
    std::pair<int, int> move_free{-1, -1};
    std::pair<int, int> move_any{-1, -1};
    for (int a = 0; a < m_count; ++a) {
      for (int b = a + 1; b < m_count; ++b) {
        double delta = 0.0;
        const auto ca = cw[static_cast<std::size_t>(a)];
        const auto cb = cw[static_cast<std::size_t>(b)];
        for (int k = 0; k < m_count; ++k) {
          if (k == a || k == b) continue;
          const auto ck = cw[static_cast<std::size_t>(k)];
          delta += (sym(a, k) - sym(b, k)) * (hamming(cb, ck) - hamming(ca, ck));
        }
        // Strict comparison keeps the lexicographically smallest pair on ties.
        if (!is_tabu(a, b) && delta < best_free) {
          best_free = delta;
          move_free = {a, b};
        }
        if (delta < best_any) {
          best_any = delta;
          move_any = {a, b};
        }
      }
    }
    // Aspiration: if every move is tabu, take the best tabu move.
    const auto move = move_free.first >= 0 ? move_free : move_any;
    current.swap(move.first, move.second);
    fifo.push_back(move);
    ++tabu_count[static_cast<std::size_t>(move.first * m_count + move.second)];
    while (fifo.size() > list_size) {
      const auto old = fifo.front();
      fifo.pop_front();
      --tabu_count[static_cast<std::size_t>(old.first * m_count + old.second)];
    }
    const double cost = expected_ber(current, confusion);
    if (cost < r.best_cost) {
      r.best_cost = cost;
      r.best = current;
    }
    r.best_cost_trace.push_back(r.best_cost);
  }
  return r;
}

std::string format_labeling(const BitLabeling& labeling) {
  std::string out;
  for (auto c : labeling.codewords) {
    for (int b = labeling.bits - 1; b >= 0; --b) out.push_back(((c >> b) & 1u) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

BitLabeling parse_labeling(const std::string& text) {
  BitLabeling l;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (l.codewords.empty()) l.bits = static_cast<int>(line.size());
    require(static_cast<int>(line.size()) == l.bits, "labeling: inconsistent codeword length");
    require(l.bits <= 31, "labeling: codewords longer than 31 bits");
    std::uint32_t c = 0;
    for (char ch : line) {
      require(ch == '0' || ch == '1', "labeling: codewords must be binary strings");
      c = (c << 1) | static_cast<std::uint32_t>(ch == '1');
    }
    l.codewords.push_back(c);
  }
  require(!l.codewords.empty(), "labeling: empty file");
  require(l.is_bijection(), "labeling: codewords are not distinct");
  return l;
}

}  // namespace sbrnn
