#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/taus88.hpp>

namespace sbrnn {

/// Engine used for every stochastic component (noise, initialization,
/// training data). Boost engines and distributions give identical streams
/// on every platform, which the byte-exact output contract relies on.
using Rng = boost::random::mt19937_64;

/// Message sources. Training data comes from the Mersenne twister, test data
/// from the combined Tausworthe generator, so the two never share a stream.
enum class RngFamily { mersenne_twister, tausworthe };

RngFamily parse_rng_family(std::string_view name);
std::string_view to_string(RngFamily family);

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a(std::string_view text);

/// Derives an independent 64-bit seed from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index = 0);

/// i.i.d. uniform message indices in [0, alphabet).
std::vector<int> generate_messages(std::size_t count, int alphabet, RngFamily family, std::uint64_t seed);

/// Stateful message source; drawing in pieces yields the same stream as one
/// large draw with the same seed.
class MessageSource {
 public:
  MessageSource(int alphabet, RngFamily family, std::uint64_t seed);

  int next();
  void fill(std::vector<int>& out, std::size_t count);

 private:
  int alphabet_;
  RngFamily family_;
  boost::random::mt19937 mt_;
  boost::random::taus88 taus_;
};

}  // namespace sbrnn
