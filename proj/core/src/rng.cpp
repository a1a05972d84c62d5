#include "sbrnn/rng.hpp"

#include <boost/random/uniform_int_distribution.hpp>

#include "sbrnn/error.hpp"

namespace sbrnn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngFamily parse_rng_family(std::string_view name) {
  if (name == "mersenne_twister" || name == "mt") return RngFamily::mersenne_twister;
  if (name == "tausworthe" || name == "taus") return RngFamily::tausworthe;
  throw ConfigError("unknown RNG family '" + std::string(name) + "'");
}

std::string_view to_string(RngFamily family) {
  return family == RngFamily::mersenne_twister ? "mersenne_twister" : "tausworthe";
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) {
  return splitmix64(splitmix64(base ^ fnv1a(tag)) + index);
}

MessageSource::MessageSource(int alphabet, RngFamily family, std::uint64_t seed)
    : alphabet_(alphabet), family_(family) {
  require(alphabet >= 1, "message alphabet must be >= 1");
  const auto s32 = static_cast<std::uint32_t>(splitmix64(seed) >> 32);
  mt_.seed(s32);
  taus_.seed(s32);
}

int MessageSource::next() {
  boost::random::uniform_int_distribution<int> dist(0, alphabet_ - 1);
  return family_ == RngFamily::mersenne_twister ? dist(mt_) : dist(taus_);
}

void MessageSource::fill(std::vector<int>& out, std::size_t count) {
  out.resize(count);
  for (auto& m : out) m = next();
}

std::vector<int> generate_messages(std::size_t count, int alphabet, RngFamily family, std::uint64_t seed) {
  MessageSource source(alphabet, family, seed);
  std::vector<int> out;
  source.fill(out, count);
  return out;
}

}  // namespace sbrnn
