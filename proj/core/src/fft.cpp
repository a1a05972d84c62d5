#include "sbrnn/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>

namespace sbrnn::fft {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per length on an aligned scratch buffer, data is
// copied through that buffer so caller alignment never matters.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.fwd);
      fftw_destroy_plan(p.inv);
    }
  }

  void run(std::span<cplx> data, bool inverse_direction) {
    const std::size_t n = data.size();
    if (n == 0) return;
    fftw_plan plan = nullptr;
    {
      std::lock_guard lock(mutex_);
      auto it = plans_.find(n);
      if (it == plans_.end()) {
        auto* buf = fftw_alloc_complex(n);
        Plans p;
        p.fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        p.inv = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_free(buf);
        it = plans_.emplace(n, p).first;
      }
      plan = inverse_direction ? it->second.inv : it->second.fwd;
    }
    auto* buf = fftw_alloc_complex(n);
    std::memcpy(buf, data.data(), n * sizeof(cplx));
    fftw_execute_dft(plan, buf, buf);
    std::memcpy(data.data(), buf, n * sizeof(cplx));
    fftw_free(buf);
  }

 private:
  struct Plans {
    fftw_plan fwd;
    fftw_plan inv;
  };
  std::mutex mutex_;
  std::map<std::size_t, Plans> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void forward(std::span<cplx> data) { cache().run(data, false); }

void inverse(std::span<cplx> data) {
  cache().run(data, true);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

std::size_t good_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

double bin_omega(std::size_t k, std::size_t n, double fs) {
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(n);
  const double f = (2 * k <= n) ? kk * fs / nn : (kk - nn) * fs / nn;
  return 2.0 * std::numbers::pi * f;
}

}  // namespace sbrnn::fft
