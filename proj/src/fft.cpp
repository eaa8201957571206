#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace mfglab::detail {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int d, int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(d, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<int> dims(static_cast<std::size_t>(d), n);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
    // planning buffers; FFTW_ESTIMATE leaves them untouched
    std::vector<fftw_complex> a(total), b(total);
    fftw_plan plan = fftw_plan_dft(d, dims.data(), a.data(), b.data(),
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft(int d, int n, int sign, std::span<const std::complex<double>> in,
         std::span<std::complex<double>> out) {
  fftw_plan plan = cache().get(d, n, sign);
  // fftw_execute_dft never writes to `in` for out-of-place plans
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, src, dst);
}

}  // namespace mfglab::detail
