#include "driftfit/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace driftfit::fft {

namespace {

// FFTW planning is not thread-safe; execution on new arrays is. Plans are
// in-place and unaligned so any std::complex buffer can be passed in.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mu_);
    const auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::span<std::complex<double>> x, int sign) {
  if (x.size() <= 1) return;
  fftw_plan plan = cache().get(x.size(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(x.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void forward_inplace(std::span<std::complex<double>> x) { run(x, FFTW_FORWARD); }
void backward_inplace(std::span<std::complex<double>> x) { run(x, FFTW_BACKWARD); }

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x) {
  std::vector<std::complex<double>> out(x.begin(), x.end());
  forward_inplace(out);
  return out;
}

std::vector<std::complex<double>> backward(std::span<const std::complex<double>> x) {
  std::vector<std::complex<double>> out(x.begin(), x.end());
  backward_inplace(out);
  return out;
}

}  // namespace driftfit::fft
