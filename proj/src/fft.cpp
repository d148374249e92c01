#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace kdvk::detail {
namespace {

enum class Kind { forward, backward, r2c, c2r };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Kind kind, int n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(kind, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    auto* cin = fftw_alloc_complex(static_cast<size_t>(n));
    auto* cout = fftw_alloc_complex(static_cast<size_t>(n));
    auto* rbuf = fftw_alloc_real(static_cast<size_t>(n));
    fftw_plan plan = nullptr;
    switch (kind) {
      case Kind::forward:
        plan = fftw_plan_dft_1d(n, cin, cout, FFTW_FORWARD, flags);
        break;
      case Kind::backward:
        plan = fftw_plan_dft_1d(n, cin, cout, FFTW_BACKWARD, flags);
        break;
      case Kind::r2c:
        plan = fftw_plan_dft_r2c_1d(n, rbuf, cout, flags);
        break;
      case Kind::c2r:
        plan = fftw_plan_dft_c2r_1d(n, cin, rbuf, flags);
        break;
    }
    fftw_free(cin);
    fftw_free(cout);
    fftw_free(rbuf);
    if (plan == nullptr) throw std::runtime_error("FFTW planner failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<Kind, int>, fftw_plan> plans_;
};

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cplx* p) {
  // FFTW never writes to the input of an out-of-place c2c or r2c transform.
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

void check_sizes(size_t in, size_t out) {
  if (in != out) throw std::invalid_argument("fft: input/output size mismatch");
}

}  // namespace

void fft_forward(std::span<const cplx> in, std::span<cplx> out) {
  check_sizes(in.size(), out.size());
  auto plan = PlanCache::instance().get(Kind::forward, static_cast<int>(in.size()));
  fftw_execute_dft(plan, as_fftw(in.data()), as_fftw(out.data()));
}

void fft_backward(std::span<const cplx> in, std::span<cplx> out) {
  check_sizes(in.size(), out.size());
  auto plan = PlanCache::instance().get(Kind::backward, static_cast<int>(in.size()));
  fftw_execute_dft(plan, as_fftw(in.data()), as_fftw(out.data()));
}

void fft_r2c(std::span<const double> in, std::span<cplx> out) {
  check_sizes(in.size() / 2 + 1, out.size());
  auto plan = PlanCache::instance().get(Kind::r2c, static_cast<int>(in.size()));
  fftw_execute_dft_r2c(plan, const_cast<double*>(in.data()), as_fftw(out.data()));
}

void fft_c2r(std::span<cplx> in, std::span<double> out) {
  check_sizes(out.size() / 2 + 1, in.size());
  auto plan = PlanCache::instance().get(Kind::c2r, static_cast<int>(out.size()));
  fftw_execute_dft_c2r(plan, as_fftw(in.data()), out.data());
}

}  // namespace kdvk::detail
