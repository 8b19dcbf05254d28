#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <memory>
#include <mutex>

#include "lrd/error.hpp"

namespace lrd::fft {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> aligned(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (!p) fail(ErrorCode::numerical, "FFT buffer allocation failed");
  return std::unique_ptr<T[], FftwFree>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (!plan_) fail(ErrorCode::numerical, "FFTW could not create a plan");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

std::vector<cplx> forward_real(std::span<const double> x) {
  const std::size_t n = x.size();
  auto in = aligned<double>(n);
  auto out = aligned<fftw_complex>(n / 2 + 1);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::copy(x.begin(), x.end(), in.get());
  plan->execute();
  const auto* bins = reinterpret_cast<const cplx*>(out.get());
  return std::vector<cplx>(bins, bins + n / 2 + 1);
}

std::vector<double> backward_real(std::span<const cplx> half_spectrum, std::size_t n) {
  if (half_spectrum.size() != n / 2 + 1)
    fail(ErrorCode::parameter, "half spectrum length does not match transform size");
  auto in = aligned<fftw_complex>(n / 2 + 1);
  auto out = aligned<double>(n);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::memcpy(in.get(), half_spectrum.data(), sizeof(fftw_complex) * half_spectrum.size());
  plan->execute();
  return std::vector<double>(out.get(), out.get() + n);
}

std::vector<cplx> complex_transform(std::span<const cplx> x, int sign) {
  const std::size_t n = x.size();
  auto in = aligned<fftw_complex>(n);
  auto out = aligned<fftw_complex>(n);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(),
                                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                                   FFTW_ESTIMATE));
  }
  std::memcpy(in.get(), x.data(), sizeof(fftw_complex) * n);
  plan->execute();
  const auto* bins = reinterpret_cast<const cplx*>(out.get());
  return std::vector<cplx>(bins, bins + n);
}

}  // namespace lrd::fft
