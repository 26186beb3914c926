// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "colddiff/error.hpp"

namespace colddiff {
namespace {

// FFTW's planner is not thread-safe; execution with new-array functions is.
// Plans live for the lifetime of the process.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

PlanPair real_plans(int n) {
  std::lock_guard lock(planner_mutex());
  static std::map<int, PlanPair> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> re(n);
  std::vector<fftw_complex> spec(n / 2 + 1);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_1d(n, re.data(), spec.data(), kPlanFlags);
  p.inverse = fftw_plan_dft_c2r_1d(n, spec.data(), re.data(), kPlanFlags);
  if (!p.forward || !p.inverse) throw NumericalError("FFTW failed to plan real FFT");
  cache.emplace(n, p);
  return p;
}

PlanPair complex_plans(int n) {
  std::lock_guard lock(planner_mutex());
  static std::map<int, PlanPair> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<fftw_complex> a(n), b(n);
  PlanPair p;
  p.forward = fftw_plan_dft_1d(n, a.data(), b.data(), FFTW_FORWARD, kPlanFlags);
  p.inverse = fftw_plan_dft_1d(n, a.data(), b.data(), FFTW_BACKWARD, kPlanFlags);
  if (!p.forward || !p.inverse) throw NumericalError("FFTW failed to plan complex FFT");
  cache.emplace(n, p);
  return p;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  require(n > 0, "FFT size must be positive");
  const PlanPair p = real_plans(n);
  forward_plan_ = p.forward;
  inverse_plan_ = p.inverse;
}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) const {
  require(static_cast<int>(in.size()) == n_ && static_cast<int>(out.size()) == bins(),
          "RealFft::forward: size mismatch");
  // r2c preserves its input for 1-d transforms.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(const_cast<void*>(forward_plan_)),
                       const_cast<double*>(in.data()), as_fftw(out.data()));
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) const {
  require(static_cast<int>(in.size()) == bins() && static_cast<int>(out.size()) == n_,
          "RealFft::inverse: size mismatch");
  std::vector<Complex> scratch(in.begin(), in.end());  // c2r destroys its input
  fftw_execute_dft_c2r(static_cast<fftw_plan>(const_cast<void*>(inverse_plan_)),
                       as_fftw(scratch.data()), out.data());
  const double scale = 1.0 / n_;
  for (double& v : out) v *= scale;
}

ComplexFft::ComplexFft(int n) : n_(n) {
  require(n > 0, "FFT size must be positive");
  const PlanPair p = complex_plans(n);
  forward_plan_ = p.forward;
  inverse_plan_ = p.inverse;
}

void ComplexFft::forward(std::span<const Complex> in, std::span<Complex> out) const {
  require(static_cast<int>(in.size()) == n_ && static_cast<int>(out.size()) == n_,
          "ComplexFft::forward: size mismatch");
  std::vector<Complex> scratch(in.begin(), in.end());
  fftw_execute_dft(static_cast<fftw_plan>(const_cast<void*>(forward_plan_)),
                   as_fftw(scratch.data()), as_fftw(out.data()));
}

void ComplexFft::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  require(static_cast<int>(in.size()) == n_ && static_cast<int>(out.size()) == n_,
          "ComplexFft::inverse: size mismatch");
  std::vector<Complex> scratch(in.begin(), in.end());
  fftw_execute_dft(static_cast<fftw_plan>(const_cast<void*>(inverse_plan_)),
                   as_fftw(scratch.data()), as_fftw(out.data()));
  const double scale = 1.0 / n_;
  for (Complex& v : out) v *= scale;
}

int fast_fft_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

}  // namespace colddiff
