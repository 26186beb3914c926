// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace colddiff {

using Complex = std::complex<double>;

// Real-input FFT of fixed length n (any positive n). Instances are cheap to
// copy; plans are created once per size and shared. Execution is
// thread-safe.
class RealFft {
 public:
  explicit RealFft(int n);

  int size() const { return n_; }
  int bins() const { return n_ / 2 + 1; }

  // in: n samples; out: n/2 + 1 bins. Unnormalized.
  void forward(std::span<const double> in, std::span<Complex> out) const;

  // in: n/2 + 1 bins (imaginary parts of DC/Nyquist ignored); out: n
  // samples. Scaled by 1/n so inverse(forward(x)) == x.
  void inverse(std::span<const Complex> in, std::span<double> out) const;

 private:
  int n_;
  const void* forward_plan_;
  const void* inverse_plan_;
};

// Complex FFT of fixed length n.
class ComplexFft {
 public:
  explicit ComplexFft(int n);

  int size() const { return n_; }

  // Unnormalized forward transform (e^{-i...}).
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  // Inverse transform scaled by 1/n.
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  int n_;
  const void* forward_plan_;
  const void* inverse_plan_;
};

// Smallest 2^a 3^b 5^c 7^d >= n.
int fast_fft_size(int n);

}  // namespace colddiff
