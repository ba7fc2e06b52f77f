// Copyright 2026 The Howlsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HOWLSIM_FFT_H_
#define HOWLSIM_FFT_H_

#include <complex>
#include <cstddef>
#include <span>

namespace howlsim {

// Real-input FFT of a fixed size backed by FFTW. Forward produces the
// n/2+1 non-negative frequency bins, unnormalized. Inverse takes those bins
// and returns n samples scaled by 1/n, so Inverse(Forward(x)) == x.
//
// Plan creation is serialized internally; an instance itself must not be
// used from two threads at once.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // in.size() == size(), out.size() == bins().
  void Forward(std::span<const double> in, std::span<std::complex<double>> out);
  // in.size() == bins(), out.size() == size().
  void Inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  std::size_t n_;
  double* real_ = nullptr;
  void* spec_ = nullptr;  // fftw_complex*
  void* forward_ = nullptr;
  void* inverse_ = nullptr;
};

// Smallest power of two >= n.
std::size_t NextPow2(std::size_t n);

}  // namespace howlsim

#endif  // HOWLSIM_FFT_H_
