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


#ifndef HOWLSIM_PARTITIONED_CONVOLVER_H_
#define HOWLSIM_PARTITIONED_CONVOLVER_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "howlsim/fft.h"
#include "howlsim/types.h"

namespace howlsim {

// Streaming linear convolution with a fixed filter, uniformly partitioned
// overlap-save. Each Process call consumes one block of input and returns
// the matching block of output, so y = x * h block by block with no
// algorithmic latency.
class PartitionedConvolver {
 public:
  PartitionedConvolver(WaveformView h, std::size_t block);

  std::size_t block() const { return block_; }

  // in.size() == out.size() == block().
  void Process(std::span<const double> in, std::span<double> out);

 private:
  using Spectrum = std::vector<std::complex<double>>;

  std::size_t block_;
  std::unique_ptr<RealFft> fft_;
  std::vector<Spectrum> filter_;   // one spectrum per partition
  std::vector<Spectrum> history_;  // input spectra, ring indexed by head_
  std::size_t head_ = 0;
  std::vector<double> window_;     // previous block followed by current block
  Spectrum acc_;
  std::vector<double> scratch_;
};

}  // namespace howlsim

#endif  // HOWLSIM_PARTITIONED_CONVOLVER_H_
