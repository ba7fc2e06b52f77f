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


#include "howlsim/partitioned_convolver.h"

#include <algorithm>

#include "howlsim/error.h"

namespace howlsim {

PartitionedConvolver::PartitionedConvolver(WaveformView h, std::size_t block)
    : block_(block),
      fft_(std::make_unique<RealFft>(2 * block)),
      window_(2 * block, 0.0),
      acc_(block + 1),
      scratch_(2 * block) {
  if (block == 0 || h.empty()) {
    throw DegenerateInputError("PartitionedConvolver: empty filter or block");
  }
  const std::size_t parts = (h.size() + block - 1) / block;
  std::vector<double> buf(2 * block);
  filter_.reserve(parts);
  for (std::size_t p = 0; p < parts; ++p) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::size_t begin = p * block;
    const std::size_t end = std::min(h.size(), begin + block);
    std::copy(h.begin() + begin, h.begin() + end, buf.begin());
    Spectrum s(block + 1);
    fft_->Forward(buf, s);
    filter_.push_back(std::move(s));
  }
  history_.assign(parts, Spectrum(block + 1));
}

void PartitionedConvolver::Process(std::span<const double> in,
                                   std::span<double> out) {
  if (in.size() != block_ || out.size() != block_) {
    throw ContractError("PartitionedConvolver: block size mismatch");
  }
  std::copy(window_.begin() + block_, window_.end(), window_.begin());
  std::copy(in.begin(), in.end(), window_.begin() + block_);
  head_ = (head_ + history_.size() - 1) % history_.size();
  fft_->Forward(window_, history_[head_]);

  std::fill(acc_.begin(), acc_.end(), std::complex<double>{});
  for (std::size_t p = 0; p < filter_.size(); ++p) {
    const Spectrum& x = history_[(head_ + p) % history_.size()];
    const Spectrum& h = filter_[p];
    for (std::size_t k = 0; k < acc_.size(); ++k) acc_[k] += h[k] * x[k];
  }
  fft_->Inverse(acc_, scratch_);
  std::copy(scratch_.begin() + block_, scratch_.end(), out.begin());
}

}  // namespace howlsim
