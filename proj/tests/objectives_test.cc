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


#include "howlsim/objectives.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "howlsim/error.h"
#include "howlsim/spectral.h"
#include "test_util.h"

namespace howlsim {
namespace {

using testing::GaussianNoise;

TEST(SiSdrTest, OrthogonalErrorIsZeroDb) {
  const Waveform s = {1, 1, 1, 1};
  const Waveform est = {2, 0, 2, 0};
  EXPECT_EQ(SiSdr(est, s), 0.0);
}

TEST(SiSdrTest, CapsAtIdentity) {
  const Waveform s = GaussianNoise(1000, 1);
  EXPECT_EQ(SiSdr(s, s), kDefaultSiSdrCapDb);
  Waveform twice = s;
  for (double& v : twice) v *= 2.0;
  EXPECT_EQ(SiSdr(twice, s), kDefaultSiSdrCapDb);
  EXPECT_EQ(SiSdr(Waveform(1000, 0.0), s), -kDefaultSiSdrCapDb);
  EXPECT_EQ(SiSdr(s, s, 40.0), 40.0);
}

TEST(SiSdrTest, HandComputedValue) {
  // est = r + e with <e, r> = 0 and |e|^2 = |r|^2 / 10: 10 dB.
  const Waveform r = {1, 0, 1, 0};
  const double k = std::sqrt(0.2 / 2.0);
  const Waveform est = {1, k, 1, -k};
  EXPECT_NEAR(SiSdr(est, r), 10.0, 1e-12);
}

TEST(SiSdrTest, ScaleInvariance) {
  const Waveform ref = GaussianNoise(2000, 2);
  Waveform est = GaussianNoise(2000, 3);
  for (std::size_t i = 0; i < est.size(); ++i) est[i] += ref[i];
  const double base = SiSdr(est, ref);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    double alpha = std::exp(rng.Uniform(-5.0, 5.0));
    if (rng.Uniform() < 0.5) alpha = -alpha;
    Waveform scaled = est;
    for (double& v : scaled) v *= alpha;
    EXPECT_NEAR(SiSdr(scaled, ref), base, 1e-9) << alpha;
  }
}

TEST(SiSdrTest, PermutationInvariance) {
  const Waveform ref = GaussianNoise(500, 5);
  Waveform est = GaussianNoise(500, 6);
  for (std::size_t i = 0; i < est.size(); ++i) est[i] += 0.5 * ref[i];
  std::vector<std::size_t> perm(500);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(7);
  for (std::size_t i = perm.size() - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.Index(i + 1)]);
  }
  Waveform pr(500), pe(500);
  for (std::size_t i = 0; i < 500; ++i) {
    pr[i] = ref[perm[i]];
    pe[i] = est[perm[i]];
  }
  EXPECT_NEAR(SiSdr(pe, pr), SiSdr(est, ref), 1e-9);
}

TEST(SiSdrTest, Errors) {
  EXPECT_THROW(SiSdr(Waveform(4, 1.0), Waveform(4, 0.0)), DegenerateInputError);
  EXPECT_THROW(SiSdr(Waveform(4, 1.0), Waveform(5, 1.0)), GeometryError);
}

TEST(CorrLossTest, BoundaryValues) {
  const Waveform target = GaussianNoise(16000, 8);
  const Waveform playback = GaussianNoise(16000, 9);
  EXPECT_EQ(CorrLoss(target, target, playback), 0.0);

  Waveform est = target;
  for (std::size_t i = 0; i < est.size(); ++i) est[i] += playback[i];
  const double first = 1.0 - AbsCorrelation(est, target);
  EXPECT_NEAR(CorrLoss(est, target, playback) - first, 1.0, 1e-12);
}

TEST(CorrLossTest, OrthogonalNoiseLeavesSecondTermSmall) {
  const std::size_t n = 160000;
  const Waveform target = GaussianNoise(n, 10);
  const Waveform playback = GaussianNoise(n, 11);
  const Waveform noise = GaussianNoise(n, 12);
  Waveform est = target;
  for (std::size_t i = 0; i < n; ++i) est[i] += 0.5 * noise[i];
  const double second =
      CorrLoss(est, target, playback) - (1.0 - AbsCorrelation(est, target));
  EXPECT_LT(second, 0.05);
}

TEST(CorrLossTest, RangeAndErrors) {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const Waveform a = GaussianNoise(300, rng.NextU64());
    const Waveform b = GaussianNoise(300, rng.NextU64());
    const Waveform c = GaussianNoise(300, rng.NextU64());
    const double v = CorrLoss(a, b, c);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 2.0);
  }
  const Waveform x = GaussianNoise(100, 14);
  EXPECT_THROW(CorrLoss(x, Waveform(100, 0.0), x), DegenerateInputError);
  EXPECT_THROW(CorrLoss(x, x, Waveform(100, 0.0)), DegenerateInputError);
  EXPECT_EQ(AbsCorrelation(Waveform(100, 0.0), x), 0.0);
  EXPECT_EQ(AbsCorrelation(Waveform(100, 3.0), x), 0.0);
}

TEST(AbsCorrelationTest, MeanRemovedAndSignless) {
  const Waveform x = GaussianNoise(1000, 15);
  Waveform y = x;
  for (double& v : y) v = -3.0 * v + 7.0;
  EXPECT_NEAR(AbsCorrelation(x, y), 1.0, 1e-12);
}

struct Pair {
  Waveform est;
  Waveform ref;
  Spectrogram est_spec;
  Spectrogram ref_spec;
};

Pair RandomPair(std::uint64_t seed) {
  Pair p;
  p.ref = GaussianNoise(4000, seed);
  p.est = GaussianNoise(4000, seed + 1, 0.3);
  for (std::size_t i = 0; i < p.est.size(); ++i) p.est[i] += p.ref[i];
  p.est_spec = Stft(p.est);
  p.ref_spec = Stft(p.ref);
  return p;
}

TEST(LossTest, Loss1Examples) {
  const Pair p = RandomPair(16);
  const LossConfig cfg;
  EXPECT_EQ(Loss1(p.ref, p.ref, p.ref_spec, p.ref_spec, cfg),
            -kDefaultSiSdrCapDb);

  const Waveform zero(p.ref.size(), 0.0);
  const Spectrogram zero_spec = Stft(zero);
  double mean_mag = 0.0;
  for (const Complex& v : p.ref_spec.data()) mean_mag += std::abs(v);
  mean_mag /= static_cast<double>(p.ref_spec.data().size());
  const double l = Loss1(zero, p.ref, zero_spec, p.ref_spec, cfg);
  EXPECT_NEAR(l, kDefaultSiSdrCapDb + cfg.lambda * mean_mag, 1e-9);
  EXPECT_GT(l, 0.0);

  double mae = 0.0;
  for (std::size_t i = 0; i < p.ref_spec.data().size(); ++i) {
    mae += std::abs(std::abs(p.est_spec.data()[i]) -
                    std::abs(p.ref_spec.data()[i]));
  }
  mae /= static_cast<double>(p.ref_spec.data().size());
  EXPECT_NEAR(MagnitudeMae(p.est_spec, p.ref_spec), mae, 1e-12);
  EXPECT_NEAR(Loss1(p.est, p.ref, p.est_spec, p.ref_spec, cfg),
              -SiSdr(p.est, p.ref) + cfg.lambda * mae, 1e-9);
}

TEST(LossTest, Loss2Examples) {
  const Pair p = RandomPair(18);
  const Waveform playback = GaussianNoise(4000, 20);
  LossConfig cfg;
  const double l1 = Loss1(p.est, p.ref, p.est_spec, p.ref_spec, cfg);
  EXPECT_NEAR(Loss2(p.est, p.ref, p.est_spec, p.ref_spec, playback, cfg),
              l1 + 10.0 * CorrLoss(p.est, p.ref, playback), 1e-9);
  cfg.beta = 0.0;
  EXPECT_EQ(Loss2(p.est, p.ref, p.est_spec, p.ref_spec, playback, cfg), l1);
  cfg.beta = 10.0;
  EXPECT_EQ(Loss2(p.ref, p.ref, p.ref_spec, p.ref_spec, playback, cfg),
            -kDefaultSiSdrCapDb);
}

TEST(LossTest, ConfigValidation) {
  LossConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.lambda = -1.0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = {};
  cfg.si_sdr_cap_db = 0.0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  const Spectrogram a = Stft(GaussianNoise(2000, 21));
  const Spectrogram b = Stft(GaussianNoise(3000, 22));
  EXPECT_THROW(MagnitudeMae(a, b), GeometryError);
}

TEST(PlaybackSelectorTest, FourVariantsGiveDistinctLosses) {
  const std::size_t n = 8000;
  const Waveform d21 = GaussianNoise(n, 23);
  const Waveform d21_s = GaussianNoise(n, 24);
  const Waveform d11 = GaussianNoise(n, 25);
  const Waveform d11_s = GaussianNoise(n, 26);
  const Waveform target = GaussianNoise(n, 27);
  Waveform est = target;
  for (std::size_t i = 0; i < n; ++i) {
    est[i] += 0.4 * d21[i] + 0.3 * d21_s[i] + 0.2 * d11[i] + 0.1 * d11_s[i];
  }
  std::set<double> values;
  for (auto sel : {PlaybackSelector::kD21, PlaybackSelector::kD21S,
                   PlaybackSelector::kD21PlusD11,
                   PlaybackSelector::kD21SPlusD11S}) {
    EXPECT_EQ(PlaybackSelectorFromString(ToString(sel)), sel);
    values.insert(
        CorrLoss(est, target, SelectPlayback(sel, d21, d21_s, d11, d11_s)));
  }
  EXPECT_EQ(values.size(), 4u);
  const Waveform sum =
      SelectPlayback(PlaybackSelector::kD21PlusD11, d21, d21_s, d11, d11_s);
  EXPECT_DOUBLE_EQ(sum[10], d21[10] + d11[10]);
  EXPECT_THROW(PlaybackSelectorFromString("d12"), ConfigError);
}

}  // namespace
}  // namespace howlsim
