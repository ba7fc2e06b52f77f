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


#include "howlsim/acoustic_core.h"

#include <gtest/gtest.h>

#include <cmath>

#include "howlsim/error.h"
#include "test_util.h"

namespace howlsim {
namespace {

using testing::DirectConvolve;
using testing::GaussianNoise;
using testing::MaxAbsDiff;

RoomSpec FixedRoom(double rt60) {
  RoomSpec room;
  room.dimensions = {8.0, 6.0, 3.0};
  room.source_positions = {{4.43, 1.0, 1.5}, {5.0, 4.0, 1.2}, {2.0, 3.0, 1.6}};
  room.mic_positions = {{1.0, 1.0, 1.5}, {5.2, 4.1, 1.2}};
  room.rt60 = rt60;
  room.max_rir_length = 16000;
  return room;
}

TEST(RirTest, AnechoicPathsHaveOneTapAtTheDirectDelay) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const RirSet set = GenerateRirSet(RandomRoom(seed, 0.0), seed);
    ASSERT_EQ(set.h.size(), 6u);
    for (int e = 0; e < kNumEmitters; ++e) {
      for (int r = 0; r < kNumReceivers; ++r) {
        const Waveform& h = set.Path(e, r);
        std::size_t nonzero = 0;
        for (double v : h) nonzero += v != 0.0;
        EXPECT_EQ(nonzero, 1u);
        EXPECT_NE(h[set.DirectDelay(e, r)], 0.0);
      }
    }
    EXPECT_DOUBLE_EQ(set.Path(kLoudspeaker1, kMic1)
                         [set.DirectDelay(kLoudspeaker1, kMic1)],
                     1.0);
  }
}

TEST(RirTest, DirectPathOnsetFollowsDistance) {
  // 3.43 m at 343 m/s and 16 kHz is 160 samples.
  const RirSet set = GenerateRirSet(FixedRoom(0.3), 9);
  EXPECT_EQ(set.DirectDelay(kLoudspeaker1, kMic1), 160u);
  const Waveform& h = set.Path(kLoudspeaker1, kMic1);
  for (std::size_t i = 0; i < 160; ++i) ASSERT_EQ(h[i], 0.0) << i;
  EXPECT_DOUBLE_EQ(h[160], 1.0);
}

TEST(RirTest, MeasuredRt60MatchesRequest) {
  for (double rt60 : {0.3, 0.5}) {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      const RirSet set = GenerateRirSet(RandomRoom(seed, rt60), seed);
      const double measured = MeasureRt60(set.Path(kTalker, kMic1));
      EXPECT_NEAR(measured, rt60, 0.2 * rt60) << "seed " << seed;
    }
  }
}

TEST(RirTest, BitDeterministic) {
  const RoomSpec room = RandomRoom(5, 0.4);
  const RirSet a = GenerateRirSet(room, 5);
  const RirSet b = GenerateRirSet(room, 5);
  ASSERT_EQ(a.h.size(), b.h.size());
  for (std::size_t i = 0; i < a.h.size(); ++i) EXPECT_EQ(a.h[i], b.h[i]);
}

TEST(RirTest, TailIsCutBelowMinus60Db) {
  const RirSet set = GenerateRirSet(RandomRoom(21, 0.4), 21);
  const Waveform& h = set.Path(kLoudspeaker1, kMic1);
  double tail = 0.0;
  for (std::size_t i = h.size() - 160; i < h.size(); ++i) {
    tail = std::max(tail, std::abs(h[i]));
  }
  EXPECT_LT(tail, 1e-3);
}

TEST(RirTest, RejectsBadRooms) {
  RoomSpec room = FixedRoom(0.3);
  room.source_positions[0].x = 9.0;
  EXPECT_THROW(GenerateRirSet(room, 1), ConfigError);
  room = FixedRoom(0.3);
  room.mic_positions[1].z = -0.1;
  EXPECT_THROW(GenerateRirSet(room, 1), ConfigError);
  room = FixedRoom(0.7);
  EXPECT_THROW(GenerateRirSet(room, 1), ConfigError);
  room = FixedRoom(0.3);
  room.sample_rate = 8000;
  EXPECT_THROW(GenerateRirSet(room, 1), ConfigError);
  room = FixedRoom(0.3);
  room.dimensions.y = 0.0;
  EXPECT_THROW(GenerateRirSet(room, 1), ConfigError);
}

TEST(RirTest, EyringCoefficientIsBelowOne) {
  const RoomSpec room = FixedRoom(0.6);
  const double beta = EyringReflectionCoefficient(room);
  EXPECT_GT(beta, 0.0);
  EXPECT_LT(beta, 1.0);
  EXPECT_LT(ReflectionCoefficient(room), 1.0);
}

TEST(RirTest, FileRoundTrip) {
  testing::TempDir dir("rir");
  const RirSet set = GenerateRirSet(RandomRoom(4, 0.2), 4);
  WriteRirSet(dir / "a.rir", set);
  const RirSet back = ReadRirSet(dir / "a.rir");
  EXPECT_EQ(back.seed, set.seed);
  EXPECT_DOUBLE_EQ(back.room.rt60, set.room.rt60);
  EXPECT_DOUBLE_EQ(back.room.dimensions.x, set.room.dimensions.x);
  ASSERT_EQ(back.h.size(), set.h.size());
  for (std::size_t p = 0; p < set.h.size(); ++p) {
    ASSERT_EQ(back.h[p].size(), set.h[p].size());
    for (std::size_t i = 0; i < set.h[p].size(); ++i) {
      ASSERT_EQ(back.h[p][i], static_cast<double>(static_cast<float>(
                                  set.h[p][i])));
    }
  }
  EXPECT_THROW(ReadRirSet(dir / "missing.rir"), IoError);
}

TEST(NonlinearityTest, Examples) {
  EXPECT_DOUBLE_EQ(ApplyNonlinearity(Waveform{0.3}, Nonlinearity::Identity(),
                                     1.0)[0],
                   0.3);
  EXPECT_DOUBLE_EQ(
      ApplyNonlinearity(Waveform{0.4}, Nonlinearity::HardClip(0.5), 2.0)[0],
      0.5);
  EXPECT_DOUBLE_EQ(
      ApplyNonlinearity(Waveform{-0.4}, Nonlinearity::HardClip(0.5), 2.0)[0],
      -0.5);
}

TEST(NonlinearityTest, SigmoidAddsHarmonics) {
  const Waveform x = testing::Sine(16000, 500.0, 0.3);
  const Nonlinearity nl = Nonlinearity::Sigmoidal(2.0);
  const Waveform y = ApplyNonlinearity(x, nl, 1.0);
  const double fundamental = testing::ToneAmplitude(y, 500.0);
  double harmonics = 0.0;
  for (int k = 2; k <= 9; ++k) {
    const double a = testing::ToneAmplitude(y, 500.0 * k);
    harmonics += a * a;
  }
  const double thd = std::sqrt(harmonics) / fundamental;
  EXPECT_GT(thd, 1e-3);
  // The identity adds none.
  const Waveform z = ApplyNonlinearity(x, Nonlinearity::Identity(), 1.0);
  EXPECT_LT(testing::ToneAmplitude(z, 1500.0), 1e-12);
}

TEST(NonlinearityTest, Invariants) {
  const Waveform x = GaussianNoise(4000, 3, 2.0);
  const Nonlinearity clip = Nonlinearity::HardClip(0.8);
  const Nonlinearity sig = Nonlinearity::Sigmoidal(3.0);
  const Waveform once = ApplyNonlinearity(x, clip, 1.0);
  EXPECT_EQ(ApplyNonlinearity(once, clip, 1.0), once);
  for (double v : once) EXPECT_LE(std::abs(v), 0.8);
  for (double v : ApplyNonlinearity(x, sig, 5.0)) EXPECT_LE(std::abs(v), 1.0);
  EXPECT_EQ(ApplyNonlinearity(x, Nonlinearity::Identity(), 1.0), x);
  EXPECT_DOUBLE_EQ(Nonlinearity::Identity().SmallSignalSlope(), 1.0);
  EXPECT_DOUBLE_EQ(clip.SmallSignalSlope(), 1.0);
  EXPECT_DOUBLE_EQ(sig.SmallSignalSlope(), 1.5);  // a / 2
}

TEST(NonlinearityTest, Names) {
  for (auto kind : {Nonlinearity::Kind::kIdentity, Nonlinearity::Kind::kHardClip,
                    Nonlinearity::Kind::kSigmoidal}) {
    EXPECT_EQ(NonlinearityKindFromString(ToString(kind)), kind);
  }
  EXPECT_THROW(NonlinearityKindFromString("tanh"), ConfigError);
}

TEST(ConvolveTest, Impulses) {
  const Waveform x = GaussianNoise(300, 1);
  Waveform delta(20, 0.0);
  delta[0] = 1.0;
  EXPECT_EQ(Convolve(x, delta), x);
  Waveform ximp(100, 0.0);
  ximp[0] = 1.0;
  const Waveform h = GaussianNoise(64, 2);
  const Waveform y = Convolve(ximp, h);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_DOUBLE_EQ(y[i], h[i]);
  for (std::size_t i = 64; i < 100; ++i) EXPECT_EQ(y[i], 0.0);
  // Truncated when h is longer than x.
  EXPECT_EQ(Convolve(Waveform{1.0, 0.0}, h), (Waveform{h[0], h[1]}));
}

TEST(ConvolveTest, MatchesDirectSum) {
  const Waveform x = GaussianNoise(256, 5);
  const Waveform h = GaussianNoise(64, 6);
  EXPECT_LT(MaxAbsDiff(Convolve(x, h), DirectConvolve(x, h)), 1e-10);
  // Long enough to take the FFT path.
  const Waveform xl = GaussianNoise(6000, 7);
  const Waveform hl = GaussianNoise(2500, 8);
  const Waveform ref = DirectConvolve(xl, hl);
  EXPECT_LT(MaxAbsDiff(Convolve(xl, hl), ref) / testing::MaxAbs(ref), 1e-10);
}

TEST(ConvolveTest, Linear) {
  const Waveform x = GaussianNoise(3000, 9);
  const Waveform z = GaussianNoise(3000, 10);
  const Waveform h = GaussianNoise(900, 11);
  const double a = 0.7;
  const double b = -2.3;
  Waveform mix(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mix[i] = a * x[i] + b * z[i];
  const Waveform lhs = Convolve(mix, h);
  const Waveform cx = Convolve(x, h);
  const Waveform cz = Convolve(z, h);
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    ASSERT_NEAR(lhs[i], a * cx[i] + b * cz[i], 1e-9);
  }
}

TEST(ConvolveTest, EmptyInputThrows) {
  EXPECT_THROW(Convolve(Waveform{}, Waveform{1.0}), DegenerateInputError);
  EXPECT_THROW(Convolve(Waveform{1.0}, Waveform{}), DegenerateInputError);
}

TEST(MeasureRt60Test, SingleImpulseIsZero) {
  Waveform h(1000, 0.0);
  h[37] = 0.5;
  EXPECT_EQ(MeasureRt60(h), 0.0);
}

TEST(MeasureRt60Test, ExponentialDecay) {
  const double rt60 = 0.4;
  Waveform h = GaussianNoise(16000, 12);
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] *= std::exp(-static_cast<double>(i) / kSampleRate * 6.91 / rt60);
  }
  EXPECT_NEAR(MeasureRt60(h), rt60, 0.1 * rt60);
}

TEST(MeasureRt60Test, Errors) {
  EXPECT_THROW(MeasureRt60(Waveform(100, 0.0)), DegenerateInputError);
  // Three equal taps: the decay curve ends at -4.8 dB.
  EXPECT_THROW(MeasureRt60(Waveform{1.0, 1.0, 1.0}), UnmeasurableError);
  // Decays in ~2 ms: fit segment shorter than 10 ms.
  Waveform fast = GaussianNoise(800, 14);
  for (std::size_t i = 0; i < fast.size(); ++i) {
    fast[i] *= std::exp(-static_cast<double>(i) / kSampleRate * 6.91 / 0.005);
  }
  EXPECT_THROW(MeasureRt60(fast), UnmeasurableError);
}

TEST(BandLimitTest, HighPass) {
  const Waveform dc(16000, 1.0);
  const Waveform y = HighPass(dc, 100.0);
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_LT(std::abs(y.back()), 1e-6);
  const Waveform tone = testing::Sine(16000, 1000.0);
  EXPECT_NEAR(testing::ToneAmplitude(HighPass(tone, 100.0), 1000.0), 1.0, 0.05);
  // At least 15 dB down two octaves below the corner.
  EXPECT_LT(testing::ToneAmplitude(HighPass(testing::Sine(16000, 20.0), 100.0),
                                   20.0),
            std::pow(10.0, -15.0 / 20.0));
  EXPECT_THROW(HighPass(dc, 0.0), ConfigError);
  EXPECT_THROW(HighPass(dc, 8000.0), ConfigError);
}

TEST(BandLimitTest, LowPass) {
  const Waveform dc(4000, 1.0);
  EXPECT_NEAR(LowPass(dc, 7000.0).back(), 1.0, 1e-9);
  const std::size_t n = 16000;
  EXPECT_NEAR(testing::ToneAmplitude(LowPass(testing::Sine(n, 7000.0), 7000.0),
                                     7000.0),
              std::sqrt(0.5), 0.02);
  EXPECT_NEAR(testing::ToneAmplitude(LowPass(testing::Sine(n, 1000.0), 7000.0),
                                     1000.0),
              1.0, 0.01);
  Waveform nyquist(n);
  for (std::size_t i = 0; i < n; ++i) nyquist[i] = i % 2 ? -1.0 : 1.0;
  const Waveform y = LowPass(nyquist, 7000.0);
  EXPECT_LT(std::abs(y.back()), 1e-6);
  EXPECT_THROW(LowPass(dc, -1.0), ConfigError);
}

}  // namespace
}  // namespace howlsim
