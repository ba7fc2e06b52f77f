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


#include "howlsim/scene_sim.h"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "howlsim/baselines.h"
#include "howlsim/error.h"
#include "howlsim/synth.h"
#include "howlsim/wav.h"
#include "test_util.h"

namespace howlsim {
namespace {

using testing::DirectConvolve;
using testing::GaussianNoise;
using testing::MaxAbsDiff;

// Geometry of a random room with hand-written paths.
RirSet HandRirs(const std::array<Waveform, 6>& paths) {
  RirSet set;
  set.room = RandomRoom(1, 0.0);
  set.seed = 1;
  std::size_t len = 0;
  for (const Waveform& h : paths) len = std::max(len, h.size());
  for (const Waveform& h : paths) {
    Waveform p = h;
    p.resize(len, 0.0);
    set.h.push_back(p);
  }
  return set;
}

RirSet ThreeTapRirs() {
  std::array<Waveform, 6> p;
  p[kLoudspeaker1 * 2 + kMic1] = {0.0, 0.9, 0.0, -0.3, 0.1};
  p[kLoudspeaker1 * 2 + kMic2] = {0.0, 0.0, 0.2};
  p[kLoudspeaker2 * 2 + kMic1] = {0.0, 0.0, 0.5, 0.25, 0.0, -0.1};
  p[kLoudspeaker2 * 2 + kMic2] = {1.0};
  p[kTalker * 2 + kMic1] = {0.0, 1.0, 0.4, 0.2};
  p[kTalker * 2 + kMic2] = {0.0, 0.0, 0.0, 0.6, 0.3, 0.1};
  return HandRirs(p);
}

SceneConfig LinearConfig() {
  SceneConfig cfg;
  cfg.delta_t = 0.1;
  cfg.g1 = 0.8;
  cfg.g2 = 1.3;
  cfg.sfr_db = -5.0;
  cfg.snr_db = 20.0;
  cfg.loudspeaker_highpass_hz = 0.0;
  cfg.loudspeaker_lowpass_hz = 0.0;
  return cfg;
}

double EnergyOf(WaveformView x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

TEST(ScaleTest, Examples) {
  const Waveform a = GaussianNoise(4000, 1);
  EXPECT_DOUBLE_EQ(ScaleToSfr(a, a, 0.0), 1.0);
  Waveform loud = a;
  for (double& v : loud) v *= 10.0;
  EXPECT_NEAR(ScaleToSfr(a, loud, 0.0), 0.1, 1e-12);

  const Waveform fb = GaussianNoise(4000, 2, 0.3);
  const double k = ScaleToSfr(a, fb, -20.0);
  Waveform scaled = fb;
  for (double& v : scaled) v *= k;
  EXPECT_NEAR(10.0 * std::log10(EnergyOf(a) / EnergyOf(scaled)), -20.0, 0.01);
  EXPECT_NEAR(ScaleToSnr(a, fb, 10.0), ScaleToSfr(a, fb, 10.0), 0.0);
  EXPECT_THROW(ScaleToSfr(a, Waveform(4000, 0.0), 0.0), DegenerateInputError);
  EXPECT_THROW(ScaleToSnr(Waveform(10, 0.0), a, 0.0), DegenerateInputError);
}

TEST(MixTest, FeedbackOffGivesCleanSpeech) {
  std::array<Waveform, 6> p;
  p[kLoudspeaker1 * 2 + kMic1] = {0.0, 0.0};
  p[kLoudspeaker1 * 2 + kMic2] = {1.0};
  p[kLoudspeaker2 * 2 + kMic1] = {0.0, 0.5};
  p[kLoudspeaker2 * 2 + kMic2] = {1.0};
  p[kTalker * 2 + kMic1] = {1.0, 0.3};
  p[kTalker * 2 + kMic2] = {0.5};
  SceneConfig cfg;
  cfg.g2 = 0.0;
  const Waveform speech = SynthUtterance(3, 2.0);
  const SceneSignals s = MixTeacherForced(
      speech, SynthUtterance(4, 2.0), Waveform(speech.size(), 0.0),
      HandRirs(p), cfg);
  EXPECT_EQ(s.y1, s.s1);
  for (double v : s.n1) EXPECT_EQ(v, 0.0);
}

// Scene assembled by direct loops from the definitions.
TEST(MixTest, MatchesBruteForceComposition) {
  const RirSet rirs = ThreeTapRirs();
  const SceneConfig cfg = LinearConfig();
  const std::size_t n = 24000;
  const Waveform speech = SynthUtterance(5, 1.5);
  const Waveform far = SynthUtterance(6, 1.5);
  const Waveform noise = GaussianNoise(n, 7);
  const SceneSignals s = MixTeacherForced(speech, far, noise, rirs, cfg);

  const std::size_t d = 1600;
  const double level = std::pow(10.0, cfg.speech_level_dbfs / 20.0);
  Waveform s1 = DirectConvolve(speech, rirs.Path(kTalker, kMic1));
  Waveform s2 = DirectConvolve(speech, rirs.Path(kTalker, kMic2));
  const double k = level / std::sqrt(EnergyOf(s1) / n);
  for (double& v : s1) v *= k;
  for (double& v : s2) v *= k;
  Waveform x = far;
  const double kx = level / std::sqrt(EnergyOf(x) / n);
  for (double& v : x) v *= kx;
  Waveform x21(n, 0.0), x1(n), u1(n), u2(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (t >= d) x21[t] = std::pow(10.0, -6.0 / 20.0) * s2[t - d];
    x1[t] = x[t] + x21[t];
    u1[t] = cfg.g1 * x1[t];
    u2[t] = cfg.g2 * ((t >= d ? s1[t - d] : 0.0) + x[t]);
  }
  Waveform d11 = DirectConvolve(u1, rirs.Path(kLoudspeaker1, kMic1));
  Waveform d21 = DirectConvolve(u2, rirs.Path(kLoudspeaker2, kMic1));
  double efb = 0.0;
  for (std::size_t t = 0; t < n; ++t) efb += std::pow(d11[t] + d21[t], 2);
  const double kf = std::sqrt(EnergyOf(s1) / efb * std::pow(10.0, 0.5));
  Waveform y1(n);
  double esig = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    d11[t] *= kf;
    d21[t] *= kf;
    esig += std::pow(s1[t] + d11[t] + d21[t], 2);
  }
  const double kn = std::sqrt(esig / EnergyOf(noise) * std::pow(10.0, -2.0));
  for (std::size_t t = 0; t < n; ++t) {
    y1[t] = s1[t] + kn * noise[t] + d11[t] + d21[t];
  }

  EXPECT_LT(MaxAbsDiff(s.s1, s1), 1e-10);
  EXPECT_LT(MaxAbsDiff(s.x21, x21), 1e-10);
  EXPECT_LT(MaxAbsDiff(s.d11, d11), 1e-10);
  EXPECT_LT(MaxAbsDiff(s.d21, d21), 1e-10);
  EXPECT_LT(MaxAbsDiff(s.y1, y1), 1e-10);
}

class RoomScene : public ::testing::Test {
 protected:
  static SceneConfig Config(std::uint64_t seed) {
    Rng rng(seed);
    SceneConfig cfg;
    cfg.delta_t = rng.Uniform(0.1, 0.3);
    cfg.sfr_db = rng.Uniform(-20.0, 5.0);
    cfg.snr_db = rng.Uniform(-10.0, 30.0);
    cfg.g1 = rng.Uniform(0.5, 4.0);
    cfg.g2 = rng.Uniform(0.5, 4.0);
    cfg.nl1 = Nonlinearity::Sigmoidal(2.0);
    cfg.nl2 = Nonlinearity::HardClip(0.8);
    cfg.seed = seed;
    return cfg;
  }
  static ScenePlan Plan(std::uint64_t seed, const SceneConfig& cfg,
                        double seconds = 2.0) {
    const RirSet rirs =
        GenerateRirSet(RandomRoom(seed, 0.1 + 0.05 * (seed % 8)), seed);
    const Waveform speech = SynthUtterance(MixSeed(seed, 1), seconds);
    const Waveform far = SynthUtterance(MixSeed(seed, 2), seconds);
    const Waveform noise =
        SynthNoise(NoiseKind::kPink, speech.size(), MixSeed(seed, 3));
    return PrepareScene(speech, far, noise, rirs, cfg);
  }
};

TEST_F(RoomScene, SfrIsMetOnEmittedLabels) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SceneConfig cfg = Config(seed);
    cfg.sfr_db = 0.0;
    const SceneSignals s = Plan(seed, cfg).teacher;
    Waveform fb(s.size());
    for (std::size_t t = 0; t < fb.size(); ++t) fb[t] = s.d11[t] + s.d21[t];
    EXPECT_NEAR(10.0 * std::log10(EnergyOf(s.s1) / EnergyOf(fb)), 0.0, 0.01);
  }
}

TEST_F(RoomScene, SnrIsMetOnEmittedLabels) {
  const SceneConfig cfg = Config(4);
  const SceneSignals s = Plan(4, cfg).teacher;
  Waveform sig(s.size());
  for (std::size_t t = 0; t < sig.size(); ++t) {
    sig[t] = s.s1[t] + s.d11[t] + s.d21[t];
  }
  EXPECT_NEAR(10.0 * std::log10(EnergyOf(sig) / EnergyOf(s.n1)), cfg.snr_db,
              0.01);
}

TEST_F(RoomScene, LabelInvariants) {
  for (std::uint64_t seed : {5u, 6u}) {
    const SceneSignals s = Plan(seed, Config(seed)).teacher;
    for (const Waveform* w : {&s.s1, &s.n1, &s.x, &s.x21, &s.x1, &s.d11,
                              &s.d21, &s.d11_x, &s.d11_s, &s.d21_x, &s.d21_s}) {
      ASSERT_EQ(w->size(), s.size());
    }
    for (std::size_t t = 0; t < s.size(); ++t) {
      ASSERT_EQ(s.x1[t], s.x[t] + s.x21[t]);
      ASSERT_NEAR(s.y1[t] - (s.s1[t] + s.n1[t] + s.d11[t] + s.d21[t]), 0.0,
                  1e-9);
    }
  }
}

TEST_F(RoomScene, LinearDecompositionIsExact) {
  SceneConfig cfg = Config(7);
  cfg.nl1 = Nonlinearity::Identity();
  cfg.nl2 = Nonlinearity::Identity();
  const SceneSignals s = Plan(7, cfg).teacher;
  for (std::size_t t = 0; t < s.size(); ++t) {
    ASSERT_NEAR(s.d21[t], s.d21_x[t] + s.d21_s[t], 1e-9);
    ASSERT_NEAR(s.d11[t], s.d11_x[t] + s.d11_s[t], 1e-9);
  }
}

TEST_F(RoomScene, Deterministic) {
  const SceneSignals a = Plan(8, Config(8)).teacher;
  const SceneSignals b = Plan(8, Config(8)).teacher;
  EXPECT_EQ(a.y1, b.y1);
  EXPECT_EQ(a.d21_s, b.d21_s);
  EXPECT_EQ(a.n1, b.n1);
}

TEST_F(RoomScene, ZeroGainsLeaveSpeechPlusNoise) {
  SceneConfig cfg = Config(9);
  cfg.g1 = 0.0;
  cfg.g2 = 0.0;
  const ScenePlan plan = Plan(9, cfg);
  const SceneSignals& s = plan.teacher;
  for (std::size_t t = 0; t < s.size(); ++t) {
    ASSERT_EQ(s.y1[t], s.s1[t] + s.n1[t]);
  }
  OracleSuppressor oracle(s.s1);
  const ClosedLoopResult loop = SimulateClosedLoop(plan, oracle);
  for (std::size_t t = 0; t < s.size(); ++t) {
    ASSERT_NEAR(loop.y1[t], s.s1[t] + s.n1[t], 1e-12);
  }
}

TEST_F(RoomScene, OracleClosedLoopReproducesTeacher) {
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    const ScenePlan plan = Plan(seed, Config(seed));
    OracleSuppressor oracle(plan.teacher.s1);
    const ClosedLoopResult loop = SimulateClosedLoop(plan, oracle);
    EXPECT_LT(MaxAbsDiff(loop.y1, plan.teacher.y1), 1e-9) << seed;
    EXPECT_EQ(loop.out, plan.teacher.s1);
  }
}

TEST_F(RoomScene, LoopGainCanBeSet) {
  ScenePlan plan = Plan(13, Config(13));
  SetLoopGain(plan, 0.7);
  EXPECT_NEAR(LoopGain(plan), 0.7, 1e-9);
  const SceneSignals& s = plan.teacher;
  for (std::size_t t = 0; t < s.size(); ++t) {
    ASSERT_NEAR(s.y1[t] - (s.s1[t] + s.n1[t] + s.d11[t] + s.d21[t]), 0.0,
                1e-12);
  }
  // The teacher and the loop still agree after rescaling.
  OracleSuppressor oracle(s.s1);
  EXPECT_LT(MaxAbsDiff(SimulateClosedLoop(plan, oracle).y1, s.y1), 1e-9);
  EXPECT_THROW(SetLoopGain(plan, -1.0), ConfigError);
}

TEST_F(RoomScene, PassThroughBehaviourFollowsLoopGain) {
  SceneConfig cfg = Config(14);
  cfg.nl1 = Nonlinearity::Identity();
  cfg.nl2 = Nonlinearity::Identity();
  cfg.snr_db = 30.0;
  cfg.sfr_db = 0.0;
  cfg.speech_level_dbfs = -30.0;

  ScenePlan quiet = Plan(14, cfg, 10.0);
  SetLoopGain(quiet, 0.45);
  PassThroughSuppressor pass;
  const Waveform yq = SimulateClosedLoop(quiet, pass).y1;
  const auto first = WaveformView(yq).subspan(0, kSampleRate);
  const auto last = WaveformView(yq).last(kSampleRate);
  EXPECT_LT(Rms(last), 2.0 * Rms(first));
  EXPECT_LT(testing::MaxAbs(yq), 1.0);

  ScenePlan loud = Plan(14, cfg, 20.0);
  SetLoopGain(loud, 1.2);
  PassThroughSuppressor pass2;
  const Waveform yl = SimulateClosedLoop(loud, pass2).y1;
  const GrowthReport g = AnalyzeGrowth(yl, loud.teacher.y1);
  EXPECT_TRUE(g.reached_rail);
  EXPECT_LE(testing::MaxAbs(yl), 1.0);
}

class WrongFrame : public FrameSuppressor {
 public:
  std::size_t frame_size() const override { return 128; }
  std::string name() const override { return "wrong"; }
  void Process(const FrameContext&, std::span<double>) override {}
};

TEST_F(RoomScene, FrameSizeMismatchIsAContractError) {
  const ScenePlan plan = Plan(15, Config(15));
  WrongFrame wrong;
  EXPECT_THROW(SimulateClosedLoop(plan, wrong), ContractError);
}

TEST(SceneConfigTest, Validation) {
  SceneConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  auto bad = [&](auto mutate) {
    SceneConfig c;
    mutate(c);
    EXPECT_THROW(c.Validate(), ConfigError);
  };
  bad([](SceneConfig& c) { c.delta_t = 0.05; });
  bad([](SceneConfig& c) { c.delta_t = 0.31; });
  bad([](SceneConfig& c) { c.sfr_db = 5.5; });
  bad([](SceneConfig& c) { c.snr_db = -11.0; });
  bad([](SceneConfig& c) { c.g1 = -1.0; });
  bad([](SceneConfig& c) { c.g2 = std::nan(""); });
  bad([](SceneConfig& c) { c.devices = 3; });
  bad([](SceneConfig& c) { c.loudspeaker_lowpass_hz = 8000.0; });
  EXPECT_EQ(cfg.DelaySamples(), 3200u);
}

TEST(MixTest, InputErrors) {
  const RirSet rirs = ThreeTapRirs();
  const SceneConfig cfg = LinearConfig();
  const Waveform far = SynthUtterance(1, 2.0);
  EXPECT_THROW(MixTeacherForced(SynthUtterance(2, 0.5), far, {}, rirs, cfg),
               ConfigError);
  EXPECT_THROW(MixTeacherForced(Waveform(20000, 0.0), far, {}, rirs, cfg),
               DegenerateInputError);
  RirSet partial = rirs;
  partial.h.pop_back();
  EXPECT_THROW(MixTeacherForced(SynthUtterance(2, 2.0), far, {}, partial, cfg),
               ConfigError);
}

TEST(GrowthTest, SyntheticSignals) {
  const std::size_t n = 5 * kSampleRate;
  const Waveform excitation = testing::Sine(n, 1000.0, 0.001);
  Waveform grow(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double a = 0.001 * std::exp(2.0 * static_cast<double>(t) /
                                      kSampleRate);
    grow[t] = std::clamp(a * std::sin(2.0 * std::numbers::pi * 1000.0 *
                                      static_cast<double>(t) / kSampleRate),
                         -1.0, 1.0);
  }
  const GrowthReport g = AnalyzeGrowth(grow, excitation);
  EXPECT_TRUE(g.reached_rail);
  EXPECT_TRUE(g.monotone);
  EXPECT_LT(g.onset_window, g.rail_window);
  EXPECT_EQ(g.window_energy.size(), 50u);

  const GrowthReport flat = AnalyzeGrowth(excitation, excitation);
  EXPECT_FALSE(flat.reached_rail);
  EXPECT_FALSE(flat.monotone);
}

TEST(SceneDirTest, WritesAllSignals) {
  testing::TempDir dir("scene");
  SceneConfig cfg = LinearConfig();
  const SceneSignals s = MixTeacherForced(
      SynthUtterance(1, 1.2), SynthUtterance(2, 1.2),
      GaussianNoise(19200, 3), ThreeTapRirs(), cfg);
  WriteSceneDir(dir / "s", s, cfg);
  for (const char* name : {"s1", "n1", "x", "x21", "x1", "d11", "d21", "d11_x",
                           "d11_s", "d21_x", "d21_s", "y1"}) {
    const Waveform w = ReadMonoWav(dir / "s" / (std::string(name) + ".wav"));
    EXPECT_EQ(w.size(), s.size()) << name;
  }
  const Waveform y = ReadMonoWav(dir / "s" / "y1.wav");
  for (std::size_t t = 0; t < y.size(); ++t) {
    ASSERT_EQ(y[t], static_cast<double>(static_cast<float>(s.y1[t])));
  }
  std::ifstream sidecar(dir / "s" / "scene.txt");
  std::stringstream text;
  text << sidecar.rdbuf();
  EXPECT_EQ(text.str(), SceneSidecar(cfg));
  EXPECT_NE(text.str().find("delay_samples 1600"), std::string::npos);
}

}  // namespace
}  // namespace howlsim
