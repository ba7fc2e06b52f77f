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


// Dataset generation at configurable scale and the SFR-bucketed evaluation
// protocol.
//
// Layout of a generated dataset directory:
//
//   manifest.jsonl          one JSON object per scene, keys sorted
//   spec.json               the DatasetSpec that produced it
//   <split>/<id>/*.wav      the twelve scene signals (see WriteSceneDir)
//   <split>/<id>/scene.txt  configuration sidecar
//
// Manifest record fields:
//
//   id        "<split>_<index, 5 digits>"
//   split     "train" | "val" | "test"
//   layout    channel layout name, e.g. "y1,x1"
//   channels  layout as a list of signal names, microphone first
//   dir       scene directory relative to the manifest
//   wavs      signal name -> WAV path relative to the manifest
//   config    SceneConfig values (delta_t, delay_samples, g1, g2, sfr_db,
//             snr_db, seed, x21_gain_db, speech_level_dbfs,
//             loudspeaker_highpass_hz, loudspeaker_lowpass_hz) with nl1 and
//             nl2 as {kind, clip_threshold, sigmoid_gain}
//   rir       {index, seed, rt60}
//   speech    {near, near_hash, far, far_hash}; file names relative to the
//             speech source, hashes are FNV-1a 64 of the file bytes
//   noise     {kind, seed}

#ifndef HOWLSIM_DATASET_H_
#define HOWLSIM_DATASET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "howlsim/scene_sim.h"
#include "howlsim/synth.h"

namespace howlsim {

enum class Split { kTrain = 0, kVal = 1, kTest = 2 };
inline constexpr std::array<Split, 3> kSplits = {Split::kTrain, Split::kVal,
                                                 Split::kTest};
std::string ToString(Split split);
Split SplitFromString(const std::string& name);

enum class ChannelLayout { kY1X1, kY1X, kY1X21, kY1XX21, kY1X21X };
// "y1,x1", "y1,x", "y1,x21", "y1,x,x21", "y1,x21,x".
std::string ToString(ChannelLayout layout);
ChannelLayout ChannelLayoutFromString(const std::string& name);
std::vector<std::string> ChannelNames(ChannelLayout layout);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

struct DatasetSpec {
  std::array<std::size_t, 3> counts = {200, 20, 50};  // train, val, test
  std::size_t rir_sets = 60;
  Range rt60 = {0.0, 0.6};
  Range delay = {0.1, 0.3};
  Range sfr = {-20.0, 5.0};
  Range snr = {-10.0, 30.0};
  // Amplifier gains G1, G2 drawn uniformly in dB. With speech at
  // speech_level_dbfs the upper end drives the nonlinearities into
  // saturation.
  Range gain_db = {0.0, 36.0};
  // Test scenes cycle through these SFRs at a fixed SNR.
  std::vector<double> test_sfrs = {-10.0, -5.0, 0.0};
  double test_snr = 30.0;
  ChannelLayout layout = ChannelLayout::kY1X1;
  std::filesystem::path speech_source;
  std::uint64_t seed = 0;

  std::size_t count(Split s) const {
    return counts[static_cast<std::size_t>(s)];
  }
  std::size_t total() const { return counts[0] + counts[1] + counts[2]; }

  // Throws ConfigError when a range leaves the physical bounds (rt60 in
  // [0, 0.6], delay in [0.1, 0.3], SFR in [-20, 5], SNR in [-10, 30]), is
  // inverted, or fewer RIR sets than nonempty splits are requested.
  void Validate() const;

  // Full scale: 10000/300/500 scenes and 10000 RIR sets.
  static DatasetSpec FullScale();
};

// JSON form. Every field is optional on input and falls back to the
// defaults above; unknown keys are rejected.
DatasetSpec ParseDatasetSpec(const std::string& json_text);
std::string DatasetSpecToJson(const DatasetSpec& spec);

// One speech file of the source directory.
struct Utterance {
  std::string name;  // path relative to the source directory
  std::string hash;  // FNV-1a 64 of the file bytes, 16 hex digits
};

// Everything drawn for one scene before any audio is touched.
struct SceneDraw {
  std::string id;
  Split split = Split::kTrain;
  std::size_t index = 0;  // within the split
  std::size_t rir_index = 0;
  std::uint64_t rir_seed = 0;
  double rt60 = 0.0;
  Utterance near;
  Utterance far;
  NoiseKind noise = NoiseKind::kWhite;
  std::uint64_t noise_seed = 0;
  SceneConfig cfg;
};

struct DatasetPlan {
  DatasetSpec spec;
  // Per split: utterances and RIR set indices assigned to it. The three
  // partitions are disjoint.
  std::array<std::vector<Utterance>, 3> utterances;
  std::array<std::vector<std::size_t>, 3> rir_indices;
  std::vector<SceneDraw> scenes;  // train, then val, then test
};

// Lists *.wav under speech_source (recursively), drops files with
// duplicate content, orders the rest by hash and cuts the ordering into
// split partitions proportional to the scene counts. RIR set indices are
// partitioned the same way. Throws ConfigError when a nonempty split would
// get no utterance, IoError when the directory is unreadable.
DatasetPlan PlanDataset(const DatasetSpec& spec);

// RIR seed and RT60 of RIR set `index`, a pure function of the spec seed.
std::uint64_t RirSeed(const DatasetSpec& spec, std::size_t index);
double RirRt60(const DatasetSpec& spec, std::size_t index);

struct ManifestRecord {
  SceneDraw draw;
  ChannelLayout layout = ChannelLayout::kY1X1;
  std::filesystem::path dir;  // relative to the manifest
  std::map<std::string, std::filesystem::path> wavs;
};

struct DatasetManifest {
  std::filesystem::path root;  // directory holding manifest.jsonl
  std::vector<ManifestRecord> records;

  std::filesystem::path Resolve(const std::filesystem::path& rel) const {
    return root / rel;
  }
};

std::string ManifestLine(const ManifestRecord& record);
ManifestRecord ParseManifestLine(const std::string& line);
void WriteManifest(const std::filesystem::path& path,
                   const std::vector<ManifestRecord>& records);
DatasetManifest ReadManifest(const std::filesystem::path& path);

// Renders one planned scene: regenerates its RIR set, reads both
// utterances, draws the noise and runs MixTeacherForced. The near-end
// utterance sets the scene length and must be at least 1 s long.
SceneSignals RenderScene(const DatasetSpec& spec, const SceneDraw& draw);

// Plans and writes the whole dataset under `out`. Refuses to touch an
// existing manifest.jsonl unless `overwrite`. Scenes are rendered on up to
// `threads` workers; output does not depend on the thread count.
DatasetManifest MakeDataset(const DatasetSpec& spec,
                            const std::filesystem::path& out,
                            std::size_t threads, bool overwrite = false);

// Throws IoError naming the first referenced file that is missing or not
// 16 kHz mono.
void CheckManifestFiles(const DatasetManifest& manifest);

// ---------------------------------------------------------------------------
// Evaluation.

inline constexpr double kBucketToleranceDb = 0.5;

struct BucketResult {
  double sfr_db = 0.0;
  std::size_t count = 0;
  double unprocessed = 0.0;  // mean SI-SDR of y1 vs s1, dB
  double processed = 0.0;    // mean SI-SDR of the enhanced signal vs s1
};

struct MetricReport {
  std::vector<BucketResult> buckets;
  std::size_t total = 0;       // scenes evaluated
  std::size_t unbucketed = 0;  // evaluated scenes outside every bucket
  std::vector<std::string> missing;  // ids without an enhanced file, sorted
};

struct EvaluateOptions {
  std::vector<double> bucket_sfrs = {-10.0, -5.0, 0.0};
  double tolerance_db = kBucketToleranceDb;
  Split split = Split::kTest;
  std::size_t threads = 1;
};

// Scores <enhanced_dir>/<id>.wav against s1 for every record of the chosen
// split. A missing enhanced file is listed in `missing` and the scene left
// out of every column. Means are reduced in id order, so shuffling the
// manifest does not change the report.
MetricReport Evaluate(const DatasetManifest& manifest,
                      const std::filesystem::path& enhanced_dir,
                      const EvaluateOptions& options = {});

// Aligned text table with one column per SFR bucket.
std::string FormatReportTable(const MetricReport& report);
std::string ReportToJson(const MetricReport& report);

}  // namespace howlsim

#endif  // HOWLSIM_DATASET_H_
