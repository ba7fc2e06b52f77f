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


#include "howlsim/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>

#include "howlsim/acoustic_core.h"
#include "howlsim/error.h"
#include "howlsim/objectives.h"
#include "howlsim/parallel.h"
#include "howlsim/random.h"
#include "howlsim/wav.h"
#include "json.hpp"

namespace howlsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kRirStream = 0x524952;     // "RIR"
constexpr std::uint64_t kSceneStream = 0x53434e;   // "SCN"

constexpr const char* kSceneFiles[] = {"s1",    "n1",    "x",     "x21",
                                       "x1",    "d11",   "d21",   "d11_x",
                                       "d11_s", "d21_x", "d21_s", "y1"};

std::string Fnv1a64(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

// Splits n items into consecutive partitions proportional to `counts`.
// Every split with a nonzero count gets at least one item; remaining items
// go by largest remainder, ties to the earlier split.
std::array<std::size_t, 3> PartitionSizes(std::size_t n,
                                          const std::array<std::size_t, 3>& counts,
                                          const std::string& what) {
  std::array<std::size_t, 3> sizes = {0, 0, 0};
  std::size_t nonempty = 0;
  for (std::size_t c : counts) nonempty += c > 0;
  if (nonempty == 0) return sizes;
  if (n < nonempty) {
    throw ConfigError("need at least " + std::to_string(nonempty) + " " +
                      what + " for the nonempty splits, found " +
                      std::to_string(n));
  }
  const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
  const std::size_t spare = n - nonempty;
  std::array<double, 3> remainder = {0, 0, 0};
  std::size_t used = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    if (counts[s] == 0) continue;
    const double share = static_cast<double>(spare) * counts[s] / total;
    const auto whole = static_cast<std::size_t>(std::floor(share));
    sizes[s] = 1 + whole;
    remainder[s] = share - static_cast<double>(whole);
    used += whole;
  }
  for (std::size_t left = spare - used; left > 0; --left) {
    std::size_t best = 3;
    for (std::size_t s = 0; s < 3; ++s) {
      if (counts[s] == 0) continue;
      if (best == 3 || remainder[s] > remainder[best]) best = s;
    }
    ++sizes[best];
    remainder[best] = -1.0;
  }
  return sizes;
}

void CheckRange(const Range& r, double lo, double hi, const char* name) {
  if (!(r.lo >= lo && r.hi <= hi && r.lo <= r.hi)) {
    std::ostringstream ss;
    ss << name << " range must satisfy " << lo << " <= lo <= hi <= " << hi;
    throw ConfigError(ss.str());
  }
}

json RangeJson(const Range& r) { return json::array({r.lo, r.hi}); }

Range RangeFrom(const json& j, const char* name) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number()) {
    throw ConfigError(std::string(name) + " must be [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json NonlinearityJson(const Nonlinearity& nl) {
  return {{"kind", ToString(nl.kind)},
          {"clip_threshold", nl.clip_threshold},
          {"sigmoid_gain", nl.sigmoid_gain}};
}

Nonlinearity NonlinearityFrom(const json& j) {
  Nonlinearity nl;
  nl.kind = NonlinearityKindFromString(j.at("kind").get<std::string>());
  nl.clip_threshold = j.at("clip_threshold").get<double>();
  nl.sigmoid_gain = j.at("sigmoid_gain").get<double>();
  return nl;
}

json ConfigJson(const SceneConfig& c) {
  return {{"delta_t", c.delta_t},
          {"delay_samples", c.DelaySamples()},
          {"devices", c.devices},
          {"g1", c.g1},
          {"g2", c.g2},
          {"nl1", NonlinearityJson(c.nl1)},
          {"nl2", NonlinearityJson(c.nl2)},
          {"sfr_db", c.sfr_db},
          {"snr_db", c.snr_db},
          {"seed", c.seed},
          {"x21_gain_db", c.x21_gain_db},
          {"speech_level_dbfs", c.speech_level_dbfs},
          {"loudspeaker_highpass_hz", c.loudspeaker_highpass_hz},
          {"loudspeaker_lowpass_hz", c.loudspeaker_lowpass_hz}};
}

SceneConfig ConfigFrom(const json& j) {
  SceneConfig c;
  c.devices = j.at("devices").get<int>();
  c.delta_t = j.at("delta_t").get<double>();
  c.g1 = j.at("g1").get<double>();
  c.g2 = j.at("g2").get<double>();
  c.nl1 = NonlinearityFrom(j.at("nl1"));
  c.nl2 = NonlinearityFrom(j.at("nl2"));
  c.sfr_db = j.at("sfr_db").get<double>();
  c.snr_db = j.at("snr_db").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.x21_gain_db = j.at("x21_gain_db").get<double>();
  c.speech_level_dbfs = j.at("speech_level_dbfs").get<double>();
  c.loudspeaker_highpass_hz = j.at("loudspeaker_highpass_hz").get<double>();
  c.loudspeaker_lowpass_hz = j.at("loudspeaker_lowpass_hz").get<double>();
  return c;
}

Nonlinearity DrawSaturation(Rng& rng) {
  return rng.Uniform() < 0.5 ? Nonlinearity::HardClip()
                             : Nonlinearity::Sigmoidal();
}

std::string SceneId(Split split, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%05zu", ToString(split).c_str(), index);
  return buf;
}

}  // namespace

std::string ToString(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split SplitFromString(const std::string& name) {
  for (Split s : kSplits) {
    if (ToString(s) == name) return s;
  }
  throw ConfigError("unknown split: " + name);
}

std::string ToString(ChannelLayout layout) {
  switch (layout) {
    case ChannelLayout::kY1X1:
      return "y1,x1";
    case ChannelLayout::kY1X:
      return "y1,x";
    case ChannelLayout::kY1X21:
      return "y1,x21";
    case ChannelLayout::kY1XX21:
      return "y1,x,x21";
    case ChannelLayout::kY1X21X:
      return "y1,x21,x";
  }
  return "y1,x1";
}

ChannelLayout ChannelLayoutFromString(const std::string& name) {
  for (ChannelLayout l :
       {ChannelLayout::kY1X1, ChannelLayout::kY1X, ChannelLayout::kY1X21,
        ChannelLayout::kY1XX21, ChannelLayout::kY1X21X}) {
    if (ToString(l) == name) return l;
  }
  throw ConfigError("unknown channel layout: " + name);
}

std::vector<std::string> ChannelNames(ChannelLayout layout) {
  std::vector<std::string> names;
  std::stringstream ss(ToString(layout));
  for (std::string part; std::getline(ss, part, ',');) names.push_back(part);
  return names;
}

void DatasetSpec::Validate() const {
  CheckRange(rt60, 0.0, 0.6, "rt60");
  CheckRange(delay, 0.1, 0.3, "delay");
  CheckRange(sfr, -20.0, 5.0, "sfr");
  CheckRange(snr, -10.0, 30.0, "snr");
  if (!(gain_db.lo <= gain_db.hi) || !std::isfinite(gain_db.lo) ||
      !std::isfinite(gain_db.hi)) {
    throw ConfigError("gain_db must be a finite [lo, hi]");
  }
  if (count(Split::kTest) > 0 && test_sfrs.empty()) {
    throw ConfigError("test_sfrs must not be empty");
  }
  for (double s : test_sfrs) {
    if (!(s >= -20.0 && s <= 5.0)) {
      throw ConfigError("test SFRs must lie in [-20, 5]");
    }
  }
  if (!(test_snr >= -10.0 && test_snr <= 30.0)) {
    throw ConfigError("test_snr must lie in [-10, 30]");
  }
  std::size_t nonempty = 0;
  for (std::size_t c : counts) nonempty += c > 0;
  if (rir_sets < nonempty) {
    throw ConfigError("rir_sets must be at least the number of nonempty "
                      "splits");
  }
}

DatasetSpec DatasetSpec::FullScale() {
  DatasetSpec spec;
  spec.counts = {10000, 300, 500};
  spec.rir_sets = 10000;
  return spec;
}

DatasetSpec ParseDatasetSpec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("dataset spec is not valid JSON: ") +
                      e.what());
  }
  if (!j.is_object()) throw ConfigError("dataset spec must be a JSON object");
  static const std::set<std::string> kKeys = {
      "counts", "rir_sets", "rt60",      "delay",    "sfr",
      "snr",    "gain_db",  "test_sfrs", "test_snr", "layout",
      "speech_source", "seed", "full_scale"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw ConfigError("unknown spec key: " + key);
  }
  DatasetSpec spec;
  try {
    if (j.value("full_scale", false)) spec = DatasetSpec::FullScale();
    if (j.contains("counts")) {
      const json& c = j["counts"];
      for (const auto& [key, value] : c.items()) {
        spec.counts[static_cast<std::size_t>(SplitFromString(key))] =
            value.get<std::size_t>();
      }
    }
    if (j.contains("rir_sets")) spec.rir_sets = j["rir_sets"].get<std::size_t>();
    if (j.contains("rt60")) spec.rt60 = RangeFrom(j["rt60"], "rt60");
    if (j.contains("delay")) spec.delay = RangeFrom(j["delay"], "delay");
    if (j.contains("sfr")) spec.sfr = RangeFrom(j["sfr"], "sfr");
    if (j.contains("snr")) spec.snr = RangeFrom(j["snr"], "snr");
    if (j.contains("gain_db")) spec.gain_db = RangeFrom(j["gain_db"], "gain_db");
    if (j.contains("test_sfrs")) {
      spec.test_sfrs = j["test_sfrs"].get<std::vector<double>>();
    }
    if (j.contains("test_snr")) spec.test_snr = j["test_snr"].get<double>();
    if (j.contains("layout")) {
      spec.layout = ChannelLayoutFromString(j["layout"].get<std::string>());
    }
    if (j.contains("speech_source")) {
      spec.speech_source = j["speech_source"].get<std::string>();
    }
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad dataset spec: ") + e.what());
  }
  spec.Validate();
  return spec;
}

std::string DatasetSpecToJson(const DatasetSpec& spec) {
  json j = {{"counts",
             {{"train", spec.counts[0]},
              {"val", spec.counts[1]},
              {"test", spec.counts[2]}}},
            {"rir_sets", spec.rir_sets},
            {"rt60", RangeJson(spec.rt60)},
            {"delay", RangeJson(spec.delay)},
            {"sfr", RangeJson(spec.sfr)},
            {"snr", RangeJson(spec.snr)},
            {"gain_db", RangeJson(spec.gain_db)},
            {"test_sfrs", spec.test_sfrs},
            {"test_snr", spec.test_snr},
            {"layout", ToString(spec.layout)},
            {"speech_source", spec.speech_source.generic_string()},
            {"seed", spec.seed}};
  return j.dump(2) + "\n";
}

std::uint64_t RirSeed(const DatasetSpec& spec, std::size_t index) {
  return MixSeed(MixSeed(spec.seed, kRirStream), index);
}

double RirRt60(const DatasetSpec& spec, std::size_t index) {
  Rng rng(MixSeed(RirSeed(spec, index), 1));
  return rng.Uniform(spec.rt60.lo, spec.rt60.hi);
}

DatasetPlan PlanDataset(const DatasetSpec& spec) {
  spec.Validate();
  DatasetPlan plan;
  plan.spec = spec;
  if (spec.total() == 0) return plan;

  std::error_code ec;
  if (!fs::is_directory(spec.speech_source, ec)) {
    throw IoError("speech source is not a directory: " +
                  spec.speech_source.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry :
       fs::recursive_directory_iterator(spec.speech_source)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<Utterance> pool;
  std::set<std::string> seen;
  for (const fs::path& f : files) {
    Utterance u{fs::relative(f, spec.speech_source).generic_string(),
                Fnv1a64(f)};
    if (seen.insert(u.hash).second) pool.push_back(std::move(u));
  }
  std::sort(pool.begin(), pool.end(),
            [](const Utterance& a, const Utterance& b) {
              return a.hash != b.hash ? a.hash < b.hash : a.name < b.name;
            });

  const auto utt_sizes = PartitionSizes(pool.size(), spec.counts,
                                        "distinct speech files");
  const auto rir_sizes = PartitionSizes(spec.rir_sets, spec.counts,
                                        "RIR sets");
  std::size_t u0 = 0;
  std::size_t r0 = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    plan.utterances[s].assign(pool.begin() + static_cast<std::ptrdiff_t>(u0),
                              pool.begin() +
                                  static_cast<std::ptrdiff_t>(u0 + utt_sizes[s]));
    for (std::size_t r = 0; r < rir_sizes[s]; ++r) {
      plan.rir_indices[s].push_back(r0 + r);
    }
    u0 += utt_sizes[s];
    r0 += rir_sizes[s];
  }

  for (Split split : kSplits) {
    const auto s = static_cast<std::size_t>(split);
    const auto& utts = plan.utterances[s];
    const auto& rirs = plan.rir_indices[s];
    for (std::size_t k = 0; k < spec.counts[s]; ++k) {
      Rng rng(MixSeed(MixSeed(spec.seed, kSceneStream + s), k));
      SceneDraw d;
      d.id = SceneId(split, k);
      d.split = split;
      d.index = k;
      d.rir_index = rirs[rng.Index(rirs.size())];
      d.rir_seed = RirSeed(spec, d.rir_index);
      d.rt60 = RirRt60(spec, d.rir_index);
      const std::size_t near = rng.Index(utts.size());
      std::size_t far = near;
      if (utts.size() > 1) {
        far = rng.Index(utts.size() - 1);
        if (far >= near) ++far;
      }
      d.near = utts[near];
      d.far = utts[far];
      SceneConfig& c = d.cfg;
      c.delta_t = rng.Uniform(spec.delay.lo, spec.delay.hi);
      if (split == Split::kTest) {
        c.sfr_db = spec.test_sfrs[k % spec.test_sfrs.size()];
        c.snr_db = spec.test_snr;
      } else {
        c.sfr_db = rng.Uniform(spec.sfr.lo, spec.sfr.hi);
        c.snr_db = rng.Uniform(spec.snr.lo, spec.snr.hi);
      }
      c.g1 = std::pow(10.0, rng.Uniform(spec.gain_db.lo, spec.gain_db.hi) / 20);
      c.g2 = std::pow(10.0, rng.Uniform(spec.gain_db.lo, spec.gain_db.hi) / 20);
      c.nl1 = DrawSaturation(rng);
      c.nl2 = DrawSaturation(rng);
      d.noise = static_cast<NoiseKind>(rng.Index(3));
      d.noise_seed = rng.NextU64();
      c.seed = rng.NextU64();
      plan.scenes.push_back(std::move(d));
    }
  }
  return plan;
}

std::string ManifestLine(const ManifestRecord& r) {
  const SceneDraw& d = r.draw;
  json wavs = json::object();
  for (const auto& [name, path] : r.wavs) wavs[name] = path.generic_string();
  const json j = {
      {"id", d.id},
      {"split", ToString(d.split)},
      {"index", d.index},
      {"layout", ToString(r.layout)},
      {"channels", ChannelNames(r.layout)},
      {"dir", r.dir.generic_string()},
      {"wavs", wavs},
      {"config", ConfigJson(d.cfg)},
      {"rir", {{"index", d.rir_index}, {"seed", d.rir_seed}, {"rt60", d.rt60}}},
      {"speech",
       {{"near", d.near.name},
        {"near_hash", d.near.hash},
        {"far", d.far.name},
        {"far_hash", d.far.hash}}},
      {"noise", {{"kind", ToString(d.noise)}, {"seed", d.noise_seed}}}};
  return j.dump();
}

ManifestRecord ParseManifestLine(const std::string& line) {
  try {
    const json j = json::parse(line);
    ManifestRecord r;
    SceneDraw& d = r.draw;
    d.id = j.at("id").get<std::string>();
    d.split = SplitFromString(j.at("split").get<std::string>());
    d.index = j.at("index").get<std::size_t>();
    r.layout = ChannelLayoutFromString(j.at("layout").get<std::string>());
    r.dir = j.at("dir").get<std::string>();
    for (const auto& [name, path] : j.at("wavs").items()) {
      r.wavs[name] = path.get<std::string>();
    }
    d.cfg = ConfigFrom(j.at("config"));
    const json& rir = j.at("rir");
    d.rir_index = rir.at("index").get<std::size_t>();
    d.rir_seed = rir.at("seed").get<std::uint64_t>();
    d.rt60 = rir.at("rt60").get<double>();
    const json& sp = j.at("speech");
    d.near = {sp.at("near").get<std::string>(),
              sp.at("near_hash").get<std::string>()};
    d.far = {sp.at("far").get<std::string>(),
             sp.at("far_hash").get<std::string>()};
    d.noise = NoiseKindFromString(j.at("noise").at("kind").get<std::string>());
    d.noise_seed = j.at("noise").at("seed").get<std::uint64_t>();
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad manifest record: ") + e.what());
  }
}

void WriteManifest(const fs::path& path,
                   const std::vector<ManifestRecord>& records) {
  const fs::path tmp = fs::path(path).concat(".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot write " + tmp.string());
    for (const ManifestRecord& r : records) os << ManifestLine(r) << '\n';
    if (!os) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move manifest into place: " + ec.message());
}

DatasetManifest ReadManifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest " + path.string());
  DatasetManifest m;
  m.root = path.parent_path();
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    m.records.push_back(ParseManifestLine(line));
  }
  return m;
}

SceneSignals RenderScene(const DatasetSpec& spec, const SceneDraw& draw) {
  const RirSet rirs =
      GenerateRirSet(RandomRoom(draw.rir_seed, draw.rt60), draw.rir_seed);
  const Waveform near = ReadMonoWav(spec.speech_source / draw.near.name);
  const Waveform far = ReadMonoWav(spec.speech_source / draw.far.name);
  const Waveform noise = SynthNoise(draw.noise, near.size(), draw.noise_seed);
  return MixTeacherForced(near, far, noise, rirs, draw.cfg);
}

DatasetManifest MakeDataset(const DatasetSpec& spec, const fs::path& out,
                            std::size_t threads, bool overwrite) {
  const DatasetPlan plan = PlanDataset(spec);
  const fs::path manifest_path = out / "manifest.jsonl";
  std::error_code ec;
  if (!overwrite && fs::exists(manifest_path, ec)) {
    throw IoError(manifest_path.string() + " exists; records are immutable");
  }
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
  {
    std::ofstream os(out / "spec.json", std::ios::binary);
    os << DatasetSpecToJson(spec);
    if (!os) throw IoError("write failed: " + (out / "spec.json").string());
  }

  DatasetManifest manifest;
  manifest.root = out;
  manifest.records.resize(plan.scenes.size());
  ParallelFor(plan.scenes.size(), threads, [&](std::size_t i) {
    const SceneDraw& d = plan.scenes[i];
    ManifestRecord& r = manifest.records[i];
    r.draw = d;
    r.layout = spec.layout;
    r.dir = fs::path(ToString(d.split)) / d.id;
    for (const char* name : kSceneFiles) {
      r.wavs[name] = r.dir / (std::string(name) + ".wav");
    }
    WriteSceneDir(out / r.dir, RenderScene(spec, d), d.cfg);
  });
  WriteManifest(manifest_path, manifest.records);
  return manifest;
}

void CheckManifestFiles(const DatasetManifest& manifest) {
  for (const ManifestRecord& r : manifest.records) {
    for (const auto& [name, rel] : r.wavs) {
      const fs::path p = manifest.Resolve(rel);
      try {
        ReadMonoWav(p);
      } catch (const Error& e) {
        throw IoError(r.draw.id + "/" + name + ": " + e.what());
      }
    }
  }
}

MetricReport Evaluate(const DatasetManifest& manifest,
                      const fs::path& enhanced_dir,
                      const EvaluateOptions& options) {
  std::vector<double> sorted_buckets = options.bucket_sfrs;
  std::sort(sorted_buckets.begin(), sorted_buckets.end());
  for (std::size_t i = 1; i < sorted_buckets.size(); ++i) {
    if (sorted_buckets[i] - sorted_buckets[i - 1] <= 2 * options.tolerance_db) {
      throw ConfigError("SFR buckets overlap at this tolerance");
    }
  }

  std::vector<const ManifestRecord*> records;
  for (const ManifestRecord& r : manifest.records) {
    if (r.draw.split == options.split) records.push_back(&r);
  }
  std::sort(records.begin(), records.end(),
            [](const ManifestRecord* a, const ManifestRecord* b) {
              return a->draw.id < b->draw.id;
            });

  struct Score {
    bool present = false;
    double unprocessed = 0.0;
    double processed = 0.0;
  };
  std::vector<Score> scores(records.size());
  ParallelFor(records.size(), options.threads, [&](std::size_t i) {
    const ManifestRecord& r = *records[i];
    const fs::path enhanced_path = enhanced_dir / (r.draw.id + ".wav");
    std::error_code ec;
    if (!fs::exists(enhanced_path, ec)) return;
    const Waveform s1 = ReadMonoWav(manifest.Resolve(r.wavs.at("s1")));
    const Waveform y1 = ReadMonoWav(manifest.Resolve(r.wavs.at("y1")));
    const Waveform enhanced = ReadMonoWav(enhanced_path);
    // Enhanced signals may come back a few samples short (frame trimming);
    // score the common prefix.
    const std::size_t n = std::min({s1.size(), y1.size(), enhanced.size()});
    const WaveformView ref(s1.data(), n);
    scores[i].present = true;
    scores[i].unprocessed = SiSdr(WaveformView(y1.data(), n), ref);
    scores[i].processed = SiSdr(WaveformView(enhanced.data(), n), ref);
  });

  MetricReport report;
  for (double b : options.bucket_sfrs) report.buckets.push_back({b, 0, 0, 0});
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!scores[i].present) {
      report.missing.push_back(records[i]->draw.id);
      continue;
    }
    ++report.total;
    BucketResult* bucket = nullptr;
    for (BucketResult& b : report.buckets) {
      if (std::abs(records[i]->draw.cfg.sfr_db - b.sfr_db) <=
          options.tolerance_db) {
        bucket = &b;
      }
    }
    if (!bucket) {
      ++report.unbucketed;
      continue;
    }
    ++bucket->count;
    bucket->unprocessed += scores[i].unprocessed;
    bucket->processed += scores[i].processed;
  }
  for (BucketResult& b : report.buckets) {
    if (b.count > 0) {
      b.unprocessed /= static_cast<double>(b.count);
      b.processed /= static_cast<double>(b.count);
    }
  }
  return report;
}

std::string FormatReportTable(const MetricReport& report) {
  std::ostringstream ss;
  ss << std::fixed;
  auto row = [&](const std::string& label, auto cell) {
    ss << std::left << std::setw(14) << label << std::right;
    for (const BucketResult& b : report.buckets) {
      ss << std::setw(9);
      cell(b);
    }
    ss << '\n';
  };
  row("SFR (dB)", [&](const BucketResult& b) {
    ss << std::setprecision(0) << b.sfr_db;
  });
  row("Scenes", [&](const BucketResult& b) { ss << b.count; });
  auto mean = [&](double v, std::size_t count) {
    if (count == 0) {
      ss << "-";
    } else {
      ss << std::setprecision(2) << v;
    }
  };
  row("Unprocessed", [&](const BucketResult& b) {
    mean(b.unprocessed, b.count);
  });
  row("Processed", [&](const BucketResult& b) {
    mean(b.processed, b.count);
  });
  if (report.unbucketed > 0) {
    ss << report.unbucketed << " scene(s) outside every SFR bucket\n";
  }
  if (!report.missing.empty()) {
    ss << report.missing.size() << " scene(s) without enhanced output:";
    for (const std::string& id : report.missing) ss << ' ' << id;
    ss << '\n';
  }
  return ss.str();
}

std::string ReportToJson(const MetricReport& report) {
  json buckets = json::array();
  for (const BucketResult& b : report.buckets) {
    json jb = {{"sfr_db", b.sfr_db}, {"count", b.count}};
    jb["unprocessed_si_sdr"] = b.count ? json(b.unprocessed) : json(nullptr);
    jb["processed_si_sdr"] = b.count ? json(b.processed) : json(nullptr);
    buckets.push_back(jb);
  }
  const json j = {{"buckets", buckets},
                  {"total", report.total},
                  {"unbucketed", report.unbucketed},
                  {"missing", report.missing}};
  return j.dump(2) + "\n";
}

}  // namespace howlsim
