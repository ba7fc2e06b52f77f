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


#include "howlsim/cli.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "howlsim/acoustic_core.h"
#include "howlsim/baselines.h"
#include "howlsim/dataset.h"
#include "howlsim/error.h"
#include "howlsim/parallel.h"
#include "howlsim/random.h"
#include "howlsim/scene_sim.h"
#include "howlsim/spectral.h"
#include "howlsim/synth.h"
#include "howlsim/wav.h"
#include "json.hpp"

namespace howlsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GenRirArgs {
  double rt60 = 0.0;
  fs::path out;
};

struct SimulateArgs {
  fs::path rirs;
  fs::path out;
  std::string suppressor = "passthrough";
  std::optional<double> loop_gain;
  double seconds = 10.0;
  fs::path speech;
  fs::path far;
  std::string noise = "white";
  SceneConfig cfg;
  std::string nl1 = "identity";
  std::string nl2 = "identity";
};

struct MakeDatasetArgs {
  fs::path spec;
  fs::path out;
  fs::path speech_source;
  std::optional<double> test_snr;
  bool full_scale = false;
  bool overwrite = false;
};

struct EvaluateArgs {
  fs::path manifest;
  fs::path enhanced;
  fs::path report;
  std::string split = "test";
  std::vector<double> buckets = {-10.0, -5.0, 0.0};
  double tolerance = kBucketToleranceDb;
};

struct BaselineRunArgs {
  fs::path manifest;
  fs::path out;
  std::string suppressor = "nlms";
  std::string split = "test";
};

struct FeaturesDumpArgs {
  fs::path manifest;
  fs::path scene_dir;
  fs::path out;
  std::string split;
  std::string layout;
  std::vector<std::string> ids;
};

struct SynthCorpusArgs {
  fs::path out;
  std::size_t count = 20;
  double min_seconds = 3.0;
  double max_seconds = 6.0;
};

class Logger {
 public:
  Logger(std::ostream& err, int verbosity) : err_(err), verbosity_(verbosity) {}
  void Info(const std::string& msg) {
    if (verbosity_ < 1) return;
    std::lock_guard<std::mutex> lock(mu_);
    err_ << msg << '\n';
  }
  void Warn(const std::string& msg) {
    if (verbosity_ < 0) return;
    std::lock_guard<std::mutex> lock(mu_);
    err_ << "warning: " << msg << '\n';
  }

 private:
  std::ostream& err_;
  int verbosity_;
  std::mutex mu_;
};

std::uint64_t RequireSeed(const CliConfig& cli, const char* command) {
  if (!cli.seed) {
    throw ConfigError(std::string(command) + " needs --seed");
  }
  return *cli.seed;
}

std::string ReadText(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw IoError("write failed: " + path.string());
}

Nonlinearity ParseNonlinearity(const std::string& name) {
  Nonlinearity nl;
  nl.kind = NonlinearityKindFromString(name);
  return nl;
}

int GenRir(const GenRirArgs& a, const CliConfig& cli, std::ostream& out) {
  const std::uint64_t seed = RequireSeed(cli, "gen-rir");
  const RirSet set = GenerateRirSet(RandomRoom(seed, a.rt60), seed);
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  WriteRirSet(a.out, set);
  const json j = {{"out", a.out.generic_string()},
                  {"rt60", a.rt60},
                  {"seed", seed},
                  {"paths", set.h.size()},
                  {"length", set.h.front().size()}};
  out << j.dump() << '\n';
  return kExitOk;
}

int Simulate(SimulateArgs a, const CliConfig& cli, std::ostream& out) {
  const std::uint64_t seed = RequireSeed(cli, "simulate");
  const RirSet rirs = ReadRirSet(a.rirs);
  a.cfg.seed = seed;
  a.cfg.nl1 = ParseNonlinearity(a.nl1);
  a.cfg.nl2 = ParseNonlinearity(a.nl2);
  if (!(a.seconds >= 1.0)) throw ConfigError("--seconds must be >= 1");

  const Waveform speech = a.speech.empty()
                              ? SynthUtterance(MixSeed(seed, 1), a.seconds)
                              : ReadMonoWav(a.speech);
  const Waveform far =
      a.far.empty() ? SynthUtterance(MixSeed(seed, 2), a.seconds)
                    : ReadMonoWav(a.far);
  const Waveform noise =
      SynthNoise(NoiseKindFromString(a.noise), speech.size(), MixSeed(seed, 3));

  ScenePlan plan = PrepareScene(speech, far, noise, rirs, a.cfg);
  if (a.loop_gain) SetLoopGain(plan, *a.loop_gain);
  auto suppressor = MakeSuppressor(a.suppressor, plan.teacher);
  const ClosedLoopResult loop = SimulateClosedLoop(plan, *suppressor);
  const GrowthReport growth = AnalyzeGrowth(loop.y1, plan.teacher.y1);

  WriteSceneDir(a.out, plan.teacher, plan.cfg);
  WriteWav(a.out / "closed_y1.wav", loop.y1);
  WriteWav(a.out / "closed_out.wav", loop.out);
  const json j = {{"suppressor", suppressor->name()},
                  {"loop_gain", LoopGain(plan)},
                  {"reached_rail", growth.reached_rail},
                  {"rail_window", growth.rail_window},
                  {"onset_window", growth.onset_window},
                  {"monotone", growth.monotone},
                  {"windows", growth.window_energy.size()},
                  {"window_ms", 100}};
  WriteText(a.out / "growth.json", j.dump(2) + "\n");
  out << j.dump() << '\n';
  return kExitOk;
}

int MakeDatasetCommand(const MakeDatasetArgs& a, const CliConfig& cli,
                       Logger& log, std::ostream& out) {
  const std::string text = ReadText(a.spec);
  DatasetSpec spec = ParseDatasetSpec(text);
  const bool spec_has_seed = json::parse(text).contains("seed");
  if (cli.seed) {
    spec.seed = *cli.seed;
  } else if (!spec_has_seed) {
    throw ConfigError("make-dataset needs --seed or a \"seed\" in the spec");
  }
  if (a.full_scale) {
    const DatasetSpec full = DatasetSpec::FullScale();
    spec.counts = full.counts;
    spec.rir_sets = full.rir_sets;
  }
  if (!a.speech_source.empty()) spec.speech_source = a.speech_source;
  if (a.test_snr) spec.test_snr = *a.test_snr;
  // A relative corpus path in the spec is relative to the spec file.
  if (a.speech_source.empty() && spec.speech_source.is_relative()) {
    spec.speech_source =
        (a.spec.parent_path() / spec.speech_source).lexically_normal();
  }
  spec.Validate();
  const std::size_t threads = ResolveThreads(cli.threads);
  log.Info("rendering " + std::to_string(spec.total()) + " scenes on " +
           std::to_string(threads) + " thread(s)");
  const DatasetManifest m = MakeDataset(spec, a.out, threads, a.overwrite);
  CheckManifestFiles(m);
  const json j = {{"manifest", (a.out / "manifest.jsonl").generic_string()},
                  {"scenes", m.records.size()}};
  out << j.dump() << '\n';
  return kExitOk;
}

int EvaluateCommand(const EvaluateArgs& a, const CliConfig& cli, Logger& log,
                    std::ostream& out) {
  const DatasetManifest m = ReadManifest(a.manifest);
  EvaluateOptions opt;
  opt.bucket_sfrs = a.buckets;
  opt.tolerance_db = a.tolerance;
  opt.split = SplitFromString(a.split);
  opt.threads = ResolveThreads(cli.threads);
  const MetricReport report = Evaluate(m, a.enhanced, opt);
  for (const std::string& id : report.missing) {
    log.Warn("no enhanced file for " + id + "; excluded");
  }
  const std::string table = FormatReportTable(report);
  fs::path text_path = a.report;
  fs::path json_path = fs::path(a.report).replace_extension(".json");
  if (a.report.extension() == ".json") {
    json_path = a.report;
    text_path = fs::path(a.report).replace_extension(".txt");
  }
  WriteText(text_path, table);
  WriteText(json_path, ReportToJson(report));
  out << table;
  return kExitOk;
}

SceneSignals LoadScene(const DatasetManifest& m, const ManifestRecord& r) {
  auto load = [&](const char* name) {
    return ReadMonoWav(m.Resolve(r.wavs.at(name)));
  };
  SceneSignals s;
  s.s1 = load("s1");
  s.y1 = load("y1");
  s.x1 = load("x1");
  s.x = load("x");
  s.x21 = load("x21");
  return s;
}

int BaselineRun(const BaselineRunArgs& a, const CliConfig& cli, Logger& log,
                std::ostream& out) {
  const DatasetManifest m = ReadManifest(a.manifest);
  const Split split = SplitFromString(a.split);
  std::vector<const ManifestRecord*> records;
  for (const ManifestRecord& r : m.records) {
    if (r.draw.split == split) records.push_back(&r);
  }
  fs::create_directories(a.out);
  // Fail on a bad name before any work starts.
  MakeSuppressor(a.suppressor, SceneSignals{});
  ParallelFor(records.size(), ResolveThreads(cli.threads), [&](std::size_t i) {
    const ManifestRecord& r = *records[i];
    const SceneSignals scene = LoadScene(m, r);
    auto suppressor = MakeSuppressor(a.suppressor, scene);
    WriteWav(a.out / (r.draw.id + ".wav"), RunOffline(*suppressor, scene));
    log.Info(r.draw.id);
  });
  const json j = {{"suppressor", a.suppressor},
                  {"scenes", records.size()},
                  {"out", a.out.generic_string()}};
  out << j.dump() << '\n';
  return kExitOk;
}

// Features of one scene directory plus the spectrogram of every layout
// channel and of the s1 target.
void DumpScene(const fs::path& scene_dir, ChannelLayout layout,
               const fs::path& dest) {
  const FrameConfig frame;
  std::vector<std::string> names = ChannelNames(layout);
  std::vector<Spectrogram> channels;
  std::size_t origin_len = 0;
  for (const std::string& name : names) {
    const Waveform w = ReadMonoWav(scene_dir / (name + ".wav"));
    origin_len = w.size();
    channels.push_back(Stft(w, frame));
  }
  fs::create_directories(dest);
  WriteFeatureMatrix(dest / "features.mat", Features(channels), frame,
                     origin_len, FeatureLayoutTag(channels.size()));
  for (std::size_t c = 0; c < names.size(); ++c) {
    WriteSpectrogram(dest / (names[c] + ".spec"), channels[c]);
  }
  WriteSpectrogram(dest / "s1.spec",
                   Stft(ReadMonoWav(scene_dir / "s1.wav"), frame));
}

int FeaturesDump(const FeaturesDumpArgs& a, const CliConfig& cli, Logger& log,
                 std::ostream& out) {
  if (a.manifest.empty() == a.scene_dir.empty()) {
    throw ConfigError("features-dump needs exactly one of --manifest and "
                      "--scene-dir");
  }
  std::optional<ChannelLayout> layout;
  if (!a.layout.empty()) layout = ChannelLayoutFromString(a.layout);

  if (!a.scene_dir.empty()) {
    DumpScene(a.scene_dir, layout.value_or(ChannelLayout::kY1X1), a.out);
    out << json{{"scenes", 1}, {"out", a.out.generic_string()}}.dump()
        << '\n';
    return kExitOk;
  }

  const DatasetManifest m = ReadManifest(a.manifest);
  std::optional<Split> split;
  if (!a.split.empty()) split = SplitFromString(a.split);
  std::vector<const ManifestRecord*> records;
  for (const ManifestRecord& r : m.records) {
    if (split && r.draw.split != *split) continue;
    if (!a.ids.empty() &&
        std::find(a.ids.begin(), a.ids.end(), r.draw.id) == a.ids.end()) {
      continue;
    }
    records.push_back(&r);
  }
  for (const std::string& id : a.ids) {
    const bool found =
        std::any_of(records.begin(), records.end(),
                    [&](const ManifestRecord* r) { return r->draw.id == id; });
    if (!found) throw ConfigError("no scene " + id + " in the manifest");
  }
  ParallelFor(records.size(), ResolveThreads(cli.threads), [&](std::size_t i) {
    const ManifestRecord& r = *records[i];
    DumpScene(m.Resolve(r.dir), layout.value_or(r.layout), a.out / r.draw.id);
    log.Info(r.draw.id);
  });
  out << json{{"scenes", records.size()}, {"out", a.out.generic_string()}}
             .dump()
      << '\n';
  return kExitOk;
}

int SynthCorpus(const SynthCorpusArgs& a, const CliConfig& cli,
                std::ostream& out) {
  const std::uint64_t seed = RequireSeed(cli, "synth-corpus");
  if (!(a.min_seconds >= 1.0 && a.max_seconds >= a.min_seconds)) {
    throw ConfigError("need 1 <= --min-seconds <= --max-seconds");
  }
  fs::create_directories(a.out);
  for (std::size_t i = 0; i < a.count; ++i) {
    Rng rng(MixSeed(seed, i));
    const double seconds = rng.Uniform(a.min_seconds, a.max_seconds);
    char name[32];
    std::snprintf(name, sizeof(name), "utt_%04zu.wav", i);
    WriteWav(a.out / name, SynthUtterance(rng.NextU64(), seconds));
  }
  out << json{{"files", a.count}, {"out", a.out.generic_string()}}.dump()
      << '\n';
  return kExitOk;
}

void ReportError(std::ostream& err, const std::string& kind,
                 const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump()
      << '\n';
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Closed-loop acoustic feedback simulation toolkit", "howlsim"};
  app.require_subcommand(1);
  app.fallthrough();

  CliConfig cli;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for generation");
  auto* threads_opt =
      app.add_option("--threads", threads,
                     "Worker threads (default: $HOWLSIM_THREADS or all cores)")
          ->check(CLI::PositiveNumber);
  int verbose = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "More progress output");
  app.add_flag("-q,--quiet", quiet, "No warnings");

  GenRirArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-rir", "Generate one RIR set");
  gen_cmd->add_option("--rt60", gen.rt60, "Seconds, in [0, 0.6]")->required();
  gen_cmd->add_option("--out", gen.out, "Output .rir file")->required();

  SimulateArgs sim;
  auto* sim_cmd =
      app.add_subcommand("simulate", "Teacher-forced scene and closed loop");
  sim_cmd->add_option("--rirs", sim.rirs, "RIR set from gen-rir")->required();
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();
  sim_cmd->add_option("--suppressor", sim.suppressor)
      ->check(CLI::IsMember({"passthrough", "nlms", "nlms+notch", "oracle"}))
      ->capture_default_str();
  sim_cmd->add_option("--loop-gain", sim.loop_gain,
                      "Rescale h21 to this open-loop magnitude gain");
  sim_cmd->add_option("--seconds", sim.seconds,
                      "Length of the synthetic talker")
      ->capture_default_str();
  sim_cmd->add_option("--speech", sim.speech, "Near-end WAV (16 kHz mono)");
  sim_cmd->add_option("--far", sim.far, "Far-end WAV (16 kHz mono)");
  sim_cmd->add_option("--noise", sim.noise)
      ->check(CLI::IsMember({"white", "pink", "speech_shaped"}))
      ->capture_default_str();
  sim_cmd->add_option("--delay", sim.cfg.delta_t, "Seconds")
      ->capture_default_str();
  sim_cmd->add_option("--sfr", sim.cfg.sfr_db, "dB")->capture_default_str();
  sim_cmd->add_option("--snr", sim.cfg.snr_db, "dB")->capture_default_str();
  sim_cmd->add_option("--g1", sim.cfg.g1)->capture_default_str();
  sim_cmd->add_option("--g2", sim.cfg.g2)->capture_default_str();
  sim_cmd->add_option("--nl1", sim.nl1)->capture_default_str();
  sim_cmd->add_option("--nl2", sim.nl2)->capture_default_str();
  sim_cmd->add_option("--level", sim.cfg.speech_level_dbfs, "Speech dBFS")
      ->capture_default_str();
  sim_cmd->add_option("--highpass", sim.cfg.loudspeaker_highpass_hz,
                      "Loudspeaker high-pass corner, 0 disables")
      ->capture_default_str();
  sim_cmd->add_option("--lowpass", sim.cfg.loudspeaker_lowpass_hz,
                      "Loudspeaker low-pass corner, 0 disables")
      ->capture_default_str();

  MakeDatasetArgs mk;
  auto* mk_cmd = app.add_subcommand("make-dataset", "Render a dataset");
  mk_cmd->add_option("--spec", mk.spec, "JSON dataset spec")->required();
  mk_cmd->add_option("--out", mk.out, "Output directory")->required();
  mk_cmd->add_option("--speech-source", mk.speech_source,
                     "Overrides the spec's speech directory");
  mk_cmd->add_option("--test-snr", mk.test_snr, "Overrides the test SNR");
  mk_cmd->add_flag("--full-scale", mk.full_scale,
                   "10000/300/500 scenes over 10000 RIR sets");
  mk_cmd->add_flag("--overwrite", mk.overwrite,
                   "Replace an existing manifest");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "SFR-bucketed SI-SDR report");
  ev_cmd->add_option("--manifest", ev.manifest)->required();
  ev_cmd->add_option("--enhanced", ev.enhanced, "Directory of <id>.wav")
      ->required();
  ev_cmd->add_option("--report", ev.report,
                     "Text table; the JSON twin goes next to it")
      ->required();
  ev_cmd->add_option("--split", ev.split)->capture_default_str();
  ev_cmd->add_option("--bucket", ev.buckets, "SFR bucket centers (dB)")
      ->capture_default_str();
  ev_cmd->add_option("--tolerance", ev.tolerance, "Bucket half-width (dB)")
      ->capture_default_str();

  BaselineRunArgs br;
  auto* br_cmd =
      app.add_subcommand("baseline-run", "Enhance scenes with a baseline");
  br_cmd->add_option("--manifest", br.manifest)->required();
  br_cmd->add_option("--out", br.out, "Directory for <id>.wav")->required();
  br_cmd->add_option("--suppressor", br.suppressor)
      ->check(CLI::IsMember({"passthrough", "nlms", "nlms+notch", "oracle"}))
      ->capture_default_str();
  br_cmd->add_option("--split", br.split)->capture_default_str();

  FeaturesDumpArgs fd;
  auto* fd_cmd =
      app.add_subcommand("features-dump", "Write features and spectrograms");
  fd_cmd->add_option("--manifest", fd.manifest);
  fd_cmd->add_option("--scene-dir", fd.scene_dir, "One scene directory");
  fd_cmd->add_option("--out", fd.out)->required();
  fd_cmd->add_option("--split", fd.split, "Only this split");
  fd_cmd->add_option("--layout", fd.layout,
                     "Channel layout, default from the manifest");
  fd_cmd->add_option("--id", fd.ids, "Only these scenes");

  SynthCorpusArgs sc;
  auto* sc_cmd = app.add_subcommand("synth-corpus",
                                    "Write synthetic 16 kHz speech files");
  sc_cmd->add_option("--out", sc.out)->required();
  sc_cmd->add_option("--count", sc.count)->capture_default_str();
  sc_cmd->add_option("--min-seconds", sc.min_seconds)->capture_default_str();
  sc_cmd->add_option("--max-seconds", sc.max_seconds)->capture_default_str();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    ReportError(err, "usage", e.what());
    return kExitUsage;
  }

  if (seed_opt->count() > 0) cli.seed = seed;
  if (threads_opt->count() > 0) cli.threads = threads;
  cli.verbosity = quiet ? -1 : verbose;
  Logger log(err, cli.verbosity);

  try {
    if (gen_cmd->parsed()) return GenRir(gen, cli, out);
    if (sim_cmd->parsed()) return Simulate(sim, cli, out);
    if (mk_cmd->parsed()) return MakeDatasetCommand(mk, cli, log, out);
    if (ev_cmd->parsed()) return EvaluateCommand(ev, cli, log, out);
    if (br_cmd->parsed()) return BaselineRun(br, cli, log, out);
    if (fd_cmd->parsed()) return FeaturesDump(fd, cli, log, out);
    if (sc_cmd->parsed()) return SynthCorpus(sc, cli, out);
  } catch (const ConfigError& e) {
    ReportError(err, "config", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    ReportError(err, "io", e.what());
    return kExitFailure;
  } catch (const fs::filesystem_error& e) {
    ReportError(err, "io", e.what());
    return kExitFailure;
  } catch (const Error& e) {
    ReportError(err, "runtime", e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    ReportError(err, "internal", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

int Run(int argc, char** argv) {
  return Run(std::vector<std::string>(argv, argv + argc), std::cout,
             std::cerr);
}

}  // namespace howlsim
