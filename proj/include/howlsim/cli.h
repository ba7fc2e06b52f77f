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


// Command-line front end. Subcommands:
//
//   gen-rir        one RIR set for a random room at a given RT60
//   simulate       teacher-forced scene plus a closed-loop run
//   make-dataset   scenes, WAVs and manifest from a JSON spec
//   evaluate       SFR-bucketed SI-SDR report for enhanced files
//   baseline-run   enhanced files from a classical suppressor
//   features-dump  network input features and spectrograms
//   synth-corpus   synthetic speech directory for smoke-scale datasets
//
// Errors go to stderr as one JSON object. Exit status is 0 on success, 2
// for usage and configuration errors and 1 for everything else.

#ifndef HOWLSIM_CLI_H_
#define HOWLSIM_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace howlsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CliConfig {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  int verbosity = 0;
};

// args[0] is the program name.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);
int Run(int argc, char** argv);

}  // namespace howlsim

#endif  // HOWLSIM_CLI_H_
