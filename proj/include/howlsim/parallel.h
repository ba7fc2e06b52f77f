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


// Worker-count resolution and a minimal parallel loop. Results must not
// depend on the thread count, so callers write into preallocated slots and
// reduce in index order afterwards.

#ifndef HOWLSIM_PARALLEL_H_
#define HOWLSIM_PARALLEL_H_

#include <cstddef>
#include <functional>
#include <optional>

namespace howlsim {

inline constexpr const char* kThreadsEnv = "HOWLSIM_THREADS";

// Explicit request first, then HOWLSIM_THREADS, then the number of logical
// cores (at least 1). Throws ConfigError for a zero or unparsable value.
std::size_t ResolveThreads(std::optional<std::size_t> requested = {});

// Calls fn(i) for every i in [0, n) on up to `threads` workers. If any call
// throws, remaining indices are skipped and the exception of the lowest
// failing index is rethrown.
void ParallelFor(std::size_t n, std::size_t threads,
                 const std::function<void(std::size_t)>& fn);

}  // namespace howlsim

#endif  // HOWLSIM_PARALLEL_H_
