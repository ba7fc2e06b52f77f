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

#ifndef HOWLSIM_ERROR_H_
#define HOWLSIM_ERROR_H_

#include <stdexcept>
#include <string>

namespace howlsim {

// Root of every exception thrown by the library. Callers that only need to
// report failures can catch this; the subclasses exist so tests and the CLI
// can tell configuration mistakes from bad data and from I/O problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters out of their documented range, inconsistent geometry, etc.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Inputs that are well-formed but carry no usable signal (all-zero speech,
// zero-energy reference).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Shapes or frame geometries that do not line up.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// A collaborator (e.g. a suppressor callback) broke its declared contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

// A decay curve without a usable -5..-35 dB segment.
class UnmeasurableError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace howlsim

#endif  // HOWLSIM_ERROR_H_
