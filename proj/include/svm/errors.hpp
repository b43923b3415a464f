// Copyright 2026 The svm-euler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace svm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a field invariant (reality, zero mean, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// An operation was called with arguments outside its contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Time step could not be completed (e.g. midpoint iteration diverged).
class StepError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// An ensemble or ladder experiment could not produce a result (too many
/// failed members, failed reference run).
class ExperimentError : public Error {
 public:
  using Error::Error;
};

/// A diagnostic identity that must hold exactly was violated.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace svm
