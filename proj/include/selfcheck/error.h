// Copyright 2026 The selfcheck Authors. All Rights Reserved.
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

namespace selfcheck {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed or incompatible model/profile/tensor container.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A metric is undefined on its input (e.g. zero variance).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Heatmap carries no positive activation to localize.
class NoPrimarySource : public Error {
 public:
  using Error::Error;
};

class RecoveryImpossible : public Error {
 public:
  using Error::Error;
};

class MissingProfile : public Error {
 public:
  using Error::Error;
};

class FingerprintMismatch : public FormatError {
 public:
  using FormatError::FormatError;
};

class NonFinite : public Error {
 public:
  NonFinite(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace selfcheck
