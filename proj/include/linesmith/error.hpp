// Copyright 2026 The Linesmith Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linesmith {

// Base of every error the library raises on purpose. Callers that need to
// map failures onto exit codes or HTTP statuses switch on the subclass.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input record. `record` is 1-based; 0 means "not record-specific".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t record = 0)
      : Error(record == 0 ? what : "record " + std::to_string(record) + ": " + what),
        record_(record) {}
  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MalformedRow : public Error {
 public:
  MalformedRow(const std::string& what, std::size_t row)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class UnresolvableWord : public Error {
 public:
  using Error::Error;
};

class NoNucleus : public Error {
 public:
  using Error::Error;
};

class UnknownWord : public Error {
 public:
  using Error::Error;
};

class InsufficientRhymes : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidRequest : public Error {
 public:
  using Error::Error;
};

// An ending word and force-rhyme were both requested.
class ConstraintConflict : public InvalidRequest {
 public:
  using InvalidRequest::InvalidRequest;
};

class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class MalformedResponse : public Error {
 public:
  using Error::Error;
};

class UnknownSession : public Error {
 public:
  using Error::Error;
};

}  // namespace linesmith
