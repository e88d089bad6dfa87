// Copyright 2026 The Epiwatch Authors.
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
#ifndef EPIWATCH_ERROR_H_
#define EPIWATCH_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace epiwatch {

// Base class for data errors. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration (usage-level problems).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DumpParseError : public Error {
 public:
  DumpParseError(size_t line_no, const std::string& what)
      : Error("dump line " + std::to_string(line_no) + ": " + what),
        line_no_(line_no) {}
  size_t line_no() const { return line_no_; }

 private:
  size_t line_no_;
};

class UnknownSchemaError : public Error {
 public:
  explicit UnknownSchemaError(const std::string& schema)
      : Error("unknown dump schema '" + schema + "'") {}
};

class FormatError : public Error {
 public:
  FormatError(size_t line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what),
        line_no_(line_no) {}
  size_t line_no() const { return line_no_; }

 private:
  size_t line_no_;
};

// Position is a token index, or a file line number when raised by a reader.
class InvalidBilouError : public Error {
 public:
  InvalidBilouError(size_t position, const std::string& what)
      : Error("invalid BILOU sequence at " + std::to_string(position) + ": " +
              what),
        position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

class OverlappingSpansError : public Error {
 public:
  using Error::Error;
};

class SpanOutOfBoundsError : public Error {
 public:
  using Error::Error;
};

class EmptyResultError : public Error {
 public:
  using Error::Error;
};

class EmptyTrainingSetError : public Error {
 public:
  using Error::Error;
};

class EmptyVocabularyError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

class NoAssignedDocumentsError : public Error {
 public:
  using Error::Error;
};

// Collects non-fatal notices (skipped lines, orphan comments, skipped months).
class Diagnostics {
 public:
  void note(std::string message) { messages_.push_back(std::move(message)); }
  const std::vector<std::string>& messages() const { return messages_; }
  bool empty() const { return messages_.empty(); }

 private:
  std::vector<std::string> messages_;
};

}  // namespace epiwatch

#endif  // EPIWATCH_ERROR_H_
