// Copyright 2026 The EVCI Augment Authors. All Rights Reserved.
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

#ifndef EVCI_ERROR_HPP_
#define EVCI_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace evci {

// Base of every exception the library throws. `category()` is a short
// machine-readable tag that the CLI prints on failure.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

// Missing or unreadable files, failed writes.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

// Content that cannot be decoded or parsed (images, JSON, checkpoints).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

// Well-formed input that violates a domain rule (bad enum, box out of range).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error("validation", what) {}
};

// Tensor or image dimensions that do not fit an operation.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape", what) {}
};

// Bad argument values (empty input, out-of-range parameters).
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

// Non-finite values during training.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error("numeric", what) {}
};

}  // namespace evci

#endif  // EVCI_ERROR_HPP_
