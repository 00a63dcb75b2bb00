// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agp {

// Base of every exception thrown by the core library. The C API maps each
// subclass onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A ConstraintSpec that the generator cannot satisfy, or a malformed spec.
class ConstraintError : public Error {
 public:
  ConstraintError(std::string field, const std::string& what)
      : Error("constraint error in field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Text input that does not parse. line is 1-based, 0 when not applicable;
// position is a 0-based character offset, npos when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::string field,
             std::size_t position = std::string::npos)
      : Error(what), line_(line), field_(std::move(field)), position_(position) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t line_;
  std::string field_;
  std::size_t position_;
};

// Binary file with bad magic, version, checksum or truncated payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class SubstitutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace agp
