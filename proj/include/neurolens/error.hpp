#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace neurolens {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad magic bytes or unsupported version.
class FormatError : public Error {
public:
  using Error::Error;
};

// Header and payload disagree (truncation, overflow, trailing bytes).
class CorruptFileError : public Error {
public:
  using Error::Error;
};

// Non-finite or otherwise unusable values.
class DataError : public Error {
public:
  using Error::Error;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

class ParameterError : public Error {
public:
  using Error::Error;
};

class InsufficientDataError : public Error {
public:
  using Error::Error;
};

class AlignmentError : public Error {
public:
  using Error::Error;
};

class OracleLimitError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

// A single input of a batch could not be processed.
class ItemError : public Error {
public:
  ItemError(std::size_t index, const std::string &what)
      : Error("item " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

// Network-level failure; retryable.
class TransportError : public Error {
public:
  explicit TransportError(const std::string &what, int status = 0)
      : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

private:
  int status_;
};

// The service answered, but not in the agreed shape.
class ProtocolError : public Error {
public:
  ProtocolError(const std::string &what, std::string raw_body)
      : Error(what), raw_body_(std::move(raw_body)) {}
  const std::string &raw_body() const noexcept { return raw_body_; }

private:
  std::string raw_body_;
};

class PartialResultError : public Error {
public:
  PartialResultError(const std::string &what, std::vector<std::size_t> failed_slots)
      : Error(what), failed_slots_(std::move(failed_slots)) {}
  const std::vector<std::size_t> &failed_slots() const noexcept { return failed_slots_; }

private:
  std::vector<std::size_t> failed_slots_;
};

// A stage was asked to run before its inputs were produced.
class MissingArtifactError : public Error {
public:
  MissingArtifactError(const std::string &path, const std::string &producing_stage)
      : Error("missing intermediate " + path + " (produced by stage '" + producing_stage +
              "')"),
        producing_stage_(producing_stage) {}
  const std::string &producing_stage() const noexcept { return producing_stage_; }

private:
  std::string producing_stage_;
};

} // namespace neurolens
