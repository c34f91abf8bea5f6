#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace snowsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file structure (bad length, bad header, unparsable value).
class FormatError : public Error {
 public:
  using Error::Error;
};

// One or more records of an otherwise well-formed file are invalid.
class RecordError : public Error {
 public:
  RecordError(const std::string& what, std::vector<std::size_t> indices)
      : Error(what), indices_(std::move(indices)) {}

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Model fit failed; callers are expected to fall back to configured defaults.
class EstimationError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace snowsim
