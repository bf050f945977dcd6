#pragma once

#include <stdexcept>
#include <string>

namespace tollsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input document failed validation. Carries the location of the offending value so
/// the message can point at file, record and field.
class ValidationError : public Error {
 public:
  ValidationError(std::string file, std::string record, std::string field, const std::string& what)
      : Error(file + ": " + record + ": " + field + ": " + what),
        file_(std::move(file)),
        record_(std::move(record)),
        field_(std::move(field)) {}

  const std::string& file() const noexcept { return file_; }
  const std::string& record() const noexcept { return record_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string file_;
  std::string record_;
  std::string field_;
};

class RoutingError : public Error {
 public:
  using Error::Error;
};

}  // namespace tollsim
