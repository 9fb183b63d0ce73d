#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace timax {

// Every failure the library reports derives from timax::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed a value outside the operation's domain.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Every mixture weight fell below the elimination floor.
class DegenerateMixture : public Error {
 public:
  using Error::Error;
};

// Exact enumeration was asked to do more work than it is bounded to.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Index was built against a different graph than the one supplied.
class StaleIndex : public Error {
 public:
  using Error::Error;
};

class CannotSmooth : public Error {
 public:
  CannotSmooth(std::size_t topic, const std::string& what)
      : Error(what), topic_(topic) {}

  std::size_t topic() const noexcept { return topic_; }

 private:
  std::size_t topic_;
};

}  // namespace timax
