#pragma once

#include <stdexcept>
#include <string>

namespace cruot {

// Base class for all library errors so callers can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteEntry : public Error {
 public:
  using Error::Error;
};

class NonPositiveWeight : public Error {
 public:
  using Error::Error;
};

class NegativeArgument : public Error {
 public:
  using Error::Error;
};

// A potential or plan entry left the representable range mid-solve.
class NumericalOverflow : public Error {
 public:
  using Error::Error;
};

// Both marginals of a plan must carry mass before a map can be fitted.
class DegenerateMarginal : public Error {
 public:
  using Error::Error;
};

class KTooLarge : public Error {
 public:
  using Error::Error;
};

class MissingLabels : public Error {
 public:
  using Error::Error;
};

class InvalidRate : public Error {
 public:
  using Error::Error;
};

class FileNotFound : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(msg + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

class NonNumericFeature : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
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

}  // namespace cruot
