#ifndef CCMN_ERRORS_HPP_
#define CCMN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ccmn {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidSplit : public Error {
public:
  using Error::Error;
};

class NonFiniteInput : public Error {
public:
  using Error::Error;
};

class InvalidNoiseSpec : public Error {
public:
  using Error::Error;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class InvalidPair : public Error {
public:
  using Error::Error;
};

class SingularSystem : public Error {
public:
  using Error::Error;
};

class EnumerationTooLarge : public Error {
public:
  using Error::Error;
};

class DivergedTraining : public Error {
public:
  DivergedTraining(const std::string& msg, int epoch, int step)
      : Error(msg), epoch(epoch), step(step) {}
  int epoch;
  int step;
};

class EmptyBatch : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

class RangeError : public Error {
public:
  using Error::Error;
};

class GenerationFailed : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace ccmn

#endif  // CCMN_ERRORS_HPP_
