#pragma once

#include <stdexcept>
#include <string>

namespace tractalign {

// Base class for every library error. Catching this catches them all.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DegenerateFiber : public Error {
  public:
    using Error::Error;
};

class GridMismatch : public Error {
  public:
    using Error::Error;
};

class NonMonotoneGamma : public Error {
  public:
    using Error::Error;
};

class EmptyBundle : public Error {
  public:
    using Error::Error;
};

class AntipodalPoint : public Error {
  public:
    using Error::Error;
};

class TangencyViolation : public Error {
  public:
    using Error::Error;
};

class BaseMismatch : public Error {
  public:
    using Error::Error;
};

class ShapeMismatch : public Error {
  public:
    using Error::Error;
};

class FiberCountMismatch : public Error {
  public:
    using Error::Error;
};

class EmptySet : public Error {
  public:
    using Error::Error;
};

class TooFewProfiles : public Error {
  public:
    using Error::Error;
};

class PairMismatch : public Error {
  public:
    using Error::Error;
};

class BadSpec : public Error {
  public:
    using Error::Error;
};

// File-format errors carry the byte position where parsing failed.
class FormatError : public Error {
  public:
    FormatError(const std::string& msg, std::size_t byte_pos)
        : Error(msg + " (byte " + std::to_string(byte_pos) + ")"), pos(byte_pos) {}
    std::size_t pos;
};

class BadMagic : public FormatError {
  public:
    using FormatError::FormatError;
};

class TruncatedPayload : public FormatError {
  public:
    using FormatError::FormatError;
};

class UnknownDatatype : public FormatError {
  public:
    using FormatError::FormatError;
};

class MissingOffset : public FormatError {
  public:
    using FormatError::FormatError;
};

class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace tractalign
