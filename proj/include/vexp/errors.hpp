#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vexp {

// Base for all library errors. Subclasses map to CLI exit codes:
// InvalidArgument/UndefinedMetric -> 1, DecodeError/DataError -> 2, IoError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Invalid UTF-8 input; carries the byte offset of the offending byte.
class DecodeError : public Error {
public:
    DecodeError(const std::string& what, size_t byte_offset)
        : Error(what + " at byte offset " + std::to_string(byte_offset)),
          byte_offset_(byte_offset) {}
    size_t byte_offset() const { return byte_offset_; }

private:
    size_t byte_offset_;
};

// Metric requested on an empty/degenerate input (zero words, zero bytes, ...).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

// Malformed input data (bad JSON record, bad vocabulary file, ...).
class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Non-finite values where finite numbers are required.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace vexp
