#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rcs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PartitionError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ScheduleError : public Error {
public:
    using Error::Error;
};

class LambdaError : public Error {
public:
    using Error::Error;
};

class NotApplicableError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Raised when an iterate, block subgradient, or objective stops being finite.
class DivergedError : public Error {
public:
    explicit DivergedError(std::int64_t k)
        : Error("non-finite value at iteration " + std::to_string(k)), k_(k) {}
    std::int64_t iteration() const { return k_; }

private:
    std::int64_t k_;
};

}  // namespace rcs
