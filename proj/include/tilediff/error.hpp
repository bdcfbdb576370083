#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tilediff {

// Error categories. The CLI maps each one onto a process exit code.
enum class ErrorKind {
    invalid_argument,
    config,
    io,
    protocol,
    numeric,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& message)
        : Error(ErrorKind::invalid_argument, message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error(ErrorKind::config, message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& message) : Error(ErrorKind::numeric, message) {}
};

enum class ProtocolFailure {
    connection,
    timeout,
    malformed_frame,
    remote_failure,
    version_mismatch,
};

std::string_view to_string(ProtocolFailure failure);

class ProtocolError : public Error {
public:
    ProtocolError(ProtocolFailure failure, const std::string& message)
        : Error(ErrorKind::protocol, std::string(to_string(failure)) + ": " + message),
          failure_(failure) {}

    ProtocolFailure failure() const noexcept { return failure_; }

private:
    ProtocolFailure failure_;
};

} // namespace tilediff
