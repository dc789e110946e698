#pragma once

#include <stdexcept>
#include <string>

namespace queryrec {

/// Base class for all pipeline errors. Subclasses map to distinct CLI exit
/// codes (sysexits-style), see exit_code().
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Bad command line, bad config file, out-of-range option.
class UsageError : public Error {
public:
    using Error::Error;
    static constexpr int exit_code = 64;
};

/// Input data that cannot be worked with: empty corpus, unknown user,
/// unresolvable item references, too few users to split.
class DataError : public Error {
public:
    using Error::Error;
    static constexpr int exit_code = 65;
};

/// Unreadable or unwritable file.
class IoError : public Error {
public:
    using Error::Error;
    static constexpr int exit_code = 74;
};

/// External generator spoke, but violated the wire contract (non-JSON line,
/// wrong query count, non-finite score).
class ProtocolError : public Error {
public:
    using Error::Error;
    static constexpr int exit_code = 76;
};

/// External generator could not be reached at all: spawn failure, timeout,
/// unexpected process exit.
class TransportError : public Error {
public:
    using Error::Error;
    static constexpr int exit_code = 69;
};

} // namespace queryrec
