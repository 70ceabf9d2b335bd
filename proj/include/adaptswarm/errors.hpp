#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adaptswarm {

/// Operand shapes do not line up.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Episode/environment protocol misuse, e.g. stepping a finished episode.
class ProtocolError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed binary stream. Carries the byte offset where decoding failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Stream was written by an incompatible format version.
class VersionError : public ParseError {
public:
    VersionError(int found, int expected)
        : ParseError("unsupported format version " + std::to_string(found) + ", expected " +
                         std::to_string(expected),
                     4),
          found_(found) {}

    int found() const noexcept { return found_; }

private:
    int found_;
};

}  // namespace adaptswarm
