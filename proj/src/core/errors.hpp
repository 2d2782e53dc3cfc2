#pragma once

#include <stdexcept>
#include <string>

namespace qsr {

// Error codes shared with the C API. Keep in sync with qsr_status in qsr.h.
enum class ErrorCode {
    ok = 0,
    io = 1,
    format = 2,
    corrupt = 3,
    dimension = 4,
    argument = 5,
    bad_magic = 6,
    truncated = 7,
    version = 8,
    not_recorded = 9,
    data = 10,
    internal = 11,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error(ErrorCode::io, m) {}
};
struct FormatError : Error {
    explicit FormatError(const std::string& m) : Error(ErrorCode::format, m) {}
};
struct CorruptError : Error {
    explicit CorruptError(const std::string& m) : Error(ErrorCode::corrupt, m) {}
};
struct DimensionError : Error {
    explicit DimensionError(const std::string& m) : Error(ErrorCode::dimension, m) {}
};
struct ArgumentError : Error {
    explicit ArgumentError(const std::string& m) : Error(ErrorCode::argument, m) {}
};
struct BadMagicError : Error {
    explicit BadMagicError(const std::string& m) : Error(ErrorCode::bad_magic, m) {}
};
struct TruncatedError : Error {
    explicit TruncatedError(const std::string& m) : Error(ErrorCode::truncated, m) {}
};
struct VersionError : Error {
    explicit VersionError(const std::string& m) : Error(ErrorCode::version, m) {}
};
struct NotRecordedError : Error {
    explicit NotRecordedError(const std::string& m) : Error(ErrorCode::not_recorded, m) {}
};
struct DataError : Error {
    explicit DataError(const std::string& m) : Error(ErrorCode::data, m) {}
};

} // namespace qsr
