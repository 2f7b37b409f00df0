#pragma once

#include <stdexcept>
#include <string>

namespace seqdiag {

/// Stable condition codes shared with the C API layer. Values are part of
/// the library ABI; append only.
enum class Status : int {
    Ok = 0,
    InvalidArgument = 1,
    UnknownSubtype = 2,
    GapTooLarge = 3,
    InsufficientHistory = 4,
    DecodeError = 5,
    ShapeMismatch = 6,
    LabelInconsistent = 7,
    SequenceTooLong = 8,
    TooFewStudents = 9,
    NoValidWindows = 10,
    DegenerateInput = 11,
    OutOfRange = 12,
    JudgeUnavailable = 13,
    UnparseableJudgeReply = 14,
    UnparseableResponse = 15,
    ProviderFailure = 16,
    IoError = 17,
    Internal = 18,
};

const char* status_name(Status s);

class Error : public std::runtime_error {
public:
    Error(Status status, const std::string& message)
        : std::runtime_error(message), status_(status) {}

    Status status() const { return status_; }

private:
    Status status_;
};

[[noreturn]] inline void raise(Status status, const std::string& message) {
    throw Error(status, message);
}

} // namespace seqdiag
