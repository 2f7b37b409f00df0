#include "common/error.hpp"

namespace seqdiag {

const char* status_name(Status s) {
    switch (s) {
    case Status::Ok: return "ok";
    case Status::InvalidArgument: return "invalid_argument";
    case Status::UnknownSubtype: return "unknown_subtype";
    case Status::GapTooLarge: return "gap_too_large";
    case Status::InsufficientHistory: return "insufficient_history";
    case Status::DecodeError: return "decode_error";
    case Status::ShapeMismatch: return "shape_mismatch";
    case Status::LabelInconsistent: return "label_inconsistent";
    case Status::SequenceTooLong: return "sequence_too_long";
    case Status::TooFewStudents: return "too_few_students";
    case Status::NoValidWindows: return "no_valid_windows";
    case Status::DegenerateInput: return "degenerate_input";
    case Status::OutOfRange: return "out_of_range";
    case Status::JudgeUnavailable: return "judge_unavailable";
    case Status::UnparseableJudgeReply: return "unparseable_judge_reply";
    case Status::UnparseableResponse: return "unparseable_response";
    case Status::ProviderFailure: return "provider_failure";
    case Status::IoError: return "io_error";
    case Status::Internal: return "internal";
    }
    return "unknown";
}

} // namespace seqdiag
