#include "sentinel/error.hpp"

namespace sentinel {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Io: return "Io";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InsufficientClass: return "InsufficientClass";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::EmptyTable: return "EmptyTable";
        case ErrorCode::EmptyPool: return "EmptyPool";
        case ErrorCode::InconsistentVector: return "InconsistentVector";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::Degenerate: return "Degenerate";
        case ErrorCode::FoldClassMissing: return "FoldClassMissing";
        case ErrorCode::Corrupt: return "Corrupt";
        case ErrorCode::Version: return "Version";
        case ErrorCode::Leakage: return "Leakage";
        case ErrorCode::EncoderMismatch: return "EncoderMismatch";
        case ErrorCode::MissingEmbedding: return "MissingEmbedding";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace sentinel
