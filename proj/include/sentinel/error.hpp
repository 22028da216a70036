#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sentinel {

enum class ErrorCode {
    Io,
    Parse,
    InvalidArgument,
    InsufficientClass,
    DimensionMismatch,
    EmptyInput,
    EmptySet,
    EmptyTable,
    EmptyPool,
    InconsistentVector,
    SingleClass,
    Degenerate,
    FoldClassMissing,
    Corrupt,
    Version,
    Leakage,
    EncoderMismatch,
    MissingEmbedding,
};

std::string_view to_string(ErrorCode code);

// Every fatal condition in the library surfaces as this exception type. The
// CLI maps the code onto its machine-readable error output.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace sentinel
