#pragma once

#include <stdexcept>
#include <string>

namespace autoeval {

// Failure categories; the CLI maps these onto process exit codes.
enum class ErrorKind {
    kShape,             // dimension or layout mismatch
    kInsufficientData,  // fewer points than the operation needs
    kDegenerateInput,   // zero variance, single class, etc.
    kNumerical,         // eigensolver failure, non-finite intermediate
    kFormat,            // malformed file on disk
    kValidation,        // well-formed file with invariant-violating content
    kConfig,            // bad configuration value or missing resource
    kTrainingFailure,   // optimization diverged
    kParameter,         // out-of-range argument
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
          kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kShape: return "shape error";
        case ErrorKind::kInsufficientData: return "insufficient data";
        case ErrorKind::kDegenerateInput: return "degenerate input";
        case ErrorKind::kNumerical: return "numerical error";
        case ErrorKind::kFormat: return "format error";
        case ErrorKind::kValidation: return "validation error";
        case ErrorKind::kConfig: return "configuration error";
        case ErrorKind::kTrainingFailure: return "training failure";
        case ErrorKind::kParameter: return "parameter error";
    }
    return "error";
}

}  // namespace autoeval
