#pragma once

#include <stdexcept>
#include <string>

namespace bilat {

// Joint velocity exceeded the guard, or a state went non-finite. Signals
// unstable gains or contact stiffness rather than a recoverable condition.
struct BlowUpError : std::runtime_error {
    explicit BlowUpError(const std::string& what) : std::runtime_error(what) {}
};

struct TooShortError : std::runtime_error {
    explicit TooShortError(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct PipelineError : std::runtime_error {
    explicit PipelineError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bilat
