#pragma once

#include <stdexcept>

namespace patchbench {

// Error categories used across the library. The CLI maps them to exit codes
// (config 1, generation 2, io 3, missing corpus 4, evaluation 5); invalid
// arguments and math-domain failures reuse the standard exception types.

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Synthesis or corpus construction failed (degenerate image, folding
/// homography after retries, empty surviving region set).
struct GenerationError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct MissingCorpusError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct EvalError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Statistical model fitting failed (rank-deficient beyond rescue).
struct FitError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

} // namespace patchbench
