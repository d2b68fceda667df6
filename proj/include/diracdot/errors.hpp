#ifndef DIRACDOT_ERRORS_HPP
#define DIRACDOT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace diracdot {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the supported parameter range.
struct DomainError : Error {
    using Error::Error;
};

// An internal series / recurrence failed its own residual check.
struct ConvergenceError : Error {
    using Error::Error;
};

// Evaluation requested at (or numerically indistinguishable from) a
// singular point, e.g. Y_n at z = 0.
struct SingularArgument : Error {
    using Error::Error;
};

// Branch preconditions of channel() violated.
struct BranchError : Error {
    using Error::Error;
};

// Numerator and denominator of the phase formula both vanish.
struct IndeterminatePhase : Error {
    using Error::Error;
};

// Phase grid too coarse to unwrap unambiguously.
struct UnwrapError : Error {
    using Error::Error;
};

// Spinor matching requested at a point that does not satisfy the
// state's secular condition.
struct MatchError : Error {
    using Error::Error;
};

// Iterative root refinement hit its iteration cap.
struct NoConvergence : Error {
    using Error::Error;
};

// Complex iterate left the allowed search region.
struct EscapedRegion : Error {
    using Error::Error;
};

// The callable handed to a root bracketing routine threw.
struct EvaluationError : Error {
    using Error::Error;
};

// Continuation step halving exhausted; carries how far the track got.
struct TrackLost : Error {
    TrackLost(const std::string& what, std::size_t last_good)
        : Error(what), last_good_index(last_good) {}
    std::size_t last_good_index;
};

// No delay-curve maximum available to pair with a resonance.
struct UnmatchedResonance : Error {
    using Error::Error;
};

// Bad command line or config file.
struct UsageError : Error {
    using Error::Error;
};

// Filesystem trouble while emitting results.
struct IoError : Error {
    using Error::Error;
};

} // namespace diracdot

#endif
