#pragma once

#include <stdexcept>
#include <string>

// Exception taxonomy shared by all pointform modules.  Every error carries a
// one-line human-readable message; call sites are expected to name the
// offending quantity in that message.

namespace pointform {

// Argument outside the mathematical domain of the operation (e.g. evaluating
// a Neumann function at zero, or a boundary-value object below threshold).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// The evaluation scheme cannot certify the requested accuracy target.
class AccuracyError : public std::runtime_error {
public:
    explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative scheme (quadrature refinement, fixed point, root search)
// exhausted its budget before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A pole of the function being evaluated was hit (denominator below cutoff).
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

// Argument-principle gate failed: the contour does not enclose exactly the
// expected number of zeros/poles.
class WindingError : public std::runtime_error {
public:
    explicit WindingError(const std::string& what) : std::runtime_error(what) {}
};

// A transformation outside the causal semigroup was requested.
class CausalityError : public std::runtime_error {
public:
    explicit CausalityError(const std::string& what) : std::runtime_error(what) {}
};

// An interpolation target left the sampled grid (no extrapolation allowed).
class CoverageError : public std::runtime_error {
public:
    explicit CoverageError(const std::string& what) : std::runtime_error(what) {}
};

// Linear-system condition estimate beyond the trust threshold.
class IllConditionedError : public std::runtime_error {
public:
    explicit IllConditionedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pointform
