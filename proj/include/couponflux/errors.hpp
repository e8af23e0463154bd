#pragma once

// Error taxonomy. Every failure mode that callers are expected to handle has a
// named type so the CLI can report it by name and scripts can match on it.

#include <stdexcept>
#include <string>

namespace couponflux {

class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// Kernel rows fail to be a probability distribution (negative entry, or row
// sum off 1 by more than the construction tolerance).
class NonStochastic : public Error {
public:
    explicit NonStochastic(const std::string& what) : Error("NonStochastic", what) {}
};

// A linear solve hit a zero pivot, or an iterative solve failed to converge.
class SingularSolve : public Error {
public:
    explicit SingularSolve(const std::string& what) : Error("SingularSolve", what) {}
};

// A target set covers the whole state space, so there is no outside to enter from.
class EmptyComplement : public Error {
public:
    explicit EmptyComplement(const std::string& what) : Error("EmptyComplement", what) {}
};

class LengthMismatch : public Error {
public:
    explicit LengthMismatch(const std::string& what) : Error("LengthMismatch", what) {}
};

// Argument outside the mathematical domain of the function.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("DomainError", what) {}
};

// Generating-function evaluation at or beyond a pole of a factor.
class PoleError : public Error {
public:
    explicit PoleError(const std::string& what) : Error("PoleError", what) {}
};

// The renewal denominator 1 - z + rho*z*phi(q*z) is not positive at the
// requested point, so the series representation has diverged.
class DenominatorNonpositive : public Error {
public:
    explicit DenominatorNonpositive(const std::string& what) : Error("DenominatorNonpositive", what) {}
};

// Inclusion-exclusion over coupon subsets is capped to keep 2^n enumerable.
class SubsetLimit : public Error {
public:
    explicit SubsetLimit(const std::string& what) : Error("SubsetLimit", what) {}
};

// Scaling-regime parameters do not satisfy the regime's defining relation.
class RegimeMismatch : public Error {
public:
    explicit RegimeMismatch(const std::string& what) : Error("RegimeMismatch", what) {}
};

class TooFewSamples : public Error {
public:
    explicit TooFewSamples(const std::string& what) : Error("TooFewSamples", what) {}
};

// A simulation reached its configured step budget before completing; callers
// record the sample as censored rather than dropping it.
class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(const std::string& what) : Error("BudgetExceeded", what) {}
};

}
