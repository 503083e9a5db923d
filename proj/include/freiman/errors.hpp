#pragma once

#include <stdexcept>
#include <string>

namespace freiman {

/// Raised by operations that need field structure when the modulus is composite.
struct NonPrimeModulus : std::domain_error {
    explicit NonPrimeModulus(const std::string& what) : std::domain_error(what) {}
};

/// Raised when a set is too small for the requested notion to be meaningful.
struct DegenerateSet : std::domain_error {
    explicit DegenerateSet(const std::string& what) : std::domain_error(what) {}
};

/// Raised when an exact enumeration would exceed the configured budget.
struct TooLarge : std::runtime_error {
    explicit TooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct LevelCapExceeded : std::runtime_error {
    explicit LevelCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct NotIsolated : std::domain_error {
    explicit NotIsolated(const std::string& what) : std::domain_error(what) {}
};

/// A value table fails the homomorphism property it was assumed to satisfy.
struct NotWellDefined : std::domain_error {
    explicit NotWellDefined(const std::string& what) : std::domain_error(what) {}
};

/// The standing assumption A - A = Z_N does not hold.
struct DifferenceSetIncomplete : std::domain_error {
    explicit DifferenceSetIncomplete(const std::string& what) : std::domain_error(what) {}
};

/// A concentration-bound schedule violates one of its admissibility conditions.
struct ScheduleInvalid : std::runtime_error {
    explicit ScheduleInvalid(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidConfig : std::runtime_error {
    explicit InvalidConfig(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace freiman
