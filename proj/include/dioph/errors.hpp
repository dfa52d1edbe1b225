#pragma once

#include <stdexcept>
#include <string>

namespace dioph {

// Input outside an operation's mathematical domain (e.g. matrix log away
// from the identity, zero valuation argument).
struct OutOfDomain : std::domain_error {
    using std::domain_error::domain_error;
};

// A configured resource guard (level cap, vertex cap, box size) was hit.
struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Unimplemented : std::logic_error {
    using std::logic_error::logic_error;
};

// An internal invariant failed; indicates a bug rather than bad input.
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

inline void ensure(bool cond, const std::string& what) {
    if (!cond) throw InvariantViolation(what);
}

}  // namespace dioph
