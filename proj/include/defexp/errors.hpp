#pragma once

#include <stdexcept>

namespace defexp {

// Precision policy violation: working-bits hard cap exceeded, bad digit count.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input outside an operation's mathematical domain (q outside (0,1), sigma(0), ...).
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Zero enumeration could not establish a sign-change bracket within budget.
struct enumeration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bisection/Newton refinement did not converge.
struct refinement_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computed result violates a structural invariant (interlacing, ordering).
struct integrity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Zero-cache fingerprint rejected.
struct cache_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file or unparseable number.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace defexp
