#pragma once

#include <stdexcept>
#include <string>

namespace stanley {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad seed, odd character, ...).
class invalid_input : public error {
public:
    using error::error;
};

/// A node budget, memory cap or 64-bit range was exceeded.
class resource_error : public error {
public:
    using error::error;
};

/// A constructive path disagreed with its oracle.
class verification_error : public error {
public:
    using error::error;
};

/// The requested character lies outside the constructions implemented here.
class not_covered : public error {
public:
    using error::error;
};

} // namespace stanley
