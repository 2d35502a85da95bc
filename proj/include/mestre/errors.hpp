#pragma once

#include <stdexcept>
#include <string>

namespace mestre {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// quadrature
struct DomainError : Error { using Error::Error; };
struct ToleranceNotReached : Error { using Error::Error; };

// test functions
struct ZeroFunction : Error { using Error::Error; };

// field records
struct MalformedRecord : Error { using Error::Error; };
struct NonMonicPolynomial : MalformedRecord { using MalformedRecord::MalformedRecord; };
struct ZeroDiscriminant : MalformedRecord { using MalformedRecord::MalformedRecord; };

// linear algebra
struct NotPositiveDefinite : Error { using Error::Error; };

} // namespace mestre
