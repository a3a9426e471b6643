#pragma once

#include <stdexcept>
#include <string>

namespace mahler {

/// Base class for all errors raised by the library.
class MahlerError : public std::runtime_error {
public:
    explicit MahlerError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed user input: bad expressions, a_0 = 0, p < 2, broken JSON.
class InputError : public MahlerError {
public:
    explicit InputError(const std::string& msg) : MahlerError(msg) {}
};

/// The computation would need a field extension the library cannot build or
/// verify (irreducible factor of degree >= 3, unverified minimal polynomial,
/// characteristic-p closed forms that do not exist in the supported class).
class UnsupportedFieldError : public MahlerError {
public:
    explicit UnsupportedFieldError(const std::string& msg) : MahlerError(msg) {}
};

} // namespace mahler
