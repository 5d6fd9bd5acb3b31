#ifndef ATROC_ERRORS_HPP
#define ATROC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace atroc {

/// Config parse/validation failure: CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite loss/gradient or divergence guard: CLI exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace atroc

#endif // ATROC_ERRORS_HPP
