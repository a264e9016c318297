#ifndef HPHEAT_ERRORS_HPP
#define HPHEAT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hpheat {

/// Invalid physical or discretisation input (bad mesh, negative coefficient, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The linear algebra broke down, e.g. a vanishing pivot in the banded LU.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, std::size_t pivot = npos)
        : std::runtime_error(what), pivot_(pivot) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Row index of the offending pivot, or npos when not pivot related.
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// Malformed run configuration. Carries the line and key when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string key = {}, int line = 0)
        : std::runtime_error(what), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hpheat

#endif // HPHEAT_ERRORS_HPP
