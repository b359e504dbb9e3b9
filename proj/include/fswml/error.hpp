#pragma once

#include <stdexcept>
#include <string>

namespace fswml {

/// Runtime error raised by loading, fitting, evaluation and serialization.
/// Messages carry enough context (row, column, file section) to act on.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

} // namespace fswml
