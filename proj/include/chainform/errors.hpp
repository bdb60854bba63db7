#pragma once

#include <stdexcept>
#include <string>

namespace chainform {

// Bad input or violated contract (CLI exit code 2).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed point or root search failed (CLI exit code 3).
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& msg)
{
    if (!ok) throw ValidationError(msg);
}

} // namespace chainform
