#pragma once

#include <stdexcept>
#include <string>

namespace semspec {

/// Thrown on any contract violation (bad input, failed precondition,
/// malformed file). The message names the offending field or id.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw error(msg);
}

} // namespace semspec
