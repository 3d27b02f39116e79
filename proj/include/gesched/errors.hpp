#pragma once

#include <stdexcept>
#include <string>

namespace gesched {

// Numerical / model-level failure (non-convergence, instability, no
// admissible root, degenerate conditioning). Distinct from argument errors
// so the CLI can map it to its own exit code.
class model_error : public std::runtime_error {
public:
    explicit model_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gesched
