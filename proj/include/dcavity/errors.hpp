#ifndef DCAVITY_ERRORS_HPP
#define DCAVITY_ERRORS_HPP

#include <stdexcept>

namespace dcavity {

// Raised when a numerical guard trips (aliasing, lattice snapping,
// non-convergence). The CLI maps these to exit code 3.
class numerical_guard_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dcavity

#endif
