#ifndef VDCSIM_ERRORS_HPP
#define VDCSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vdcsim {

// Bad construction arguments, malformed files, inconsistent traces.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Request can never fit the hardware (more cores than a node has, etc.).
class capacity_error : public std::runtime_error {
public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// Internal state violation: a reservation conflict or audit failure.
// Reaching this means a heuristic or the engine has a bug, not bad input.
class consistency_error : public std::logic_error {
public:
    explicit consistency_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace vdcsim

#endif
