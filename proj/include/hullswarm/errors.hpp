#pragma once

#include <stdexcept>
#include <string>

namespace hullswarm
{

// Malformed arguments: dimension mismatches, empty hulls, out-of-domain parameters.
class invalid_input : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A weight function left the interval allowed by the weight bounds.
class bound_violation : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A constructive certificate could not be built from the given data.
class certificate_failure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A verification was requested on a trajectory whose schedule does not
// meet the connectivity condition the bound relies on.
class precondition_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class divergence_error : public std::runtime_error
{
public:
    divergence_error(const std::string &what, double time) : std::runtime_error(what), time_(time) {}

    double time() const noexcept
    {
        return time_;
    }

private:
    double time_;
};

} // namespace hullswarm
