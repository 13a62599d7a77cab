#ifndef HEAVYTAIL_ERRORS_HPP_
#define HEAVYTAIL_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heavytail {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A parameter violates an operation precondition; the message names the
// violated constraint.
struct invalid_parameter : error {
    using error::error;
};

// Configuration text could not be parsed or references unknown identifiers.
struct config_error : error {
    using error::error;
};

// A numeric routine could not reach its tolerance target.
struct numeric_error : error {
    numeric_error(const std::string& what, double achieved_tolerance)
        : error(what), achieved(achieved_tolerance) {}
    double achieved;
};

struct io_error : error {
    using error::error;
};

// The requested check or construction is undefined for this model
// (e.g. not regularly varying, not long-tailed).
struct unsupported_model : error {
    using error::error;
};

// An estimator was asked to run on a dependence structure it does not admit.
struct unsupported_structure : error {
    using error::error;
};

// Conditional estimate with an empty conditioning event.
struct undefined_estimate : error {
    undefined_estimate(const std::string& what, std::size_t conditioning_count)
        : error(what), count(conditioning_count) {}
    std::size_t count;
};

}  // namespace heavytail

#endif  // HEAVYTAIL_ERRORS_HPP_
