#pragma once

#include <stdexcept>
#include <string>

namespace qhahn {

// Library errors. Everything derives from qhahn::error so callers can catch
// either the broad class or a specific condition.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside the admissible range of the operation.
struct domain_error : error {
    using error::error;
};

// A factor in a denominator vanishes (q-Pochhammer singularity).
struct singularity_error : error {
    using error::error;
};

// Series or infinite product does not converge for the given arguments.
struct divergence_error : error {
    using error::error;
};

// A lower-parameter q-Pochhammer vanishes before the series terminates.
struct pole_error : error {
    using error::error;
};

// A certified tail bound cannot be brought below the requested threshold.
struct truncation_error : error {
    using error::error;
};

// Tie encountered in the Z recursion (measure zero; signals a numeric bug
// unless tie resolution was requested).
struct tie_error : error {
    using error::error;
};

// The requested nested-contour geometry cannot be realized.
struct infeasible_contour_error : error {
    using error::error;
};

}  // namespace qhahn
