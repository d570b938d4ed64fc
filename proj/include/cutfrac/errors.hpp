#ifndef CUTFRAC_ERRORS_HPP
#define CUTFRAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cutfrac {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Point not on expected geometry, host triangle not found, component outside box, ...
struct GeometryError : Error {
    using Error::Error;
};

/// Adjacency tags inconsistent with geometry (missing neighbor, dangling reference).
struct AdjacencyError : Error {
    using Error::Error;
};

/// A coefficient field cannot be evaluated where requested.
struct FieldError : Error {
    using Error::Error;
};

/// Invalid user-facing parameter (nx too small, negative tau, unknown key, ...).
struct ParamError : Error {
    using Error::Error;
};

/// Non-finite local contribution during assembly; message names triangle and term.
struct AssemblyError : Error {
    using Error::Error;
};

/// Singular matrix or failed factorization; message names the pivot.
struct SolverError : Error {
    using Error::Error;
};

} // namespace cutfrac

#endif
