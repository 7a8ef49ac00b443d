#pragma once

#include <stdexcept>
#include <string>

namespace fkpde {

// Problem cannot be handled by the exact-algorithm path (no Lamperti
// transform, no potential, missing bounds). Callers should fall back to
// debiasing; the CLI maps this to exit code 3.
class unsupported_problem : public std::runtime_error {
public:
    explicit unsupported_problem(const std::string& what) : std::runtime_error(what) {}
};

// A user-supplied bound was violated by an evaluated quantity, or a
// coefficient left its declared range. Aborts the run (CLI exit code 4).
class bound_violation : public std::runtime_error {
public:
    explicit bound_violation(const std::string& what) : std::runtime_error(what) {}
};

// A hard resource guard was hit (e.g. a halting draw implying a fine grid
// beyond 2^30 steps).
class resource_limit : public std::runtime_error {
public:
    explicit resource_limit(const std::string& what) : std::runtime_error(what) {}
};

// An internal rejection loop exceeded its iteration cap. Documented
// rejection rates make this unreachable, so it signals a bug, not bad input.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace fkpde
