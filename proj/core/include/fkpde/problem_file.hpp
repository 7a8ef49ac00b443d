#pragma once

#include <string>

#include "fkpde/problem.hpp"

namespace fkpde {

// Plain-text problem definition, INI-style sections. Coefficients come from
// the registry of named forms; see README for the format:
//
//   [problem]
//   dimension = 1
//   name = my_problem
//   [domain]              # omit the section for a free-space problem
//   lower = 0
//   upper = 1
//   [coefficients]
//   sigma = const 0.1414213562373095
//   drift = const -0.1
//   kill = const 0
//   initial = linear 0 100
//   g_lower_1 = const 0
//   g_upper_1 = const 100
//   [bounds]              # required when `kill` is not constant
//   kill = 0 1
//
// Scalar forms: "const v" | "linear c0 c1 .. cd" | "product" |
// "exp_bilinear s" | "zero". Drift forms: "zero" | "const v1 .. vd" |
// "grad_exp_bilinear s".
PdeProblem parse_problem_file(const std::string& path);
PdeProblem parse_problem_text(const std::string& text);

}  // namespace fkpde
