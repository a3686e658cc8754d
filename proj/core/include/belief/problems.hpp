#pragma once

#include <map>
#include <string>

#include "belief/classic.hpp"
#include "belief/sparse.hpp"

namespace belief {

/// 2D elliptic model problem discretized on the unit square with Dirichlet
/// data taken from a manufactured solution. The grid has 2^J + 1 points per
/// axis including the boundary; only the (2^J - 1)^2 interior points are
/// unknowns, stored row-major with x fastest. Rows are scaled by a
/// problem-wide sign so diagonals come out positive.
struct AssembledProblem {
    SparseMatrix A;
    Vector b;
    Vector exact;  // manufactured solution sampled at the interior points
    GridInfo grid;
    double h = 0.0;
};

/// Problem names: general, mixed, boundary-layer, inner-layer, stretched,
/// anisotropic, poisson. Recognized params (with defaults from the
/// benchmark setups): eps; stretched additionally p and eta. Unknown names
/// or params throw std::invalid_argument.
AssembledProblem assemble(const std::string& name, int J,
                          const std::map<std::string, double>& params = {});

double exact_solution(const std::string& name, const std::map<std::string, double>& params,
                      double x, double y);

}  // namespace belief
