#pragma once

#include <string>
#include <vector>

#include "belief/sparse.hpp"

namespace belief {

enum class SolveStatus { Converged, Diverged, MaxIter };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::Diverged: return "diverged";
        case SolveStatus::MaxIter: return "max_iter";
    }
    return "?";
}

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIter;
    int iterations = 0;
    std::vector<double> residual_history;  // length iterations+1, includes initial
    double flop_estimate = 0.0;
    Vector solution;
    std::string detail;  // breakdown location etc.
};

}  // namespace belief
