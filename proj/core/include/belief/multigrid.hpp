#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "belief/gabp.hpp"
#include "belief/problems.hpp"
#include "belief/region_gabp.hpp"
#include "belief/report.hpp"

namespace belief {

enum class MgSmoother {
    GabpSequential,
    GabpRedBlack,
    GabpFourColor,
    GabpFlood,
    GabpLine,  // grid lines as regions, block messages
    Jacobi,
    GsLex,
    GsRedBlack,
    GsFourColor,
    LineGsX,
    LineGsY,
    ZebraX,
    AlternatingZebra,
};

/// V(J1, J2): finest grid 2^J1 + 1 points per axis, J2 levels (coarsest
/// exponent J1 - J2 + 1), pre/post smoothing sweep counts (n, m).
struct CycleSpec {
    int pre = 1;
    int post = 1;
    MgSmoother smoother = MgSmoother::GsLex;
    // reuse the per-level precomputed precision messages instead of running
    // full sweeps; mean messages still restart at every smoothing call
    bool frozen = false;
};

struct GridLevel {
    AssembledProblem prob;  // rediscretized operator at this level
    // message-solver state, populated only for the gabp smoother kinds
    std::unique_ptr<GabpEngine> engine;
    Schedule schedule;
    FrozenLambda frozen;
    bool frozen_ok = false;
    std::unique_ptr<RegionGabpEngine> line_engine;
};

class Hierarchy {
public:
    /// Rediscretizes the named problem on every level and prepares the
    /// smoother (for the gabp kinds: precomputes the per-level message
    /// precisions; on non-convergence the smoother runs cold and the level
    /// is flagged). Message-passing smoothers probe each coarse level's
    /// sweep iteration at setup; coarsening stops above the first level
    /// where the sweeps expand (that level is solved directly instead), so
    /// the hierarchy may end up shallower than requested.
    Hierarchy(const std::string& problem, int J1, int J2,
              const std::map<std::string, double>& params, MgSmoother smoother);

    int num_levels() const { return static_cast<int>(levels_.size()); }
    const GridLevel& level(int k) const { return levels_[k]; }
    const Vector& fine_rhs() const { return levels_[0].prob.b; }
    const Vector& fine_exact() const { return levels_[0].prob.exact; }
    MgSmoother smoother() const { return smoother_; }

    /// One V-cycle on the finest level; x is updated in place.
    /// Throws std::runtime_error on smoother breakdown (message names the level).
    void v_cycle(const CycleSpec& spec, const Vector& b, Vector& x);

    /// Fine-level smoother cost of one cycle, per unknown (analytic where
    /// the stencil formula exists, measured multiply-add count otherwise).
    double cycle_flops_per_unknown(const CycleSpec& spec) const;

private:
    void smooth(int level, const Vector& b, Vector& x, int sweeps, bool frozen);
    void cycle(int level, const CycleSpec& spec, const Vector& b, Vector& x);

    MgSmoother smoother_;
    std::vector<GridLevel> levels_;
    struct CoarseSolver;  // dense factorization of the coarsest operator
    std::shared_ptr<CoarseSolver> coarse_;
};

/// Full-weighting restriction of a fine-interior vector to the next coarser
/// interior grid (fine values outside the interior are treated as zero).
Vector mg_restrict(const Vector& fine, int fine_points_per_axis_interior);

/// Bilinear interpolation of a coarse-interior vector to the next finer
/// interior grid (coarse boundary treated as zero).
Vector mg_prolong(const Vector& coarse, int coarse_points_per_axis_interior);

struct MgSolveOptions {
    double tol = 2e-4;
    int max_cycles = 200;
    double divergence_factor = 1e6;
};

SolveReport mg_solve(Hierarchy& hier, const CycleSpec& spec, const Vector& b,
                     const MgSolveOptions& opt);

}  // namespace belief
