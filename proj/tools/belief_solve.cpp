// Benchmark driver: assemble a 2D elliptic model problem, run a solver or a
// multigrid cycle on it, and emit the convergence history as CSV plus a
// one-line summary. Suites reproduce whole benchmark tables side by side
// with reference iteration counts.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "belief/analysis.hpp"
#include "belief/classic.hpp"
#include "belief/gabp.hpp"
#include "belief/multigrid.hpp"
#include "belief/problems.hpp"
#include "belief/region.hpp"
#include "belief/region_gabp.hpp"

namespace {

using namespace belief;

struct RunSpec {
    std::string problem = "poisson";
    std::map<std::string, double> params;
    int J = 6;
    std::string solver = "gabp";
    std::string schedule = "sequential";
    double tol = 2e-4;
    int max_iter = 20000;
    int cycle_J1 = 0, cycle_J2 = 0;  // 0: no multigrid cycle requested
    int pre = 1, post = 1;
    std::string out;
    unsigned seed = 0;
};

struct RunResult {
    SolveReport report;
    double flops_per_n = 0.0;
    int n = 0;
};

Schedule make_schedule(const std::string& name, const GridInfo& g) {
    if (name == "sequential") return Schedule::sequential(g.nx * g.ny);
    if (name == "parallel-flood") return Schedule::parallel_flood();
    if (name == "red-black") return Schedule::red_black_grid(g.nx, g.ny);
    if (name == "four-color") return Schedule::four_color_grid(g.nx, g.ny);
    throw std::invalid_argument("unknown schedule '" + name + "'");
}

std::optional<MgSmoother> smoother_by_name(const std::string& name) {
    static const std::map<std::string, MgSmoother> table = {
        {"sequential-gabp", MgSmoother::GabpSequential},
        {"red-black-gabp", MgSmoother::GabpRedBlack},
        {"4-color-gabp", MgSmoother::GabpFourColor},
        {"flood-gabp", MgSmoother::GabpFlood},
        {"line-gabp", MgSmoother::GabpLine},
        {"jacobi", MgSmoother::Jacobi},
        {"gs", MgSmoother::GsLex},
        {"red-black-gs", MgSmoother::GsRedBlack},
        {"4-color-gs", MgSmoother::GsFourColor},
        {"line-gs-x", MgSmoother::LineGsX},
        {"line-gs-y", MgSmoother::LineGsY},
        {"zebra", MgSmoother::ZebraX},
        {"alternating-zebra", MgSmoother::AlternatingZebra},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

RunResult run_spec(const RunSpec& spec) {
    RunResult res;

    if (spec.solver.rfind("mg:", 0) == 0) {
        if (spec.cycle_J1 <= 0)
            throw std::invalid_argument("multigrid solver needs --cycle V:J1,J2");
        auto sm = smoother_by_name(spec.solver.substr(3));
        if (!sm) throw std::invalid_argument("unknown smoother '" + spec.solver.substr(3) + "'");
        Hierarchy hier(spec.problem, spec.cycle_J1, spec.cycle_J2, spec.params, *sm);
        CycleSpec cyc{spec.pre, spec.post, *sm};
        MgSolveOptions opt;
        opt.tol = spec.tol;
        opt.max_cycles = spec.max_iter;
        res.n = hier.level(0).prob.A.n;
        res.report = mg_solve(hier, cyc, hier.fine_rhs(), opt);
        res.flops_per_n = res.report.flop_estimate / res.n;
        return res;
    }

    AssembledProblem prob = assemble(spec.problem, spec.J, spec.params);
    res.n = prob.A.n;

    if (spec.solver == "gabp") {
        GabpEngine eng(prob.A);
        GabpOptions opt;
        opt.tol = spec.tol;
        opt.max_iter = spec.max_iter;
        res.report = eng.solve(prob.b, make_schedule(spec.schedule, prob.grid), opt);
    } else if (spec.solver == "error-correction-gabp") {
        GabpEngine eng(prob.A);
        Schedule sched = make_schedule(spec.schedule, prob.grid);
        FrozenLambda frozen = eng.precompute_lambda(sched);
        GabpOptions opt;
        opt.tol = spec.tol;
        opt.max_iter = spec.max_iter;
        res.report = eng.solve_error_correction(prob.b, sched, std::max(1, spec.pre), frozen, opt);
    } else if (spec.solver == "generalized-gabp") {
        auto rg = build_two_layer_region_graph(
            prob.A, grid_line_regions(prob.grid.nx, prob.grid.ny));
        RegionGabpEngine eng(prob.A, std::move(rg));
        RegionSolveOptions opt;
        opt.tol = spec.tol;
        opt.max_iter = spec.max_iter;
        opt.mode = spec.schedule == "parallel-flood" ? RegionSweepMode::Flood
                                                     : RegionSweepMode::Sequential;
        res.report = eng.solve(prob.b, opt);
    } else if (spec.solver == "bicgstab") {
        res.report = bicgstab(prob.A, prob.b, spec.tol, spec.max_iter);
    } else {
        static const std::map<std::string, RelaxKind> kinds = {
            {"jacobi", RelaxKind::Jacobi},
            {"gs", RelaxKind::GsLex},
            {"red-black-gs", RelaxKind::GsRedBlack},
            {"4-color-gs", RelaxKind::GsFourColor},
            {"line-gs-x", RelaxKind::LineGsX},
            {"line-gs-y", RelaxKind::LineGsY},
            {"zebra", RelaxKind::ZebraX},
            {"alternating-zebra", RelaxKind::AlternatingZebra},
        };
        auto it = kinds.find(spec.solver);
        if (it == kinds.end()) throw std::invalid_argument("unknown solver '" + spec.solver + "'");
        RelaxSolveOptions opt;
        opt.tol = spec.tol;
        opt.max_iter = spec.max_iter;
        res.report = relax_solve(it->second, prob.A, prob.b, &prob.grid, opt);
    }
    res.flops_per_n = res.n ? res.report.flop_estimate / res.n : 0.0;
    return res;
}

void write_history_csv(const SolveReport& rep, std::ostream& os) {
    os << "iteration,residual_inf\n";
    char buf[64];
    for (size_t i = 0; i < rep.residual_history.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, rep.residual_history[i]);
        os << buf;
    }
}

int exit_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return 0;
        case SolveStatus::Diverged: return 2;
        case SolveStatus::MaxIter: return 3;
    }
    return 1;
}

// ---- suites -------------------------------------------------------------

struct SuiteRow {
    std::string label;
    RunSpec spec;
    std::string reference;  // published iteration count or "diverge"
};

struct SuiteRowResult {
    std::string label, reference, status;
    int iterations = 0;
    double flops_per_n = 0.0;
    bool failed = false;
    std::string error;
};

RunSpec mg_spec(const std::string& problem, std::map<std::string, double> params,
                const std::string& smoother, int pre, int post, int J1 = 6, int J2 = 6) {
    RunSpec s;
    s.problem = problem;
    s.params = std::move(params);
    s.solver = "mg:" + smoother;
    s.cycle_J1 = J1;
    s.cycle_J2 = J2;
    s.pre = pre;
    s.post = post;
    s.max_iter = 300;
    return s;
}

std::vector<SuiteRow> suite_rows(const std::string& name) {
    std::vector<SuiteRow> rows;
    auto add = [&rows](std::string label, RunSpec spec, std::string ref) {
        rows.push_back({std::move(label), std::move(spec), std::move(ref)});
    };
    if (name == "standalone") {
        RunSpec base;
        base.problem = "general";
        base.J = 6;
        base.max_iter = 20000;
        auto with = [&](const std::string& solver, const std::string& sched) {
            RunSpec s = base;
            s.solver = solver;
            s.schedule = sched;
            return s;
        };
        add("sequential GaBP", with("gabp", "sequential"), "1548");
        add("parallel GaBP", with("gabp", "parallel-flood"), "3299");
        add("GS", with("gs", "sequential"), "3102");
        add("4-colors GS", with("4-color-gs", "sequential"), "2620");
        add("4-colors GaBP", with("gabp", "four-color"), "1865");
        add("Jacobi", with("jacobi", "sequential"), "4746");
        RunSpec ec = with("error-correction-gabp", "four-color");
        ec.pre = 3;
        add("error correction 4-colors GaBP (3)", ec, "706");
    } else if (name == "mixed") {
        for (double eps : {0.01, -0.01}) {
            std::string tag = " [eps=" + std::to_string(eps) + "]";
            std::map<std::string, double> P{{"eps", eps}};
            add("4-color GaBP (0,4)" + tag, mg_spec("mixed", P, "4-color-gabp", 0, 4),
                eps > 0 ? "23" : "28");
            add("4-color GS (1,1)" + tag, mg_spec("mixed", P, "4-color-gs", 1, 1),
                eps > 0 ? "70" : "84");
            add("zebra-line GS (0,1)" + tag, mg_spec("mixed", P, "zebra", 0, 1),
                eps > 0 ? "104" : "127");
            add("alternating-zebra GS (0,1)" + tag, mg_spec("mixed", P, "alternating-zebra", 0, 1),
                eps > 0 ? "64" : "78");
        }
    } else if (name == "boundary-layer") {
        for (double eps : {0.02, 0.01}) {
            std::string tag = " [eps=" + std::to_string(eps) + "]";
            std::map<std::string, double> P{{"eps", eps}};
            add("red-black GaBP (5,0)" + tag, mg_spec("boundary-layer", P, "red-black-gabp", 5, 0),
                eps == 0.02 ? "5" : "3");
            add("red-black GS (1,1)" + tag, mg_spec("boundary-layer", P, "red-black-gs", 1, 1),
                "diverge");
            add("zebra-line GS (2,2)" + tag, mg_spec("boundary-layer", P, "zebra", 2, 2),
                eps == 0.02 ? "5" : "diverge");
            add("alternating-zebra GS (1,1)" + tag,
                mg_spec("boundary-layer", P, "alternating-zebra", 1, 1), eps == 0.02 ? "4" : "3");
            add("line GaBP (0,2)" + tag, mg_spec("boundary-layer", P, "line-gabp", 0, 2), "5");
        }
    } else if (name == "inner-layer") {
        for (double eps : {0.015, 0.01}) {
            std::string tag = " [eps=" + std::to_string(eps) + "]";
            std::map<std::string, double> P{{"eps", eps}};
            add("red-black GaBP (3,0)" + tag, mg_spec("inner-layer", P, "red-black-gabp", 3, 0),
                eps == 0.015 ? "7" : "13");
            add("red-black GS (1,1)" + tag, mg_spec("inner-layer", P, "red-black-gs", 1, 1),
                "diverge");
            add("zebra-line GS (2,0)" + tag, mg_spec("inner-layer", P, "zebra", 2, 0),
                eps == 0.015 ? "9" : "diverge");
            add("alternating-zebra GS (1,1)" + tag,
                mg_spec("inner-layer", P, "alternating-zebra", 1, 1), eps == 0.015 ? "4" : "5");
            add("line GaBP (0,2)" + tag, mg_spec("inner-layer", P, "line-gabp", 0, 2), "8");
        }
    } else if (name == "stretched") {
        for (double eps : {1e-6, 8e-8}) {
            std::string tag = eps == 1e-6 ? " [eps=1e-6]" : " [eps=8e-8]";
            std::map<std::string, double> P{{"eps", eps}, {"p", 20.0}, {"eta", 0.5}};
            add("red-black GaBP (3,0)" + tag, mg_spec("stretched", P, "red-black-gabp", 3, 0),
                eps == 1e-6 ? "18" : "23");
            add("red-black GS (3,0)" + tag, mg_spec("stretched", P, "red-black-gs", 3, 0),
                eps == 1e-6 ? "68" : "97");
            add("zebra-line GS (4,0)" + tag, mg_spec("stretched", P, "zebra", 4, 0),
                eps == 1e-6 ? "50" : "72");
            add("alternating-zebra GS (1,1)" + tag,
                mg_spec("stretched", P, "alternating-zebra", 1, 1), eps == 1e-6 ? "10" : "12");
            add("line GaBP (0,2)" + tag, mg_spec("stretched", P, "line-gabp", 0, 2),
                eps == 1e-6 ? "20" : "23");
        }
    } else if (name == "bicgstab-compare") {
        add("V(6,6) 4-color GaBP (1,1)", mg_spec("general", {}, "4-color-gabp", 1, 1), "21");
        RunSpec bs;
        bs.problem = "general";
        bs.J = 6;
        bs.solver = "bicgstab";
        bs.max_iter = 5000;
        add("BiCGSTAB", bs, "255");
    } else if (name == "anisotropy-fig2") {
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            for (int sweeps : {2, 3}) {
                std::string tag = "sequential GaBP (" + std::to_string(sweeps) + "," +
                                  std::to_string(sweeps) + ") eps=" + std::to_string(eps);
                add(tag,
                    mg_spec("anisotropic", {{"eps", eps}}, "sequential-gabp", sweeps, sweeps, 6, 4),
                    sweeps == 2 ? "~15" : "~10");
            }
        }
    } else {
        throw std::invalid_argument("unknown suite '" + name + "'");
    }
    return rows;
}

int worker_threads() {
    const char* env = std::getenv("BELIEF_SOLVE_THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    return n < 1 ? 1 : n;
}

int run_suite(const std::string& name, const std::string& out_path) {
    auto rows = suite_rows(name);
    std::vector<SuiteRowResult> results(rows.size());
    const int threads = worker_threads();
    const bool fig2 = name == "anisotropy-fig2";

    std::vector<std::vector<double>> histories(rows.size());
    size_t next = 0;
    while (next < rows.size()) {
        size_t batch = std::min<size_t>(threads, rows.size() - next);
        std::vector<std::future<void>> futs;
        for (size_t k = 0; k < batch; ++k) {
            size_t i = next + k;
            futs.push_back(std::async(std::launch::async, [&, i] {
                SuiteRowResult& r = results[i];
                r.label = rows[i].label;
                r.reference = rows[i].reference;
                try {
                    RunResult rr = run_spec(rows[i].spec);
                    r.status = to_string(rr.report.status);
                    r.iterations = rr.report.iterations;
                    r.flops_per_n = rr.flops_per_n;
                    histories[i] = rr.report.residual_history;
                } catch (const std::exception& e) {
                    r.failed = true;
                    r.error = e.what();
                }
            }));
        }
        for (auto& f : futs) f.get();
        next += batch;
    }

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            std::cerr << "cannot open " << out_path << "\n";
            return 1;
        }
        os = &file;
    }
    if (fig2) {
        // residual histories, one row per cycle
        *os << "row,cycle,residual_inf\n";
        char buf[128];
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t c = 0; c < histories[i].size(); ++c) {
                std::snprintf(buf, sizeof(buf), "\"%s\",%zu,%.17g\n", results[i].label.c_str(), c,
                              histories[i][c]);
                *os << buf;
            }
    } else {
        *os << "solver,status,iterations,flops_per_n,reference_iterations\n";
        char buf[256];
        for (const auto& r : results) {
            if (r.failed) {
                std::snprintf(buf, sizeof(buf), "\"%s\",failed,,,%s\n", r.label.c_str(),
                              r.reference.c_str());
            } else {
                std::snprintf(buf, sizeof(buf), "\"%s\",%s,%d,%.17g,%s\n", r.label.c_str(),
                              r.status.c_str(), r.iterations, r.flops_per_n, r.reference.c_str());
            }
            *os << buf;
        }
    }

    // human-readable table on stderr so it never mixes with CSV
    std::cerr << "| solver | status | iterations | reference |\n|---|---|---|---|\n";
    for (const auto& r : results) {
        if (r.failed)
            std::cerr << "| " << r.label << " | failed: " << r.error << " | | " << r.reference
                      << " |\n";
        else
            std::cerr << "| " << r.label << " | " << r.status << " | " << r.iterations << " | "
                      << r.reference << " |\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative solver benchmarks on 2D elliptic model problems"};
    RunSpec spec;
    std::vector<std::string> params;
    std::string cycle, suite;

    app.add_option("--problem", spec.problem,
                   "general|mixed|boundary-layer|inner-layer|stretched|anisotropic|poisson");
    app.add_option("--param", params, "problem parameter k=v (repeatable)");
    app.add_option("--J", spec.J, "grid exponent: 2^J-1 interior points per axis");
    app.add_option("--solver", spec.solver,
                   "gabp|error-correction-gabp|generalized-gabp|bicgstab|jacobi|gs|red-black-gs|"
                   "4-color-gs|line-gs-x|line-gs-y|zebra|alternating-zebra|mg:<smoother>");
    app.add_option("--schedule", spec.schedule, "sequential|parallel-flood|red-black|four-color");
    app.add_option("--tol", spec.tol, "stopping threshold on the residual max-norm");
    app.add_option("--max-iter", spec.max_iter, "iteration / cycle cap");
    app.add_option("--cycle", cycle, "multigrid cycle V:J1,J2");
    app.add_option("--pre", spec.pre, "pre-smoothing sweeps (or inner sweeps)");
    app.add_option("--post", spec.post, "post-smoothing sweeps");
    app.add_option("--out", spec.out, "CSV output path (default: stdout)");
    app.add_option("--seed", spec.seed, "random seed recorded with the run");
    app.add_option("--suite", suite,
                   "standalone|mixed|boundary-layer|inner-layer|stretched|bicgstab-compare|"
                   "anisotropy-fig2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        for (const auto& kv : params) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--param expects k=v, got '" + kv + "'");
            spec.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
        if (!cycle.empty()) {
            int j1 = 0, j2 = 0;
            if (std::sscanf(cycle.c_str(), "V:%d,%d", &j1, &j2) != 2 || j1 <= 0 || j2 <= 0)
                throw std::invalid_argument("--cycle expects V:J1,J2");
            spec.cycle_J1 = j1;
            spec.cycle_J2 = j2;
        }
        if (!suite.empty()) return run_suite(suite, spec.out);

        RunResult res = run_spec(spec);
        if (!spec.out.empty()) {
            std::ofstream f(spec.out);
            if (!f) throw std::runtime_error("cannot open " + spec.out);
            write_history_csv(res.report, f);
        } else {
            write_history_csv(res.report, std::cout);
        }
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "status=%s iterations=%d flops_per_n=%.17g final_residual=%.17g n=%d\n",
                      to_string(res.report.status), res.report.iterations, res.flops_per_n,
                      res.report.residual_history.empty() ? 0.0
                                                          : res.report.residual_history.back(),
                      res.n);
        std::cerr << buf;
        if (!res.report.detail.empty()) std::cerr << "detail: " << res.report.detail << "\n";
        return exit_code(res.report.status);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
