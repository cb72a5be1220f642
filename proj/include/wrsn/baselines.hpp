#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wrsn/envs.hpp"

namespace wrsn {

struct SolveResult {
    std::string solver;
    ScheduleState state;
    bool feasible = false;
    double objective = 0.0;
    double distance = 0.0;  // m, closing leg included
    double energy = 0.0;    // J, charge + xi * distance
    double wall_ms = 0.0;
};

// Fills feasible/objective/distance/energy from the state: feasible means
// every deadline met, the budget/timespan respected and, for P3, coverage
// restored.
SolveResult summarize(const Environment& env, std::string solver, ScheduleState state, double wall_ms = 0.0);

struct BruteForceOptions {
    int max_requesters = 10;
    double grid_dt = 0.0;  // P3 start-time grid; match dp_kcoverage's dt to compare
};

// Depth-first search over visit orders (append semantics), pruned by the
// stop function and by bounds. Throws ResourceLimit above max_requesters.
SolveResult brute_force(const ProblemInstance& inst, const BruteForceOptions& opt = {});

// Nearest feasible vertex appended each step (P3: only vertices that
// still decrease T).
SolveResult greedy_solve(const Environment& env);
SolveResult greedy_solve(const ProblemInstance& inst);

// Uniform random feasible successor each step, best of `restarts` runs.
SolveResult random_solve(const Environment& env, std::uint64_t seed, int restarts = 100);
SolveResult random_solve(const ProblemInstance& inst, std::uint64_t seed, int restarts = 100);

// P2 only: spanning tree rooted at the depot, preorder tour, then skip
// every vertex that would break the energy budget.
SolveResult mst_solve(const ProblemInstance& inst);
// Same with each depot subtree's charge demand capped at capacity_fraction * IE.
SolveResult cmst_solve(const ProblemInstance& inst, double capacity_fraction = 0.5);

struct AcsParams {
    int agents = 20;
    int iterations = 200;
    double theta_global = 0.1;
    double theta_local = 0.1;
    double tau0 = 0.0;  // 0: 1 / (n * greedy tour length)
    double a = 1.0;     // pheromone exponent
    double b = 2.0;     // inverse-distance exponent
    double q0 = 0.9;    // exploitation probability
    std::uint64_t seed = 1;
};

// Delta tau_ij: 1/L* on edges of the iteration-best tour, 0 elsewhere.
double pheromone_delta(bool on_best_tour, double best_length);
// tau(t) = (1 - theta) tau(t-1) + theta * delta.
double pheromone_update(double tau_prev, double delta, double theta);

struct AcsResult {
    SolveResult result;
    std::vector<double> incumbent;  // best feasible length after each iteration (inf before the first)
};

AcsResult acs_solve(const ProblemInstance& inst, const AcsParams& params = {});

struct DpOptions {
    std::size_t max_entries = 20'000'000;
    DagOptions dag;
};

// Color-coding dynamic program on the time-expanded DAG; the returned state
// is the grid replay of the recovered path. Infeasible result when no path
// restores coverage.
SolveResult dp_kcoverage(const ProblemInstance& inst, double dt, const DpOptions& opt = {});

// solver,feasible,objective,distance_m,energy_J,wall_ms
void write_results_header(std::ostream& os);
void write_result_row(std::ostream& os, const SolveResult& r);

}  // namespace wrsn
