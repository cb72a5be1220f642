#include "wrsn/baselines.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>

#include "wrsn/text.hpp"

namespace wrsn {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

bool is_p3(const Environment& env) { return env.variant() == Variant::P3_KCoverage; }

// a strictly better than b
bool better(const Environment& env, const ScheduleState& a, const ScheduleState& b) {
    if (is_p3(env)) {
        const bool fa = a.feasible && env.coverage_satisfied(a);
        const bool fb = b.feasible && env.coverage_satisfied(b);
        if (fa != fb) return fa;
        return a.tour_distance() < b.tour_distance();
    }
    const double oa = env.objective(a);
    const double ob = env.objective(b);
    if (oa != ob) return oa > ob;
    return a.tour_distance() < b.tour_distance();
}

// Appendable successors of s with their resulting states.
std::vector<std::pair<int, ScheduleState>> successors(const Environment& env, const ScheduleState& s) {
    std::vector<std::pair<int, ScheduleState>> out;
    if (!s.feasible) return out;
    if (is_p3(env) && env.coverage_satisfied(s)) return out;
    for (int v = 1; v < env.vertex_count(); ++v) {
        if (s.contains(v)) continue;
        if (is_p3(env) && env.coverage_gain(s, v) == 0) continue;
        ScheduleState next = s;
        env.extend(next, v);
        if (!env.within_limits(next)) continue;
        out.emplace_back(v, std::move(next));
    }
    return out;
}

}  // namespace

SolveResult summarize(const Environment& env, std::string solver, ScheduleState state, double wall_ms) {
    SolveResult r;
    r.solver = std::move(solver);
    r.feasible = env.within_limits(state) && (!is_p3(env) || env.coverage_satisfied(state));
    r.objective = env.objective(state);
    r.distance = state.tour_distance();
    r.energy = env.total_energy(state);
    r.wall_ms = wall_ms;
    r.state = std::move(state);
    return r;
}

SolveResult brute_force(const ProblemInstance& inst, const BruteForceOptions& opt) {
    const auto t0 = Clock::now();
    EnvOptions eo;
    eo.p3_grid_dt = opt.grid_dt;
    const Environment env(inst, eo);
    const int R = env.vertex_count() - 1;
    if (R > opt.max_requesters) {
        throw ResourceLimit("brute force refuses " + std::to_string(R) + " requesters (limit " +
                            std::to_string(opt.max_requesters) + ")");
    }
    ScheduleState best = env.initial_state();
    bool have = !is_p3(env) || env.coverage_satisfied(best);
    const bool p3 = is_p3(env);

    std::function<void(const ScheduleState&)> dfs = [&](const ScheduleState& s) {
        if (p3) {
            if (have && s.tour_distance() >= best.tour_distance()) return;
            if (env.coverage_satisfied(s)) {
                best = s;
                have = true;
                return;
            }
        } else {
            if (better(env, s, best)) best = s;
            double bound = env.objective(s);
            for (int v = 1; v <= R; ++v) {
                if (s.contains(v)) continue;
                bound += inst.variant == Variant::P1_MobilePath ? 1.0 : env.graph().vertex(v).prize.value_or(0);
            }
            if (bound < env.objective(best)) return;
        }
        if (!s.feasible) return;
        for (int v = 1; v <= R; ++v) {
            if (s.contains(v)) continue;
            ScheduleState next = s;
            env.extend(next, v);
            if (!env.within_limits(next)) continue;
            dfs(next);
        }
    };
    dfs(env.initial_state());
    return summarize(env, "brute", std::move(best), elapsed_ms(t0));
}

SolveResult greedy_solve(const Environment& env) {
    const auto t0 = Clock::now();
    ScheduleState s = env.initial_state();
    while (true) {
        auto next = successors(env, s);
        if (next.empty()) break;
        auto it = std::min_element(next.begin(), next.end(), [](const auto& a, const auto& b) {
            return a.second.visits.back().leg < b.second.visits.back().leg;
        });
        s = std::move(it->second);
    }
    return summarize(env, "greedy", std::move(s), elapsed_ms(t0));
}

SolveResult greedy_solve(const ProblemInstance& inst) { return greedy_solve(Environment(inst)); }

SolveResult random_solve(const Environment& env, std::uint64_t seed, int restarts) {
    if (restarts < 1) throw ValidationError("random baseline needs at least one restart");
    const auto t0 = Clock::now();
    std::mt19937_64 rng(seed);
    ScheduleState best;
    bool have = false;
    for (int r = 0; r < restarts; ++r) {
        ScheduleState s = env.initial_state();
        while (true) {
            auto next = successors(env, s);
            if (next.empty()) break;
            std::uniform_int_distribution<std::size_t> pick(0, next.size() - 1);
            s = std::move(next[pick(rng)].second);
        }
        if (!have || better(env, s, best)) {
            best = std::move(s);
            have = true;
        }
    }
    return summarize(env, "random", std::move(best), elapsed_ms(t0));
}

SolveResult random_solve(const ProblemInstance& inst, std::uint64_t seed, int restarts) {
    return random_solve(Environment(inst), seed, restarts);
}

namespace {

// Prim's algorithm from the depot (vertex 0). Each depot child opens a
// branch; a non-depot attachment must keep its branch demand within cap.
std::vector<int> spanning_preorder(const Environment& env, double cap) {
    const ChargingGraph& g = env.graph();
    const int V = g.vertex_count();
    std::vector<double> demand(V, 0.0);
    for (int v = 1; v < V; ++v) demand[v] = env.node_of(v).capacity - env.node_of(v).residual;
    std::vector<int> parent(V, -1), branch(V, -1);
    std::vector<double> branch_load(V, 0.0);
    std::vector<char> in(V, 0);
    in[0] = 1;
    for (int added = 1; added < V; ++added) {
        int bu = -1, bv = -1;
        double bw = kInf;
        for (int u = 0; u < V; ++u) {
            if (!in[u]) continue;
            for (int v = 1; v < V; ++v) {
                if (in[v]) continue;
                if (u != 0 && branch_load[branch[u]] + demand[v] > cap) continue;
                const double w = g.weight(u, v);
                if (w < bw) {
                    bw = w;
                    bu = u;
                    bv = v;
                }
            }
        }
        in[bv] = 1;
        parent[bv] = bu;
        branch[bv] = bu == 0 ? bv : branch[bu];
        branch_load[branch[bv]] += demand[bv];
    }
    std::vector<std::vector<int>> children(V);
    for (int v = 1; v < V; ++v) children[parent[v]].push_back(v);
    std::vector<int> order;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        if (u != 0) order.push_back(u);
        for (auto it = children[u].rbegin(); it != children[u].rend(); ++it) stack.push_back(*it);
    }
    return order;
}

SolveResult tree_tour(const ProblemInstance& inst, double cap, const std::string& name) {
    if (inst.variant != Variant::P2_FullyChargingReward) throw ValidationError(name + " applies to P2 instances only");
    const auto t0 = Clock::now();
    const Environment env(inst);
    ScheduleState s = env.initial_state();
    for (int v : spanning_preorder(env, cap)) {
        ScheduleState next = s;
        env.extend(next, v);
        if (env.within_limits(next)) s = std::move(next);
    }
    return summarize(env, name, std::move(s), elapsed_ms(t0));
}

}  // namespace

SolveResult mst_solve(const ProblemInstance& inst) { return tree_tour(inst, kInf, "mst"); }

SolveResult cmst_solve(const ProblemInstance& inst, double capacity_fraction) {
    if (!inst.charger.energy_capacity) throw ValidationError("cmst needs an energy capacity");
    return tree_tour(inst, capacity_fraction * *inst.charger.energy_capacity, "cmst");
}

double pheromone_delta(bool on_best_tour, double best_length) { return on_best_tour ? 1.0 / best_length : 0.0; }

double pheromone_update(double tau_prev, double delta, double theta) { return (1.0 - theta) * tau_prev + theta * delta; }

AcsResult acs_solve(const ProblemInstance& inst, const AcsParams& P) {
    if (inst.variant != Variant::P3_KCoverage) throw ValidationError("acs applies to P3 instances only");
    if (P.agents < 1 || P.iterations < 1) throw ValidationError("acs needs at least one agent and one iteration");
    if (!(P.theta_global > 0 && P.theta_global < 1 && P.theta_local > 0 && P.theta_local < 1)) {
        throw ValidationError("acs decay parameters must lie in (0, 1)");
    }
    const auto t0 = Clock::now();
    const Environment env(inst);
    const ChargingGraph& g = env.graph();
    const int V = g.vertex_count();

    double tau0 = P.tau0;
    if (tau0 <= 0) {
        const SolveResult gr = greedy_solve(env);
        const double L = gr.feasible && gr.distance > 0 ? gr.distance : inst.area.diameter();
        tau0 = 1.0 / (std::max(1, V - 1) * L);
    }
    std::vector<double> tau(static_cast<std::size_t>(V) * V, tau0);
    auto T = [&](int u, int v) -> double& { return tau[static_cast<std::size_t>(u) * V + v]; };
    auto eta = [&](int u, int v) { return 1.0 / std::max(g.weight(u, v), 1e-9); };

    std::mt19937_64 rng(P.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    AcsResult out;
    ScheduleState best = env.initial_state();
    bool have = env.coverage_satisfied(best);

    for (int it = 0; it < P.iterations && !env.coverage_satisfied(env.initial_state()); ++it) {
        ScheduleState iter_best;
        bool iter_have = false;
        for (int a = 0; a < P.agents; ++a) {
            ScheduleState s = env.initial_state();
            int cur = 0;
            while (!env.coverage_satisfied(s)) {
                auto next = successors(env, s);
                if (next.empty()) break;  // stuck
                std::vector<double> score(next.size());
                for (std::size_t i = 0; i < next.size(); ++i) {
                    const int v = next[i].first;
                    score[i] = std::pow(T(cur, v), P.a) * std::pow(eta(cur, v), P.b);
                }
                std::size_t pick = 0;
                if (coin(rng) < P.q0) {
                    pick = static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin());
                } else {
                    std::discrete_distribution<std::size_t> roulette(score.begin(), score.end());
                    pick = roulette(rng);
                }
                const int v = next[pick].first;
                T(cur, v) = pheromone_update(T(cur, v), tau0, P.theta_local);
                s = std::move(next[pick].second);
                cur = v;
            }
            if (!s.feasible || !env.coverage_satisfied(s)) continue;
            if (!iter_have || s.tour_distance() < iter_best.tour_distance()) {
                iter_best = s;
                iter_have = true;
            }
        }
        if (iter_have) {
            const double L = iter_best.tour_distance();
            std::vector<char> on(static_cast<std::size_t>(V) * V, 0);
            const auto order = iter_best.order();
            int prev = 0;
            for (int v : order) {
                on[static_cast<std::size_t>(prev) * V + v] = 1;
                prev = v;
            }
            on[static_cast<std::size_t>(prev) * V] = 1;
            for (std::size_t e = 0; e < tau.size(); ++e) {
                tau[e] = pheromone_update(tau[e], pheromone_delta(on[e] != 0, L), P.theta_global);
            }
            if (!have || L < best.tour_distance()) {
                best = iter_best;
                have = true;
            }
        }
        out.incumbent.push_back(have ? best.tour_distance() : kInf);
    }
    out.result = summarize(env, "acs", std::move(best), elapsed_ms(t0));
    return out;
}

SolveResult dp_kcoverage(const ProblemInstance& inst, double dt, const DpOptions& opt) {
    const auto t0 = Clock::now();
    EnvOptions eo;
    eo.p3_grid_dt = dt;
    const Environment env(inst, eo);
    const TimeExpandedDAG dag(inst, dt, opt.dag);
    const int R = dag.requester_count();
    if (R > 64) throw ResourceLimit("color-coding supports at most 64 requesters");

    // Regions that still need charging, as requester bit masks.
    const SubregionTable& table = env.initial_table();
    std::unordered_map<int, int> color_of;
    for (int r = 0; r < R; ++r) color_of[inst.nodes[dag.requester_node(r)].id] = r;
    std::vector<std::uint64_t> masks;
    std::vector<int> need;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table.T[i] <= 0) continue;
        std::uint64_t m = 0;
        for (int id : table.subregions[i].covering_ids) {
            if (auto it = color_of.find(id); it != color_of.end()) m |= std::uint64_t{1} << it->second;
        }
        masks.push_back(m);
        need.push_back(table.T[i]);
    }
    auto remaining = [&](std::size_t i, std::uint64_t C) { return need[i] - std::popcount(masks[i] & C); };
    auto done = [&](std::uint64_t C) {
        for (std::size_t i = 0; i < masks.size(); ++i) {
            if (remaining(i, C) > 0) return false;
        }
        return true;
    };
    auto helps = [&](std::uint64_t C, int r) {
        const std::uint64_t bit = std::uint64_t{1} << r;
        for (std::size_t i = 0; i < masks.size(); ++i) {
            if ((masks[i] & bit) && remaining(i, C) > 0) return true;
        }
        return false;
    };

    if (done(0)) return summarize(env, "dp", env.initial_state(), elapsed_ms(t0));

    struct Entry {
        double dist;
        int pred_vertex;
        std::uint64_t pred_set;
    };
    std::vector<std::unordered_map<std::uint64_t, Entry>> entries(dag.vertex_count());
    std::size_t total = 0;
    auto offer = [&](int w, std::uint64_t C, Entry e) {
        auto [it, fresh] = entries[w].try_emplace(C, e);
        if (fresh) {
            if (++total > opt.max_entries) {
                throw ResourceLimit("color-coding table exceeded " + std::to_string(opt.max_entries) + " entries");
            }
        } else if (e.dist < it->second.dist) {
            it->second = e;
        }
    };

    for (int w : dag.out(0)) {
        const int r = dag.clique_of(w);
        if (helps(0, r)) offer(w, std::uint64_t{1} << r, {dag.edge_length(0, w), 0, 0});
    }
    double best = kInf;
    int best_vertex = -1;
    std::uint64_t best_set = 0;
    const Point depot = inst.charger.depot;
    for (int u : dag.topological_order()) {
        if (u == 0) continue;
        for (const auto& [C, e] : entries[u]) {
            if (done(C)) {
                const double total_dist = e.dist + distance(dag.position(u), depot);
                if (total_dist < best) {
                    best = total_dist;
                    best_vertex = u;
                    best_set = C;
                }
                continue;
            }
            for (int w : dag.out(u)) {
                const int r = dag.clique_of(w);
                if (C & (std::uint64_t{1} << r)) continue;
                if (!helps(C, r)) continue;
                offer(w, C | (std::uint64_t{1} << r), {e.dist + dag.edge_length(u, w), u, C});
            }
        }
    }
    if (best_vertex < 0) {
        SolveResult r = summarize(env, "dp", env.initial_state(), elapsed_ms(t0));
        r.feasible = false;
        r.objective = -kInf;
        return r;
    }
    std::vector<int> order;
    int u = best_vertex;
    std::uint64_t C = best_set;
    while (u != 0) {
        order.push_back(dag.clique_of(u) + 1);
        const Entry& e = entries[u].at(C);
        u = e.pred_vertex;
        C = e.pred_set;
    }
    std::reverse(order.begin(), order.end());
    return summarize(env, "dp", env.replay(order), elapsed_ms(t0));
}

void write_results_header(std::ostream& os) { os << "solver,feasible,objective,distance_m,energy_J,wall_ms\n"; }

void write_result_row(std::ostream& os, const SolveResult& r) {
    os << r.solver << ',' << (r.feasible ? 1 : 0) << ',' << fmt_double(r.objective) << ',' << fmt_double(r.distance)
       << ',' << fmt_double(r.energy) << ',' << fmt_double(r.wall_ms) << '\n';
}

}  // namespace wrsn
