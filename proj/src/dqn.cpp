#include "wrsn/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "wrsn/text.hpp"

namespace wrsn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ValidationError("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(t));
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, std::mt19937_64& rng) const {
    batch = std::min(batch, items_.size());
    std::vector<std::size_t> idx(items_.size());
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates.
    std::vector<const Transition*> out;
    for (std::size_t i = 0; i < batch; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
        out.push_back(&items_[idx[i]]);
    }
    return out;
}

TrainConfig TrainConfig::defaults(Variant v) {
    TrainConfig c;
    c.gamma = v == Variant::P3_KCoverage ? 0.99 : 1.0;
    return c;
}

double TrainConfig::epsilon_at(int episode) const {
    const double span = epsilon_decay_fraction * episodes;
    const double f = span > 0 ? std::min(1.0, episode / span) : 1.0;
    if (f >= 1.0) return epsilon_end;
    return epsilon_start + (epsilon_end - epsilon_start) * f;
}

int select_action(std::span<const int> actions, const Eigen::VectorXd& q, double epsilon, std::mt19937_64& rng) {
    if (actions.empty()) return -1;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (epsilon > 0 && coin(rng) < epsilon) {
        std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
        return actions[pick(rng)];
    }
    int best = -1;
    for (int v : actions) {
        if (best < 0 || q(v) > q(best) || (q(v) == q(best) && v < best)) best = v;
    }
    return best;
}

double n_step_target(double ret, bool terminal, std::span<const double> successor_q, double gamma, int steps) {
    if (terminal || successor_q.empty()) return ret;
    return ret + std::pow(gamma, steps) * *std::max_element(successor_q.begin(), successor_q.end());
}

double reward_scale(const ProblemInstance& inst) {
    switch (inst.variant) {
        case Variant::P1_MobilePath: return 1.0;
        case Variant::P2_FullyChargingReward: {
            const double n = static_cast<double>(inst.size());
            return 1.0 / std::max(1.0, n * n);
        }
        case Variant::P3_KCoverage: return 1.0 / inst.area.diameter();
    }
    return 1.0;
}

namespace {

// Leftover coverage deficit ends a stuck P3 episode with this much extra
// (scaled) cost per missing unit, so that stopping early never looks cheap.
constexpr double kStuckPenalty = 1.0;

struct Step {
    Snapshot state;
    int action;
    double reward;
};

double max_q(const Environment& env, const ScheduleState& s, const EmbeddingParams& params, std::vector<int>& acts) {
    acts = env.actions(s);
    if (acts.empty()) return 0.0;
    const Eigen::VectorXd q = q_values(embed_graph(build_input(env, s), params), params);
    double best = -std::numeric_limits<double>::infinity();
    for (int v : acts) best = std::max(best, q(v));
    return best;
}

}  // namespace

double batch_loss(std::span<const LossTerm> terms, const EmbeddingParams& params, EmbeddingParams* grad) {
    if (terms.empty()) return 0.0;
    const double m = static_cast<double>(terms.size());
    double loss = 0.0;
    for (const auto& t : terms) {
        double q;
        if (grad) {
            EmbeddingParams g = EmbeddingParams::zeros_like(params);
            q = accumulate_gradient(t.input, t.action, 1.0, params, g);
            grad->axpy(2.0 * (q - t.target) / m, g);
        } else {
            q = q_value(embed_graph(t.input, params), t.action, params);
        }
        loss += (q - t.target) * (q - t.target);
    }
    return loss / m;
}

TrainResult train(std::span<const ProblemInstance> instances, const TrainConfig& cfg,
                  const std::function<void(const TrainLogRow&)>& on_episode) {
    if (instances.empty()) throw ValidationError("training needs at least one instance");
    if (cfg.batch_size < 1 || static_cast<std::size_t>(cfg.batch_size) > cfg.capacity) {
        throw ValidationError("batch size must be in [1, replay capacity]");
    }
    if (cfg.n_step < 1) throw ValidationError("n_step must be >= 1");
    std::vector<Environment> envs;
    envs.reserve(instances.size());
    for (const auto& inst : instances) envs.emplace_back(inst);

    TrainResult result;
    result.params = EmbeddingParams::random(cfg.embed_dim, kFeatureWidth, cfg.rounds, cfg.seed, cfg.init_scale);
    EmbeddingParams& params = result.params;
    ReplayBuffer buffer(cfg.capacity);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<int> scratch;

    auto restore = [&](const Snapshot& snap) { return envs[snap.instance].replay(snap.order, snap.rejected); };

    auto update = [&]() -> double {
        const auto batch = buffer.sample(cfg.batch_size, rng);
        std::vector<LossTerm> terms;
        terms.reserve(batch.size());
        for (const Transition* t : batch) {
            const Environment& env = envs[t->state.instance];
            double y = t->ret;
            if (!t->terminal) {
                const double succ = max_q(env, restore(t->next), params, scratch);
                y = n_step_target(t->ret, scratch.empty(), std::span<const double>(&succ, 1), cfg.gamma, t->steps);
            }
            terms.push_back({build_input(env, restore(t->state)), t->action, y});
        }
        EmbeddingParams grad = EmbeddingParams::zeros_like(params);
        const double loss = batch_loss(terms, params, &grad);
        if (!std::isfinite(loss)) throw Divergence("training loss became non-finite");
        double scale = cfg.learning_rate;
        if (cfg.grad_clip > 0) {
            double norm2 = 0.0;
            for (const auto& m : grad.theta) norm2 += m.squaredNorm();
            const double norm = std::sqrt(norm2);
            if (norm > cfg.grad_clip) scale *= cfg.grad_clip / norm;
        }
        params.axpy(-scale, grad);
        if (!params.all_finite()) throw Divergence("parameters became non-finite");
        return loss;
    };

    for (int ep = 0; ep < cfg.episodes; ++ep) {
        const int which = ep % static_cast<int>(envs.size());
        const Environment& env = envs[which];
        const double scale = reward_scale(env.instance());
        const double eps = cfg.epsilon_at(ep);
        ScheduleState s = env.initial_state();
        std::vector<Step> steps;
        double loss_sum = 0.0;
        int updates = 0;

        auto snapshot = [&](const ScheduleState& st) { return Snapshot{which, st.order(), st.rejected}; };
        auto emit = [&](std::size_t from, const Snapshot& next, bool terminal) {
            double ret = 0.0;
            double disc = 1.0;
            const std::size_t to = std::min(steps.size(), from + static_cast<std::size_t>(cfg.n_step));
            for (std::size_t i = from; i < to; ++i) {
                ret += disc * steps[i].reward;
                disc *= cfg.gamma;
            }
            buffer.push({steps[from].state, steps[from].action, ret, static_cast<int>(to - from), next, terminal});
        };

        while (true) {
            const auto acts = env.actions(s);
            if (acts.empty()) break;
            const Eigen::VectorXd q = q_values(embed_graph(build_input(env, s), params), params);
            const int a = select_action(acts, q, eps, rng);
            StepOutcome out = env.step(s, a);
            double r = out.reward * scale;
            if (env.variant() == Variant::P3_KCoverage && out.terminal && !env.coverage_satisfied(out.next_state)) {
                const auto& T = out.next_state.coverage_T;
                r -= kStuckPenalty * std::accumulate(T.begin(), T.end(), 0);
            }
            steps.push_back({snapshot(s), a, r});
            s = std::move(out.next_state);
            if (steps.size() >= static_cast<std::size_t>(cfg.n_step) && !out.terminal) {
                emit(steps.size() - cfg.n_step, snapshot(s), false);
            }
            if (out.terminal) break;
            if (buffer.size() >= std::max<std::size_t>(cfg.warmup, cfg.batch_size)) {
                loss_sum += update();
                ++updates;
            }
        }
        // Remaining transitions reach the end of the episode.
        const std::size_t pending = std::min(steps.size(), static_cast<std::size_t>(cfg.n_step));
        const Snapshot last = snapshot(s);
        for (std::size_t i = steps.size() - pending; i < steps.size(); ++i) emit(i, last, true);
        if (buffer.size() >= std::max<std::size_t>(cfg.warmup, cfg.batch_size)) {
            loss_sum += update();
            ++updates;
        }

        TrainLogRow row{ep, env.objective(s), eps,
                        updates ? loss_sum / updates : std::numeric_limits<double>::quiet_NaN()};
        result.log.push_back(row);
        if (on_episode) on_episode(row);
    }
    return result;
}

ScheduleState greedy_rollout(const Environment& env, const EmbeddingParams& params) {
    std::mt19937_64 unused(0);
    ScheduleState s = env.initial_state();
    while (true) {
        const auto acts = env.actions(s);
        if (acts.empty()) return s;
        const Eigen::VectorXd q = q_values(embed_graph(build_input(env, s), params), params);
        StepOutcome out = env.step(s, select_action(acts, q, 0.0, unused));
        s = std::move(out.next_state);
        if (out.terminal) return s;
    }
}

ScheduleState greedy_rollout(const ProblemInstance& inst, const EmbeddingParams& params) {
    return greedy_rollout(Environment(inst), params);
}

void write_train_log_csv(std::ostream& os, std::span<const TrainLogRow> rows) {
    os << "episode,objective,epsilon,loss_mean\n";
    for (const auto& r : rows) {
        os << r.episode << ',' << fmt_double(r.objective) << ',' << fmt_double(r.epsilon) << ','
           << (std::isnan(r.loss_mean) ? std::string("nan") : fmt_double(r.loss_mean)) << '\n';
    }
}

}  // namespace wrsn
