#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "wrsn/embed.hpp"

namespace wrsn {

// Compact state: enough to rebuild a ScheduleState by replay.
struct Snapshot {
    int instance = 0;
    std::vector<int> order;
    std::vector<int> rejected;
};

struct Transition {
    Snapshot state;
    int action = 0;
    double ret = 0.0;  // discounted n-step return
    int steps = 1;     // number of rewards folded into ret
    Snapshot next;
    bool terminal = false;
};

// Ring buffer; once full, the oldest transition is overwritten.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return items_[i]; }  // 0 = oldest
    // Uniform without replacement.
    std::vector<const Transition*> sample(std::size_t batch, std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::deque<Transition> items_;
};

struct TrainConfig {
    double gamma = 1.0;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_fraction = 0.8;  // of all episodes
    int n_step = 1;
    int batch_size = 32;
    double learning_rate = 1e-3;
    int episodes = 200;
    std::size_t capacity = 10000;
    std::size_t warmup = 500;
    int embed_dim = 64;
    int rounds = 4;
    double init_scale = 0.01;
    double grad_clip = 0.0;  // max norm of one update; 0 disables
    std::uint64_t seed = 1;

    static TrainConfig defaults(Variant v);
    double epsilon_at(int episode) const;
};

struct TrainLogRow {
    int episode = 0;
    double objective = 0.0;
    double epsilon = 0.0;
    double loss_mean = 0.0;  // NaN when no update happened in the episode
};

struct TrainResult {
    EmbeddingParams params;
    std::vector<TrainLogRow> log;
};

// Greedy with probability 1 - epsilon (ties to the lowest vertex id),
// otherwise uniform over the action set. q is indexed by vertex id.
// Returns -1 on an empty action set.
int select_action(std::span<const int> actions, const Eigen::VectorXd& q, double epsilon, std::mt19937_64& rng);

// y = r + gamma^steps * max successor Q, or r when terminal.
double n_step_target(double ret, bool terminal, std::span<const double> successor_q, double gamma, int steps = 1);

struct LossTerm {
    GraphInput input;
    int action = 0;
    double target = 0.0;
};

// Mean of (Q(s, a) - y)^2 over the terms; adds its gradient into grad when given.
double batch_loss(std::span<const LossTerm> terms, const EmbeddingParams& params, EmbeddingParams* grad = nullptr);

// Learning-signal scale applied to environment rewards: 1/n^2 for prizes,
// 1/diameter for distances.
double reward_scale(const ProblemInstance& inst);

TrainResult train(std::span<const ProblemInstance> instances, const TrainConfig& cfg,
                  const std::function<void(const TrainLogRow&)>& on_episode = {});

// epsilon = 0 rollout until the action set is empty.
ScheduleState greedy_rollout(const Environment& env, const EmbeddingParams& params);
ScheduleState greedy_rollout(const ProblemInstance& inst, const EmbeddingParams& params);

// episode,objective,epsilon,loss_mean
void write_train_log_csv(std::ostream& os, std::span<const TrainLogRow> rows);

}  // namespace wrsn
