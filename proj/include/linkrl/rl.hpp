#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "linkrl/env.hpp"
#include "linkrl/net.hpp"

namespace linkrl::dqn {

struct Transition {
  env::StateVector state{};
  int action = 0;
  double reward = 0.0;
  env::StateVector next_state{};  // zero-filled terminal marker when done
  bool done = false;
};

// Fixed-capacity ring store with uniform sampling over current contents.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity);

  void push(const Transition& t);
  size_t size() const { return store_.size(); }
  size_t capacity() const { return capacity_; }
  uint64_t inserted() const { return inserted_; }

  // i = 0 is the oldest surviving transition.
  const Transition& at(size_t i) const;

  std::vector<size_t> sample_indices(size_t n, std::mt19937_64& rng) const;

 private:
  size_t capacity_;
  size_t head_ = 0;  // next slot to overwrite once full
  uint64_t inserted_ = 0;
  std::vector<Transition> store_;
};

struct TrainerConfig {
  std::vector<int> hidden{128, 128, 128, 128, 128, 128, 128};  // teacher 7x128
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_fraction = 0.6;  // linear decay over this share of the budget
  double learning_rate = 1e-4;
  int batch_size = 256;
  long target_update_period = 2000;  // gradient steps
  size_t replay_capacity = 200000;
  long total_env_steps = 300000;
  int n_actors = 4;
  long learn_every = 4;           // env steps per gradient step
  long publish_period = 500;      // gradient steps per actor snapshot
  long episodes_per_scenario = 50;
  long warmup_env_steps = 1000;   // replay fill before learning starts
  long checkpoint_env_steps = 50000;  // 0 disables periodic checkpoints
  long log_period = 500;          // gradient steps per training-log row
  long eval_episodes = 100;       // greedy episodes behind the eval_reward column
  double alpha = 0.5;             // retransmission penalty fed to the env
  uint64_t seed = 1;

  void validate() const;
};

// Epsilon-greedy over the net's Q-values; greedy ties resolve to the lowest
// index. Throws std::domain_error for epsilon outside [0,1].
int act_epsilon_greedy(const net::DenseNet& net, const env::StateVector& s, double epsilon,
                       std::mt19937_64& rng);

// Vanilla DQN targets: y = r for terminal transitions, else
// r + gamma * max_a' Q_target(s')[a'].
std::vector<double> td_targets(const std::vector<Transition>& batch,
                               const net::DenseNet& target_net, double gamma);

struct TrainLogRow {
  long env_step = 0;
  double mean_loss = 0.0;
  double mean_q = 0.0;
  double epsilon = 0.0;
  double eval_reward = 0.0;
};

std::string train_log_csv(const std::vector<TrainLogRow>& log);

struct TeacherResult {
  net::DenseNet net;
  ReplayBuffer replay;
  std::vector<TrainLogRow> log;
};

// Test instrumentation; every hook may be empty.
struct TrainHooks {
  std::function<void(long grad_step, uint64_t online_hash, uint64_t target_hash)> on_target_update;
};

// Actor-learner DQN training over domain-randomized scenarios. In
// deterministic mode a single actor interleaves with the learner on a fixed
// 4:1 env-step:gradient-step schedule and the run is bit-reproducible;
// otherwise n_actors threads feed one learner through a bounded queue.
// checkpoint_dir, when non-empty, receives periodic model snapshots.
TeacherResult train_teacher(const TrainerConfig& cfg, const linksim::RandomizationRanges& ranges,
                            bool deterministic = false, const std::string& checkpoint_dir = "",
                            const TrainHooks& hooks = {},
                            const linksim::BlerModel& bler_model = {});

// Replay dump for offline reuse (distillation from replay memory).
void save_replay(const ReplayBuffer& replay, const std::string& path);
ReplayBuffer load_replay(const std::string& path);

}  // namespace linkrl::dqn
