#include "linkrl/rl.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "linkrl/common.hpp"
#include "linkrl/mcs.hpp"

namespace linkrl::dqn {

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
  store_.reserve(std::min<size_t>(capacity_, 1 << 20));
}

void ReplayBuffer::push(const Transition& t) {
  if (store_.size() < capacity_) {
    store_.push_back(t);
  } else {
    store_[head_] = t;
    head_ = (head_ + 1) % capacity_;
  }
  inserted_ += 1;
}

const Transition& ReplayBuffer::at(size_t i) const {
  if (i >= store_.size()) throw std::out_of_range("replay index out of range");
  if (store_.size() < capacity_) return store_[i];
  return store_[(head_ + i) % capacity_];  // oldest first
}

std::vector<size_t> ReplayBuffer::sample_indices(size_t n, std::mt19937_64& rng) const {
  if (store_.empty()) throw std::logic_error("cannot sample from an empty replay buffer");
  std::vector<size_t> idx(n);
  for (auto& i : idx) i = static_cast<size_t>(rng() % store_.size());
  return idx;
}

void TrainerConfig::validate() const {
  if (hidden.empty()) throw std::invalid_argument("at least one hidden layer required");
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("hidden widths must be >= 1");
  }
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must lie in [0,1]");
  if (epsilon_start < 0 || epsilon_start > 1 || epsilon_end < 0 || epsilon_end > 1) {
    throw std::invalid_argument("epsilon bounds must lie in [0,1]");
  }
  if (learning_rate <= 0) throw std::invalid_argument("learning rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (target_update_period < 1) throw std::invalid_argument("target update period must be >= 1");
  if (replay_capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  if (total_env_steps < 0) throw std::invalid_argument("env-step budget must be >= 0");
  if (n_actors < 1) throw std::invalid_argument("need at least one actor");
  if (learn_every < 1) throw std::invalid_argument("learn_every must be >= 1");
  if (episodes_per_scenario < 1) throw std::invalid_argument("episodes_per_scenario must be >= 1");
  if (warmup_env_steps < batch_size) {
    throw std::invalid_argument("warmup must cover at least one batch");
  }
  if (alpha < 0) throw std::invalid_argument("alpha must be >= 0");
}

int act_epsilon_greedy(const net::DenseNet& net, const env::StateVector& s, double epsilon,
                       std::mt19937_64& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::domain_error("epsilon must lie in [0,1]");
  }
  if (epsilon > 0.0 && uniform01(rng) < epsilon) {
    return static_cast<int>(rng() % net::kActionDim);
  }
  return net.argmax_action(s);
}

std::vector<double> td_targets(const std::vector<Transition>& batch,
                               const net::DenseNet& target_net, double gamma) {
  const auto n = batch.size();
  std::vector<double> y(n);
  Eigen::MatrixXd next(net::kStateDim, static_cast<Eigen::Index>(n));
  for (size_t j = 0; j < n; ++j) {
    next.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(batch[j].next_state.data(), net::kStateDim);
  }
  const Eigen::MatrixXd q_next = target_net.forward_batch(next);
  for (size_t j = 0; j < n; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    y[j] = batch[j].reward;
    if (!batch[j].done) y[j] += gamma * q_next.col(col).maxCoeff();
  }
  return y;
}

std::string train_log_csv(const std::vector<TrainLogRow>& log) {
  std::string out = "step,mean_loss,mean_q,epsilon,eval_reward\n";
  char row[160];
  for (const auto& r : log) {
    std::snprintf(row, sizeof(row), "%ld,%.6f,%.6f,%.4f,%.6f\n", r.env_step, r.mean_loss, r.mean_q,
                  r.epsilon, r.eval_reward);
    out += row;
  }
  return out;
}

namespace {

double epsilon_at(const TrainerConfig& cfg, long env_step) {
  const double span = cfg.epsilon_fraction * static_cast<double>(cfg.total_env_steps);
  if (span <= 0) return cfg.epsilon_end;
  const double frac = std::min(1.0, static_cast<double>(env_step) / span);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
}

// Greedy evaluation on one held-out scenario; backs the eval_reward column.
double quick_eval(const net::DenseNet& net, const linksim::ScenarioConfig& scenario,
                  const linksim::BlerModel& bler_model, double alpha, long episodes) {
  env::LinkAdaptEnv e(scenario, env::RewardConfig{alpha, 0}, bler_model);
  double total = 0.0;
  for (long ep = 0; ep < episodes; ++ep) {
    env::StateVector s = e.reset();
    while (true) {
      auto [next, info] = e.step(net.argmax_action(s));
      total += info.reward;
      if (info.done) break;
      s = *next;
    }
  }
  return episodes > 0 ? total / static_cast<double>(episodes) : 0.0;
}

// Shared learner core for both execution modes.
class Learner {
 public:
  Learner(const TrainerConfig& cfg, const linksim::RandomizationRanges& ranges,
          const linksim::BlerModel& bler_model, const std::string& checkpoint_dir,
          const TrainHooks& hooks)
      : cfg_(cfg),
        bler_(bler_model),
        checkpoint_dir_(checkpoint_dir),
        hooks_(hooks),
        net_(net::DenseNet::init(net::layer_dims(cfg.hidden), cfg.seed)),
        target_(net_),
        opt_(net_, net::AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8}),
        sample_rng_(derive_seed(cfg.seed, 1)),
        eval_scenario_(linksim::sample_scenario(ranges, derive_seed(cfg.seed, 2))) {}

  const net::DenseNet& net() const { return net_; }
  net::DenseNet& net() { return net_; }
  long grad_steps() const { return grad_steps_; }
  std::vector<TrainLogRow> take_log() { return std::move(log_); }

  // Consume one produced transition; runs a gradient step on schedule.
  void on_transition(ReplayBuffer& replay, const Transition& t) {
    replay.push(t);
    consumed_ += 1;
    if (consumed_ >= cfg_.warmup_env_steps && consumed_ % cfg_.learn_every == 0) {
      learn_once(replay);
    }
    if (!checkpoint_dir_.empty() && cfg_.checkpoint_env_steps > 0 &&
        consumed_ % cfg_.checkpoint_env_steps == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoint_%09ld.model", consumed_);
      net_.save((std::filesystem::path(checkpoint_dir_) / name).string());
    }
  }

  void learn_once(ReplayBuffer& replay) {
    const auto idx = replay.sample_indices(static_cast<size_t>(cfg_.batch_size), sample_rng_);
    std::vector<Transition> batch;
    batch.reserve(idx.size());
    for (size_t i : idx) batch.push_back(replay.at(i));

    const std::vector<double> y = td_targets(batch, target_, cfg_.gamma);
    Eigen::MatrixXd inputs(net::kStateDim, static_cast<Eigen::Index>(batch.size()));
    for (size_t j = 0; j < batch.size(); ++j) {
      inputs.col(static_cast<Eigen::Index>(j)) =
          Eigen::Map<const Eigen::VectorXd>(batch[j].state.data(), net::kStateDim);
    }

    double mean_abs_q = 0.0;
    auto loss = [&](const Eigen::MatrixXd& q, Eigen::MatrixXd& grad) {
      double total = 0.0;
      for (size_t j = 0; j < batch.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        const double d = q(batch[j].action, col) - y[j];
        total += d * d;
        grad(batch[j].action, col) = 2.0 * d;
      }
      mean_abs_q = q.cwiseAbs().mean();
      return total;
    };
    const double mean_loss = net::train_step(net_, inputs, loss, opt_);

    const double q_limit = 10.0 * mcs::spectral_efficiency(mcs::kNumMcs - 1);
    if (mean_abs_q > q_limit) {
      throw std::runtime_error("training diverged: mean |Q| = " + std::to_string(mean_abs_q) +
                               " exceeds " + std::to_string(q_limit) + " at gradient step " +
                               std::to_string(grad_steps_ + 1));
    }

    grad_steps_ += 1;
    loss_accum_ += mean_loss;
    q_accum_ += mean_abs_q;
    window_ += 1;

    if (grad_steps_ % cfg_.target_update_period == 0) {
      target_ = net_;
      if (hooks_.on_target_update) {
        hooks_.on_target_update(grad_steps_, net_.param_hash(), target_.param_hash());
      }
    }
    if (cfg_.log_period > 0 && grad_steps_ % cfg_.log_period == 0) {
      TrainLogRow row;
      row.env_step = consumed_;
      row.mean_loss = loss_accum_ / window_;
      row.mean_q = q_accum_ / window_;
      row.epsilon = epsilon_at(cfg_, consumed_);
      row.eval_reward =
          quick_eval(net_, eval_scenario_, bler_, cfg_.alpha, cfg_.eval_episodes);
      log_.push_back(row);
      loss_accum_ = q_accum_ = 0.0;
      window_ = 0;
    }
  }

  bool should_publish() const {
    return grad_steps_ > 0 && grad_steps_ % cfg_.publish_period == 0 &&
           grad_steps_ != last_published_;
  }
  void mark_published() { last_published_ = grad_steps_; }

 private:
  TrainerConfig cfg_;
  linksim::BlerModel bler_;
  std::string checkpoint_dir_;
  TrainHooks hooks_;
  net::DenseNet net_;
  net::DenseNet target_;
  net::Adam opt_;
  std::mt19937_64 sample_rng_;
  linksim::ScenarioConfig eval_scenario_;
  long consumed_ = 0;
  long grad_steps_ = 0;
  long last_published_ = -1;
  double loss_accum_ = 0.0;
  double q_accum_ = 0.0;
  long window_ = 0;
  std::vector<TrainLogRow> log_;
};

// One actor's episode/scenario cycling. next_scenario_env() refreshes the
// scenario every episodes_per_scenario episodes.
class ActorContext {
 public:
  ActorContext(const TrainerConfig& cfg, const linksim::RandomizationRanges& ranges,
               const linksim::BlerModel& bler_model, int actor_id)
      : cfg_(cfg),
        ranges_(ranges),
        bler_(bler_model),
        scenario_seed_base_(derive_seed(cfg.seed, 100 + static_cast<uint64_t>(actor_id))),
        action_rng_(derive_seed(cfg.seed, 200 + static_cast<uint64_t>(actor_id))) {}

  env::StateVector begin_episode() {
    if (!env_ || episodes_in_scenario_ >= cfg_.episodes_per_scenario) {
      uint64_t s = scenario_seed_base_;
      const auto scenario =
          linksim::sample_scenario(ranges_, derive_seed(s, scenario_index_++));
      env_.emplace(scenario, env::RewardConfig{cfg_.alpha, 0}, bler_);
      episodes_in_scenario_ = 0;
    }
    episodes_in_scenario_ += 1;
    return env_->reset();
  }

  env::LinkAdaptEnv& env() { return *env_; }
  std::mt19937_64& action_rng() { return action_rng_; }

 private:
  const TrainerConfig& cfg_;
  const linksim::RandomizationRanges& ranges_;
  linksim::BlerModel bler_;
  uint64_t scenario_seed_base_;
  std::mt19937_64 action_rng_;
  std::optional<env::LinkAdaptEnv> env_;
  uint64_t scenario_index_ = 0;
  long episodes_in_scenario_ = 0;
};

Transition make_transition(const env::StateVector& s, int a, double reward,
                           const std::optional<env::StateVector>& next, bool done) {
  Transition t;
  t.state = s;
  t.action = a;
  t.reward = reward;
  t.done = done;
  if (next) t.next_state = *next;  // else keep the zero-filled terminal marker
  return t;
}

TeacherResult train_deterministic(const TrainerConfig& cfg,
                                  const linksim::RandomizationRanges& ranges,
                                  const linksim::BlerModel& bler_model,
                                  const std::string& checkpoint_dir, const TrainHooks& hooks) {
  Learner learner(cfg, ranges, bler_model, checkpoint_dir, hooks);
  ReplayBuffer replay(cfg.replay_capacity);
  ActorContext actor(cfg, ranges, bler_model, 0);

  env::StateVector state{};
  bool need_reset = true;
  for (long step = 0; step < cfg.total_env_steps; ++step) {
    if (need_reset) {
      state = actor.begin_episode();
      need_reset = false;
    }
    const double eps = epsilon_at(cfg, step);
    const int a = act_epsilon_greedy(learner.net(), state, eps, actor.action_rng());
    auto [next, info] = actor.env().step(a);
    learner.on_transition(replay, make_transition(state, a, info.reward, next, info.done));
    if (info.done) {
      need_reset = true;
    } else {
      state = *next;
    }
  }
  return TeacherResult{learner.net(), std::move(replay), learner.take_log()};
}

// Minimal bounded MPSC queue with blocking push (backpressure) and pop.
class TransitionQueue {
 public:
  explicit TransitionQueue(size_t capacity) : capacity_(capacity) {}

  bool push(const Transition& t) {
    std::unique_lock lk(m_);
    cv_space_.wait(lk, [&] { return q_.size() < capacity_ || closed_; });
    if (closed_) return false;
    q_.push_back(t);
    cv_data_.notify_one();
    return true;
  }

  std::optional<Transition> pop() {
    std::unique_lock lk(m_);
    cv_data_.wait(lk, [&] { return !q_.empty() || closed_; });
    if (q_.empty()) return std::nullopt;
    Transition t = q_.front();
    q_.pop_front();
    cv_space_.notify_one();
    return t;
  }

  void close() {
    std::lock_guard lk(m_);
    closed_ = true;
    cv_data_.notify_all();
    cv_space_.notify_all();
  }

 private:
  size_t capacity_;
  std::mutex m_;
  std::condition_variable cv_data_, cv_space_;
  std::deque<Transition> q_;
  bool closed_ = false;
};

// Copy-on-publish parameter broadcast; actors read immutable snapshots.
class SnapshotStore {
 public:
  void publish(const net::DenseNet& net) {
    auto copy = std::make_shared<const net::DenseNet>(net);
    std::lock_guard lk(m_);
    snapshot_ = std::move(copy);
    version_ += 1;
  }
  std::shared_ptr<const net::DenseNet> get() const {
    std::lock_guard lk(m_);
    return snapshot_;
  }

 private:
  mutable std::mutex m_;
  std::shared_ptr<const net::DenseNet> snapshot_;
  long version_ = 0;
};

TeacherResult train_threaded(const TrainerConfig& cfg, const linksim::RandomizationRanges& ranges,
                             const linksim::BlerModel& bler_model,
                             const std::string& checkpoint_dir, const TrainHooks& hooks) {
  Learner learner(cfg, ranges, bler_model, checkpoint_dir, hooks);
  ReplayBuffer replay(cfg.replay_capacity);
  SnapshotStore snapshots;
  snapshots.publish(learner.net());
  TransitionQueue queue(10000);
  std::atomic<long> step_counter{0};
  std::atomic<int> actors_left{cfg.n_actors};

  auto actor_fn = [&](int actor_id) {
    ActorContext actor(cfg, ranges, bler_model, actor_id);
    std::shared_ptr<const net::DenseNet> policy = snapshots.get();
    bool running = true;
    while (running) {
      policy = snapshots.get();
      env::StateVector state = actor.begin_episode();
      while (true) {
        const long idx = step_counter.fetch_add(1);
        if (idx >= cfg.total_env_steps) {
          running = false;
          break;
        }
        const double eps = epsilon_at(cfg, idx);
        const int a = act_epsilon_greedy(*policy, state, eps, actor.action_rng());
        auto [next, info] = actor.env().step(a);
        if (!queue.push(make_transition(state, a, info.reward, next, info.done))) {
          running = false;
          break;
        }
        if (info.done) break;
        state = *next;
      }
    }
    if (actors_left.fetch_sub(1) == 1) queue.close();
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(cfg.n_actors));
  for (int i = 0; i < cfg.n_actors; ++i) threads.emplace_back(actor_fn, i);

  std::exception_ptr learner_error;
  try {
    while (auto t = queue.pop()) {
      learner.on_transition(replay, *t);
      if (learner.should_publish()) {
        snapshots.publish(learner.net());
        learner.mark_published();
      }
    }
  } catch (...) {
    learner_error = std::current_exception();
    queue.close();
  }
  for (auto& th : threads) th.join();
  if (learner_error) std::rethrow_exception(learner_error);

  return TeacherResult{learner.net(), std::move(replay), learner.take_log()};
}

}  // namespace

TeacherResult train_teacher(const TrainerConfig& cfg, const linksim::RandomizationRanges& ranges,
                            bool deterministic, const std::string& checkpoint_dir,
                            const TrainHooks& hooks, const linksim::BlerModel& bler_model) {
  cfg.validate();
  ranges.validate();
  if (!checkpoint_dir.empty()) std::filesystem::create_directories(checkpoint_dir);
  if (deterministic || cfg.n_actors == 1) {
    return train_deterministic(cfg, ranges, bler_model, checkpoint_dir, hooks);
  }
  return train_threaded(cfg, ranges, bler_model, checkpoint_dir, hooks);
}

namespace {
constexpr char kReplayMagic[8] = {'L', 'R', 'L', 'R', 'P', 'L', '0', '1'};
}

void save_replay(const ReplayBuffer& replay, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open replay file for writing: " + path);
  f.write(kReplayMagic, sizeof(kReplayMagic));
  const uint64_t count = replay.size();
  const uint64_t capacity = replay.capacity();
  f.write(reinterpret_cast<const char*>(&count), sizeof(count));
  f.write(reinterpret_cast<const char*>(&capacity), sizeof(capacity));
  for (size_t i = 0; i < replay.size(); ++i) {
    const Transition& t = replay.at(i);
    f.write(reinterpret_cast<const char*>(t.state.data()), sizeof(t.state));
    const uint32_t action = static_cast<uint32_t>(t.action);
    f.write(reinterpret_cast<const char*>(&action), sizeof(action));
    f.write(reinterpret_cast<const char*>(&t.reward), sizeof(t.reward));
    f.write(reinterpret_cast<const char*>(t.next_state.data()), sizeof(t.next_state));
    const uint8_t done = t.done ? 1 : 0;
    f.write(reinterpret_cast<const char*>(&done), sizeof(done));
  }
  if (!f) throw std::runtime_error("failed writing replay file: " + path);
}

ReplayBuffer load_replay(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open replay file: " + path);
  char magic[8];
  if (!f.read(magic, sizeof(magic)) || std::memcmp(magic, kReplayMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("corrupt replay file " + path + ": bad magic at byte offset 0");
  }
  uint64_t count = 0, capacity = 0;
  if (!f.read(reinterpret_cast<char*>(&count), sizeof(count)) ||
      !f.read(reinterpret_cast<char*>(&capacity), sizeof(capacity))) {
    throw std::runtime_error("corrupt replay file " + path + ": truncated header");
  }
  if (capacity == 0 || count > capacity) {
    throw std::runtime_error("corrupt replay file " + path + ": implausible header counts");
  }
  ReplayBuffer replay(capacity);
  for (uint64_t i = 0; i < count; ++i) {
    Transition t;
    uint32_t action = 0;
    uint8_t done = 0;
    if (!f.read(reinterpret_cast<char*>(t.state.data()), sizeof(t.state)) ||
        !f.read(reinterpret_cast<char*>(&action), sizeof(action)) ||
        !f.read(reinterpret_cast<char*>(&t.reward), sizeof(t.reward)) ||
        !f.read(reinterpret_cast<char*>(t.next_state.data()), sizeof(t.next_state)) ||
        !f.read(reinterpret_cast<char*>(&done), sizeof(done))) {
      throw std::runtime_error("corrupt replay file " + path + ": truncated at record " +
                               std::to_string(i));
    }
    t.action = static_cast<int>(action);
    t.done = done != 0;
    replay.push(t);
  }
  return replay;
}

}  // namespace linkrl::dqn
