#pragma once

#include <array>
#include <optional>
#include <vector>

#include "linkrl/linksim.hpp"

namespace linkrl::env {

inline constexpr int kStateDim = 16;

// Agent observation, fixed feature order:
//   0  cqi / 15
//   1  cqi_age_ttis / 10
//   2  sinr_est_db / 40        (CQI mapped back to its representative SINR)
//   3  harq feedback at t-1    (1 = ACK)
//   4  harq feedback at t-2
//   5  harq feedback at t-3
//   6  harq feedback at t-4
//   7  n / N                   (attempt index of the next transmission)
//   8  effective_sinr_db / 40  (HARQ-combined; 0 before the first attempt)
//   9  ack EWMA                (smoothing 0.1)
//  10  last_mcs / 27
//  11  antenna code            (0 = MIMO4, 1 = mMIMO64)
//  12  bandwidth_mhz / 100
//  13  dl_tx_power_w / 100
//  14  fb_speed_mps / 30
//  15  indoor flag
// Features 0..10 are dynamic; 11..15 are constant within a scenario.
using StateVector = std::array<double, kStateDim>;

struct RewardConfig {
  double alpha = 0.5;  // retransmission penalty coefficient
  int max_tx = 0;      // 0 = adopt the scenario's max_dl_tx
};

struct StepInfo {
  bool success = false;
  bool done = false;
  double reward = 0.0;
  double effective_sinr_db = 0.0;
  double instantaneous_sinr_db = 0.0;
  int attempt = 0;  // 0-based attempt index this step used
  long tti = 0;
};

struct EpisodeRecord {
  struct Step {
    StateVector state{};
    int action = 0;
    double reward = 0.0;
    std::optional<StateVector> next_state;  // absent at the terminal step
    bool done = false;
    bool success = false;
    long tti = 0;
  };
  enum class Outcome { kDelivered, kDropped };
  std::vector<Step> transitions;
  Outcome outcome = Outcome::kDropped;
  int attempts_used = 0;
  double delivered_se = 0.0;  // SE of the successful attempt, 0 for drops
};

// Undiscounted for gamma = 1; sum of gamma^n * r_n otherwise.
double episode_return(const EpisodeRecord& ep, double gamma);

// Episodic MDP over one radio link: an episode is the lifespan of one data
// packet, ending on delivery or on the Nth failed attempt.
class LinkAdaptEnv {
 public:
  explicit LinkAdaptEnv(linksim::ScenarioConfig cfg, RewardConfig reward = {},
                        linksim::BlerModel bler_model = {});

  // Starts a new packet and returns the featurized state.
  StateVector reset();

  // One transmission attempt. Throws std::domain_error for an action outside
  // 0..27 and std::logic_error when called after the episode terminated.
  std::pair<std::optional<StateVector>, StepInfo> step(int action);

  bool episode_done() const { return done_; }
  StateVector current_state() const;
  const linksim::ScenarioConfig& scenario() const { return sim_.config(); }
  const EpisodeRecord& last_episode() const { return record_; }
  int max_tx() const { return max_tx_; }
  double alpha() const { return reward_.alpha; }

 private:
  linksim::LinkSimulator sim_;
  RewardConfig reward_;
  int max_tx_;
  bool done_ = true;
  std::array<double, 4> harq_history_{1.0, 1.0, 1.0, 1.0};  // most recent first
  double ack_ewma_ = 0.9;
  int last_mcs_ = 0;
  EpisodeRecord record_;
};

}  // namespace linkrl::env
