#include "linkrl/env.hpp"

#include <cmath>
#include <stdexcept>

#include "linkrl/mcs.hpp"

namespace linkrl::env {

double episode_return(const EpisodeRecord& ep, double gamma) {
  double g = 1.0;
  double total = 0.0;
  for (const auto& t : ep.transitions) {
    total += g * t.reward;
    g *= gamma;
  }
  return total;
}

LinkAdaptEnv::LinkAdaptEnv(linksim::ScenarioConfig cfg, RewardConfig reward,
                           linksim::BlerModel bler_model)
    : sim_(std::move(cfg), bler_model), reward_(reward) {
  max_tx_ = reward_.max_tx > 0 ? reward_.max_tx : sim_.config().max_dl_tx;
  if (max_tx_ < 1) throw std::invalid_argument("max_tx must be >= 1");
  if (reward_.alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
}

StateVector LinkAdaptEnv::current_state() const {
  const auto& cfg = sim_.config();
  const auto& ls = sim_.state();
  StateVector s{};
  s[0] = sim_.cqi() / 15.0;
  s[1] = sim_.cqi_age() / 10.0;
  s[2] = sim_.cqi_sinr_estimate_db() / 40.0;
  s[3] = harq_history_[0];
  s[4] = harq_history_[1];
  s[5] = harq_history_[2];
  s[6] = harq_history_[3];
  s[7] = static_cast<double>(ls.attempt) / max_tx_;
  s[8] = ls.accumulated_energy > 0.0 ? 10.0 * std::log10(ls.accumulated_energy) / 40.0 : 0.0;
  s[9] = ack_ewma_;
  s[10] = last_mcs_ / 27.0;
  s[11] = cfg.antenna_array == linksim::AntennaArray::kMmimo64 ? 1.0 : 0.0;
  s[12] = cfg.bandwidth_mhz / 100.0;
  s[13] = cfg.dl_tx_power_w / 100.0;
  s[14] = cfg.fb_speed_mps / 30.0;
  s[15] = cfg.indoor ? 1.0 : 0.0;
  return s;
}

StateVector LinkAdaptEnv::reset() {
  sim_.start_packet();
  done_ = false;
  record_ = EpisodeRecord{};
  return current_state();
}

std::pair<std::optional<StateVector>, StepInfo> LinkAdaptEnv::step(int action) {
  if (action < 0 || action >= mcs::kNumMcs) {
    throw std::domain_error("action out of range 0..27: " + std::to_string(action));
  }
  if (done_) {
    throw std::logic_error("step called on a terminated episode");
  }

  const StateVector state_before = current_state();
  const int attempt = sim_.state().attempt;  // 0-based index of this attempt
  const linksim::TxResult tx = sim_.transmit(action);

  StepInfo info;
  info.success = tx.success;
  info.attempt = attempt;
  info.effective_sinr_db = tx.effective_sinr_db;
  info.instantaneous_sinr_db = tx.instantaneous_sinr_db;
  info.tti = sim_.state().tti;
  info.reward = tx.success ? mcs::spectral_efficiency(action)
                           : -reward_.alpha * static_cast<double>(attempt);
  // The env can cap attempts below the simulator's N; enforce locally too.
  info.done = tx.success || attempt + 1 >= max_tx_ || tx.packet_done;
  done_ = info.done;

  harq_history_ = {tx.success ? 1.0 : 0.0, harq_history_[0], harq_history_[1], harq_history_[2]};
  ack_ewma_ = 0.9 * ack_ewma_ + 0.1 * (tx.success ? 1.0 : 0.0);
  last_mcs_ = action;

  std::optional<StateVector> next;
  if (!done_) next = current_state();

  EpisodeRecord::Step rec;
  rec.state = state_before;
  rec.action = action;
  rec.reward = info.reward;
  rec.next_state = next;
  rec.done = info.done;
  rec.success = tx.success;
  rec.tti = info.tti;
  record_.transitions.push_back(rec);
  record_.attempts_used = attempt + 1;
  if (done_) {
    record_.outcome =
        tx.success ? EpisodeRecord::Outcome::kDelivered : EpisodeRecord::Outcome::kDropped;
    record_.delivered_se = tx.success ? mcs::spectral_efficiency(action) : 0.0;
  }
  return {next, info};
}

}  // namespace linkrl::env
