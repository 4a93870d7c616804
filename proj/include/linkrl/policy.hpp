#pragma once

#include <memory>
#include <string>

#include "linkrl/baseline.hpp"
#include "linkrl/env.hpp"
#include "linkrl/net.hpp"

namespace linkrl::evalkit {

// Anything that maps a state to an MCS index. Stateful policies (OLLA)
// update themselves through the feedback hook; begin_run() resets them
// between evaluation runs.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual int act(const env::StateVector& s) = 0;
  virtual void on_feedback(bool /*ack*/, bool /*first_tx*/) {}
  virtual void begin_run() {}
};

class FixedActionPolicy final : public Policy {
 public:
  explicit FixedActionPolicy(int action) : action_(action) {}
  int act(const env::StateVector&) override { return action_; }

 private:
  int action_;
};

class GreedyNetPolicy final : public Policy {
 public:
  explicit GreedyNetPolicy(const net::DenseNet& net) : net_(&net) {}
  int act(const env::StateVector& s) override { return net_->argmax_action(s); }

 private:
  const net::DenseNet* net_;
};

// ILLA + OLLA comparator. Acts on the same observation the agent sees: the
// delayed/quantized CQI mapped back to its representative SINR. The outer
// loop adapts on first-transmission HARQ feedback only.
class OllaPolicy final : public Policy {
 public:
  explicit OllaPolicy(baseline::OllaState initial = baseline::OllaState::make(),
                      linksim::BlerModel bler_model = {})
      : initial_(initial), state_(initial), bler_(bler_model) {}

  int act(const env::StateVector& s) override {
    const double sinr_est_db = s[2] * 40.0;
    return baseline::illa_select(sinr_est_db, state_.offset_db, state_.target_bler, bler_);
  }

  void on_feedback(bool ack, bool first_tx) override {
    if (first_tx) state_ = baseline::olla_update(state_, ack);
  }

  void begin_run() override { state_ = initial_; }

  const baseline::OllaState& state() const { return state_; }

 private:
  baseline::OllaState initial_;
  baseline::OllaState state_;
  linksim::BlerModel bler_;
};

}  // namespace linkrl::evalkit
