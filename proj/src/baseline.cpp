#include "linkrl/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "linkrl/mcs.hpp"

namespace linkrl::baseline {

OllaState OllaState::make(double target_bler, double step_up_db) {
  if (target_bler <= 0.0 || target_bler >= 1.0) {
    throw std::invalid_argument("target_bler must lie in (0,1)");
  }
  if (step_up_db <= 0.0) {
    throw std::invalid_argument("step_up_db must be positive");
  }
  OllaState s;
  s.offset_db = 0.0;
  s.step_up_db = step_up_db;
  s.step_down_db = step_up_db * target_bler / (1.0 - target_bler);
  s.target_bler = target_bler;
  return s;
}

int illa_select(double sinr_est_db, double offset_db, double target_bler,
                const linksim::BlerModel& bler_model) {
  const double sinr = sinr_est_db - offset_db;
  int best = 0;
  for (int m = 0; m < mcs::kNumMcs; ++m) {
    if (linksim::bler(m, sinr, bler_model) <= target_bler) {
      best = m;
    } else {
      break;  // BLER is non-decreasing in m
    }
  }
  return best;
}

OllaState olla_update(OllaState state, bool ack) {
  if (ack) {
    state.offset_db -= state.step_down_db;
  } else {
    state.offset_db += state.step_up_db;
  }
  state.offset_db = std::clamp(state.offset_db, -kOllaOffsetClampDb, kOllaOffsetClampDb);
  return state;
}

}  // namespace linkrl::baseline
