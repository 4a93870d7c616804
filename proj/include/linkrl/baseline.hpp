#pragma once

#include "linkrl/linksim.hpp"

namespace linkrl::baseline {

// Outer-loop state. step_down is tied to step_up by the zero-drift condition
// step_down = step_up * target / (1 - target), so the offset random-walks
// around the point where first-transmission BLER equals the target.
struct OllaState {
  double offset_db = 0.0;
  double step_up_db = 0.5;
  double step_down_db = 0.5 * 0.1 / 0.9;
  double target_bler = 0.1;

  static OllaState make(double target_bler = 0.1, double step_up_db = 0.5);
};

inline constexpr double kOllaOffsetClampDb = 10.0;

// Largest MCS whose BLER at (sinr_est - offset) stays within the target;
// 0 when even the lowest MCS does not qualify.
int illa_select(double sinr_est_db, double offset_db, double target_bler,
                const linksim::BlerModel& bler_model);

// NACK pushes the offset up by step_up, ACK pulls it down by step_down;
// result clamped to [-10, +10] dB.
OllaState olla_update(OllaState state, bool ack);

}  // namespace linkrl::baseline
