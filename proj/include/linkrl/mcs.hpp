#pragma once

#include <array>
#include <string>

namespace linkrl::mcs {

inline constexpr int kNumMcs = 28;

// One row of the 28-entry downlink MCS table (256-QAM table from
// 3GPP TS 38.214, Table 5.1.3.1-2). code rate is stored as the x1024
// numerator exactly as the standard prints it (two rows are half-integer).
struct McsEntry {
  int index;
  int modulation_order;       // bits per symbol, one of {2,4,6,8}
  double code_rate_x1024;     // code rate numerator, rate = value / 1024
  double spectral_efficiency; // bits/s/Hz
};

// The canonical immutable table, indices 0..27.
const std::array<McsEntry, kNumMcs>& table();

// Spectral efficiency of MCS m. Throws std::domain_error for m outside 0..27.
double spectral_efficiency(int m);

// SINR threshold for a target spectral efficiency under a Shannon-gap model:
// theta = 10*log10(2^se - 1) + gap_db.
double required_sinr_for_se_db(double se, double gap_db);

// SINR threshold of MCS m; strictly increasing in m for any fixed gap.
// Throws std::domain_error for m outside 0..27 or gap_db < 0.
double required_sinr_db(int m, double gap_db);

// Table as CSV ("index,order,rate_x1024,se"), one row per entry.
std::string table_csv();

}  // namespace linkrl::mcs
