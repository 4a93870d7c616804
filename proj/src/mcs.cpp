#include "linkrl/mcs.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace linkrl::mcs {

const std::array<McsEntry, kNumMcs>& table() {
  // 3GPP TS 38.214 Table 5.1.3.1-2 (MCS index table 2 for PDSCH), rows 0..27.
  // Reserved indices 28..31 are not part of the action space and never appear.
  static const std::array<McsEntry, kNumMcs> t = {{
      {0, 2, 120.0, 0.2344},
      {1, 2, 193.0, 0.3770},
      {2, 2, 308.0, 0.6016},
      {3, 2, 449.0, 0.8770},
      {4, 2, 602.0, 1.1758},
      {5, 4, 378.0, 1.4766},
      {6, 4, 434.0, 1.6953},
      {7, 4, 490.0, 1.9141},
      {8, 4, 553.0, 2.1602},
      {9, 4, 616.0, 2.4063},
      {10, 4, 658.0, 2.5703},
      {11, 6, 466.0, 2.7305},
      {12, 6, 517.0, 3.0293},
      {13, 6, 567.0, 3.3223},
      {14, 6, 616.0, 3.6094},
      {15, 6, 666.0, 3.9023},
      {16, 6, 719.0, 4.2129},
      {17, 6, 772.0, 4.5234},
      {18, 6, 822.0, 4.8164},
      {19, 6, 873.0, 5.1152},
      {20, 8, 682.5, 5.3320},
      {21, 8, 711.0, 5.5547},
      {22, 8, 754.0, 5.8906},
      {23, 8, 797.0, 6.2266},
      {24, 8, 841.0, 6.5703},
      {25, 8, 885.0, 6.9141},
      {26, 8, 916.5, 7.1602},
      {27, 8, 948.0, 7.4063},
  }};
  return t;
}

double spectral_efficiency(int m) {
  if (m < 0 || m >= kNumMcs) {
    throw std::domain_error("MCS index out of range 0..27: " + std::to_string(m));
  }
  return table()[static_cast<size_t>(m)].spectral_efficiency;
}

double required_sinr_for_se_db(double se, double gap_db) {
  if (gap_db < 0.0) {
    throw std::domain_error("SINR gap must be non-negative, got " + std::to_string(gap_db));
  }
  return 10.0 * std::log10(std::exp2(se) - 1.0) + gap_db;
}

double required_sinr_db(int m, double gap_db) {
  return required_sinr_for_se_db(spectral_efficiency(m), gap_db);
}

std::string table_csv() {
  std::string out = "index,order,rate_x1024,se\n";
  char row[64];
  for (const auto& e : table()) {
    std::snprintf(row, sizeof(row), "%d,%d,%g,%.4f\n", e.index, e.modulation_order,
                  e.code_rate_x1024, e.spectral_efficiency);
    out += row;
  }
  return out;
}

}  // namespace linkrl::mcs
