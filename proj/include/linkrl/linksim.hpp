#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace linkrl::linksim {

enum class AntennaArray { kMimo4 = 0, kMmimo64 = 1 };

std::string to_string(AntennaArray a);
AntennaArray antenna_from_string(const std::string& s);

// Candidate-value lists for the per-scenario randomization draw. Defaults
// reproduce the training randomization grid; tests and specialist training
// narrow the lists (singletons are legal, empty lists are not).
struct RandomizationRanges {
  std::vector<AntennaArray> antenna_array{AntennaArray::kMimo4, AntennaArray::kMmimo64};
  std::vector<double> cell_radius_m{166, 300, 600, 900, 1200};
  std::vector<double> bandwidth_mhz{20, 40, 50, 80, 100};
  std::vector<int> n_subbands{51, 106, 133, 217, 273};
  std::vector<double> dl_tx_power_w{20, 40, 50, 80, 100};
  std::vector<int> ue_antennas{2, 4};
  std::vector<int> max_rank{2, 4};
  std::vector<int> max_dl_tx{5};
  std::vector<int> n_fb_ues{1, 5, 10};
  std::vector<int> n_mbb_ues{5, 10, 25, 50, 100, 150};
  std::vector<double> fb_speed_mps{0.67, 10, 15, 30};
  std::vector<double> mbb_speed_mps{0.67, 1.5, 3};
  std::vector<double> indoor_prob{0.2, 0.4, 0.8};
  std::vector<int> cqi_period_ttis{5};
  std::vector<int> cqi_delay_ttis{2};

  void validate() const;  // throws std::invalid_argument
  nlohmann::json to_json() const;
  static RandomizationRanges from_json(const nlohmann::json& j);
};

// One fully sampled scenario: the raw draw plus the derived link parameters.
// (ranges, seed) -> ScenarioConfig is deterministic.
struct ScenarioConfig {
  AntennaArray antenna_array = AntennaArray::kMimo4;
  double cell_radius_m = 166;
  double bandwidth_mhz = 100;
  int n_subbands = 273;
  double dl_tx_power_w = 20;
  int ue_antennas = 2;
  int max_rank = 2;
  int max_dl_tx = 5;
  int n_fb_ues = 1;
  int n_mbb_ues = 5;
  double fb_speed_mps = 10;
  double mbb_speed_mps = 1.5;
  double indoor_prob = 0.2;
  bool indoor = false;

  double mean_sinr_db = 20.0;
  double fading_rho = 0.5;
  double fading_sigma_db = 6.0;
  int cqi_delay_ttis = 2;
  int cqi_period_ttis = 5;
  uint64_t seed = 0;

  nlohmann::json to_json() const;
  static ScenarioConfig from_json(const nlohmann::json& j);
};

// Geometry SINR for a sampled deployment: 22 dB base at 166 m, 6 dB per
// radius doubling, power referenced to 20 W, 8 dB indoor penalty, 4 dB
// mMIMO beamforming bonus, and a noise-rise load term for the UE count.
double geometry_sinr_db(double cell_radius_m, double dl_tx_power_w, bool indoor,
                        AntennaArray antenna, int n_total_ues);

// Fills mean_sinr_db / fading_rho / fading_sigma_db from the sampled fields.
void derive_link_params(ScenarioConfig& cfg);

ScenarioConfig sample_scenario(const RandomizationRanges& ranges, uint64_t seed);

// Logistic BLER placed on the Shannon-gap threshold of MCS m:
// bler = 1 / (1 + exp(slope * (sinr - theta_m))). Strictly decreasing in
// sinr, non-decreasing in m. The default slope gives a ~1.1 dB waterfall
// (10% to 90% BLER), comparable to NR link-level curves.
struct BlerModel {
  double slope_per_db = 4.0;
  double gap_db = 2.0;
};

double bler(int m, double sinr_db, double slope_per_db, double gap_db);
inline double bler(int m, double sinr_db, const BlerModel& b) {
  return bler(m, sinr_db, b.slope_per_db, b.gap_db);
}

// Mutable per-link state: AR(1) fading offset, HARQ energy of the in-flight
// packet, TTI counter and the (delayed) CQI report bookkeeping.
struct LinkState {
  double fading_db = 0.0;
  double accumulated_energy = 0.0;  // linear SINR sum across HARQ attempts
  long tti = 0;
  int last_cqi = 0;
  int cqi_age_ttis = 0;
  int attempt = 0;  // attempts already spent on the in-flight packet
  bool packet_active = false;
};

// Advances the fading process one TTI and returns the instantaneous SINR:
// x <- rho*x + sigma*sqrt(1-rho^2)*eps, sinr = mean + x.
double step_fading(LinkState& link, const ScenarioConfig& cfg, std::mt19937_64& rng);

struct TxResult {
  bool success = false;
  double effective_sinr_db = 0.0;
  double instantaneous_sinr_db = 0.0;
  bool packet_done = false;  // delivered or dropped after max_dl_tx attempts
};

// One HARQ transmission attempt with chase combining: energies add linearly
// across attempts even if the MCS changes between them. Throws
// std::logic_error when no packet is in flight.
TxResult transmit(LinkState& link, int m, const ScenarioConfig& cfg, const BlerModel& bler_model,
                  std::mt19937_64& rng);

// 4-bit CQI: the largest level whose representative MCS decodes with
// bler <= 0.1 at the given SINR; 0 if none.
int cqi_from_sinr(double sinr_db, double slope_per_db, double gap_db);
int cqi_representative_mcs(int cqi);
// SINR at which the representative MCS of this CQI hits exactly 10% BLER.
double cqi_representative_sinr_db(int cqi, double slope_per_db, double gap_db);

// Owns one link: fading evolution, periodic delayed CQI reporting and the
// HARQ packet lifecycle. One instance per actor; no shared mutable state.
class LinkSimulator {
 public:
  explicit LinkSimulator(ScenarioConfig cfg, BlerModel bler_model = {});

  void start_packet();
  TxResult transmit(int m);  // one attempt, one TTI

  int cqi() const { return state_.last_cqi; }
  int cqi_age() const { return state_.cqi_age_ttis; }
  double cqi_sinr_estimate_db() const;
  const ScenarioConfig& config() const { return cfg_; }
  const BlerModel& bler_model() const { return bler_; }
  const LinkState& state() const { return state_; }

 private:
  void observe_tti(double instantaneous_sinr_db);

  ScenarioConfig cfg_;
  BlerModel bler_;
  LinkState state_;
  std::mt19937_64 rng_;
  long pending_measured_tti_ = -1;
  int pending_cqi_ = 0;
  long visible_measured_tti_ = 0;
};

}  // namespace linkrl::linksim
