#include "linkrl/linksim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "linkrl/common.hpp"
#include "linkrl/mcs.hpp"

namespace linkrl::linksim {

std::string to_string(AntennaArray a) {
  return a == AntennaArray::kMimo4 ? "MIMO4" : "mMIMO64";
}

AntennaArray antenna_from_string(const std::string& s) {
  if (s == "MIMO4") return AntennaArray::kMimo4;
  if (s == "mMIMO64") return AntennaArray::kMmimo64;
  throw std::invalid_argument("unknown antenna array: " + s);
}

namespace {

template <typename T>
void require_nonempty(const std::vector<T>& v, const char* name) {
  if (v.empty()) {
    throw std::invalid_argument(std::string("randomization range '") + name + "' is empty");
  }
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[static_cast<size_t>(rng() % v.size())];
}

}  // namespace

void RandomizationRanges::validate() const {
  require_nonempty(antenna_array, "antenna_array");
  require_nonempty(cell_radius_m, "cell_radius_m");
  require_nonempty(bandwidth_mhz, "bandwidth_mhz");
  require_nonempty(n_subbands, "n_subbands");
  require_nonempty(dl_tx_power_w, "dl_tx_power_w");
  require_nonempty(ue_antennas, "ue_antennas");
  require_nonempty(max_rank, "max_rank");
  require_nonempty(max_dl_tx, "max_dl_tx");
  require_nonempty(n_fb_ues, "n_fb_ues");
  require_nonempty(n_mbb_ues, "n_mbb_ues");
  require_nonempty(fb_speed_mps, "fb_speed_mps");
  require_nonempty(mbb_speed_mps, "mbb_speed_mps");
  require_nonempty(indoor_prob, "indoor_prob");
  require_nonempty(cqi_period_ttis, "cqi_period_ttis");
  require_nonempty(cqi_delay_ttis, "cqi_delay_ttis");
  for (int n : max_dl_tx) {
    if (n < 1) throw std::invalid_argument("max_dl_tx must be >= 1");
  }
  for (double p : indoor_prob) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("indoor_prob must lie in [0,1]");
  }
  for (double r : cell_radius_m) {
    if (r <= 0.0) throw std::invalid_argument("cell_radius_m must be positive");
  }
  for (double w : dl_tx_power_w) {
    if (w <= 0.0) throw std::invalid_argument("dl_tx_power_w must be positive");
  }
}

double geometry_sinr_db(double cell_radius_m, double dl_tx_power_w, bool indoor,
                        AntennaArray antenna, int n_total_ues) {
  double sinr = 22.0;
  sinr -= 20.0 * std::log10(cell_radius_m / 166.0);
  sinr += 10.0 * std::log10(dl_tx_power_w / 20.0);
  if (indoor) sinr -= 8.0;
  if (antenna == AntennaArray::kMmimo64) sinr += 4.0;
  sinr -= 10.0 * std::log10(1.0 + 0.05 * static_cast<double>(n_total_ues));
  return sinr;
}

ScenarioConfig sample_scenario(const RandomizationRanges& ranges, uint64_t seed) {
  ranges.validate();
  std::mt19937_64 rng(seed);

  ScenarioConfig c;
  c.antenna_array = pick(ranges.antenna_array, rng);
  c.cell_radius_m = pick(ranges.cell_radius_m, rng);
  c.bandwidth_mhz = pick(ranges.bandwidth_mhz, rng);
  c.n_subbands = pick(ranges.n_subbands, rng);
  c.dl_tx_power_w = pick(ranges.dl_tx_power_w, rng);
  c.ue_antennas = pick(ranges.ue_antennas, rng);
  c.max_rank = pick(ranges.max_rank, rng);
  c.max_dl_tx = pick(ranges.max_dl_tx, rng);
  c.n_fb_ues = pick(ranges.n_fb_ues, rng);
  c.n_mbb_ues = pick(ranges.n_mbb_ues, rng);
  c.fb_speed_mps = pick(ranges.fb_speed_mps, rng);
  c.mbb_speed_mps = pick(ranges.mbb_speed_mps, rng);
  c.indoor_prob = pick(ranges.indoor_prob, rng);
  c.cqi_period_ttis = pick(ranges.cqi_period_ttis, rng);
  c.cqi_delay_ttis = pick(ranges.cqi_delay_ttis, rng);
  c.indoor = uniform01(rng) < c.indoor_prob;

  derive_link_params(c);
  c.seed = splitmix64(seed);
  return c;
}

void derive_link_params(ScenarioConfig& c) {
  c.mean_sinr_db = geometry_sinr_db(c.cell_radius_m, c.dl_tx_power_w, c.indoor, c.antenna_array,
                                    c.n_fb_ues + c.n_mbb_ues);
  c.fading_rho = std::clamp(std::exp(-c.fb_speed_mps / 15.0), 0.0, 0.99);
  c.fading_sigma_db = c.antenna_array == AntennaArray::kMmimo64 ? 4.0 : 6.0;
}

double bler(int m, double sinr_db, double slope_per_db, double gap_db) {
  if (slope_per_db <= 0.0) {
    throw std::domain_error("BLER slope must be positive");
  }
  const double theta = mcs::required_sinr_db(m, gap_db);
  return 1.0 / (1.0 + std::exp(slope_per_db * (sinr_db - theta)));
}

double step_fading(LinkState& link, const ScenarioConfig& cfg, std::mt19937_64& rng) {
  const double rho = cfg.fading_rho;
  const double eps = gaussian(rng);
  link.fading_db = rho * link.fading_db + cfg.fading_sigma_db * std::sqrt(1.0 - rho * rho) * eps;
  link.tti += 1;
  return cfg.mean_sinr_db + link.fading_db;
}

TxResult transmit(LinkState& link, int m, const ScenarioConfig& cfg, const BlerModel& bler_model,
                  std::mt19937_64& rng) {
  if (!link.packet_active) {
    throw std::logic_error("transmit called with no packet in flight");
  }
  TxResult r;
  r.instantaneous_sinr_db = step_fading(link, cfg, rng);
  link.accumulated_energy += std::pow(10.0, r.instantaneous_sinr_db / 10.0);
  r.effective_sinr_db = 10.0 * std::log10(link.accumulated_energy);
  const double p_fail = bler(m, r.effective_sinr_db, bler_model);
  r.success = uniform01(rng) >= p_fail;
  link.attempt += 1;
  r.packet_done = r.success || link.attempt >= cfg.max_dl_tx;
  if (r.packet_done) {
    link.packet_active = false;
    link.accumulated_energy = 0.0;
  }
  return r;
}

namespace {

// 16 representative MCS indices, evenly strided over 0..27.
constexpr std::array<int, 16> kCqiToMcs = {0,  2,  4,  5,  7,  9,  11, 13,
                                           14, 16, 18, 20, 22, 23, 25, 27};
constexpr double kCqiTargetBler = 0.1;

}  // namespace

int cqi_representative_mcs(int cqi) {
  if (cqi < 0 || cqi > 15) {
    throw std::domain_error("CQI out of range 0..15: " + std::to_string(cqi));
  }
  return kCqiToMcs[static_cast<size_t>(cqi)];
}

int cqi_from_sinr(double sinr_db, double slope_per_db, double gap_db) {
  for (int c = 15; c >= 1; --c) {
    if (bler(kCqiToMcs[static_cast<size_t>(c)], sinr_db, slope_per_db, gap_db) <= kCqiTargetBler) {
      return c;
    }
  }
  return 0;
}

double cqi_representative_sinr_db(int cqi, double slope_per_db, double gap_db) {
  const double theta = mcs::required_sinr_db(cqi_representative_mcs(cqi), gap_db);
  // Invert the logistic at the 10% point; the margin keeps the inversion on
  // the decodable side of the rounding boundary.
  return theta + std::log((1.0 - kCqiTargetBler) / kCqiTargetBler) / slope_per_db + 1e-9;
}

LinkSimulator::LinkSimulator(ScenarioConfig cfg, BlerModel bler_model)
    : cfg_(std::move(cfg)), bler_(bler_model), rng_(cfg_.seed) {
  // Start the fading process in its stationary distribution.
  state_.fading_db = cfg_.fading_sigma_db * gaussian(rng_);
  const double initial_sinr = cfg_.mean_sinr_db + state_.fading_db;
  state_.last_cqi = cqi_from_sinr(initial_sinr, bler_.slope_per_db, bler_.gap_db);
  visible_measured_tti_ = 0;
  state_.cqi_age_ttis = 0;
}

void LinkSimulator::start_packet() {
  state_.accumulated_energy = 0.0;
  state_.attempt = 0;
  state_.packet_active = true;
}

void LinkSimulator::observe_tti(double instantaneous_sinr_db) {
  if (state_.tti % cfg_.cqi_period_ttis == 0) {
    pending_measured_tti_ = state_.tti;
    pending_cqi_ = cqi_from_sinr(instantaneous_sinr_db, bler_.slope_per_db, bler_.gap_db);
  }
  if (pending_measured_tti_ >= 0 &&
      state_.tti - pending_measured_tti_ >= cfg_.cqi_delay_ttis) {
    state_.last_cqi = pending_cqi_;
    visible_measured_tti_ = pending_measured_tti_;
    pending_measured_tti_ = -1;
  }
  state_.cqi_age_ttis = static_cast<int>(state_.tti - visible_measured_tti_);
}

TxResult LinkSimulator::transmit(int m) {
  TxResult r = linksim::transmit(state_, m, cfg_, bler_, rng_);
  observe_tti(r.instantaneous_sinr_db);
  return r;
}

double LinkSimulator::cqi_sinr_estimate_db() const {
  return cqi_representative_sinr_db(state_.last_cqi, bler_.slope_per_db, bler_.gap_db);
}

nlohmann::json RandomizationRanges::to_json() const {
  nlohmann::json j;
  std::vector<std::string> ant;
  for (auto a : antenna_array) ant.push_back(to_string(a));
  j["antenna_array"] = ant;
  j["cell_radius_m"] = cell_radius_m;
  j["bandwidth_mhz"] = bandwidth_mhz;
  j["n_subbands"] = n_subbands;
  j["dl_tx_power_w"] = dl_tx_power_w;
  j["ue_antennas"] = ue_antennas;
  j["max_rank"] = max_rank;
  j["max_dl_tx"] = max_dl_tx;
  j["n_fb_ues"] = n_fb_ues;
  j["n_mbb_ues"] = n_mbb_ues;
  j["fb_speed_mps"] = fb_speed_mps;
  j["mbb_speed_mps"] = mbb_speed_mps;
  j["indoor_prob"] = indoor_prob;
  j["cqi_period_ttis"] = cqi_period_ttis;
  j["cqi_delay_ttis"] = cqi_delay_ttis;
  return j;
}

RandomizationRanges RandomizationRanges::from_json(const nlohmann::json& j) {
  RandomizationRanges r;
  if (j.contains("antenna_array")) {
    r.antenna_array.clear();
    for (const auto& s : j.at("antenna_array")) {
      r.antenna_array.push_back(antenna_from_string(s.get<std::string>()));
    }
  }
  auto load = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  load("cell_radius_m", r.cell_radius_m);
  load("bandwidth_mhz", r.bandwidth_mhz);
  load("n_subbands", r.n_subbands);
  load("dl_tx_power_w", r.dl_tx_power_w);
  load("ue_antennas", r.ue_antennas);
  load("max_rank", r.max_rank);
  load("max_dl_tx", r.max_dl_tx);
  load("n_fb_ues", r.n_fb_ues);
  load("n_mbb_ues", r.n_mbb_ues);
  load("fb_speed_mps", r.fb_speed_mps);
  load("mbb_speed_mps", r.mbb_speed_mps);
  load("indoor_prob", r.indoor_prob);
  load("cqi_period_ttis", r.cqi_period_ttis);
  load("cqi_delay_ttis", r.cqi_delay_ttis);
  r.validate();
  return r;
}

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json j;
  j["antenna_array"] = to_string(antenna_array);
  j["cell_radius_m"] = cell_radius_m;
  j["bandwidth_mhz"] = bandwidth_mhz;
  j["n_subbands"] = n_subbands;
  j["dl_tx_power_w"] = dl_tx_power_w;
  j["ue_antennas"] = ue_antennas;
  j["max_rank"] = max_rank;
  j["max_dl_tx"] = max_dl_tx;
  j["n_fb_ues"] = n_fb_ues;
  j["n_mbb_ues"] = n_mbb_ues;
  j["fb_speed_mps"] = fb_speed_mps;
  j["mbb_speed_mps"] = mbb_speed_mps;
  j["indoor_prob"] = indoor_prob;
  j["indoor"] = indoor;
  j["mean_sinr_db"] = mean_sinr_db;
  j["fading_rho"] = fading_rho;
  j["fading_sigma_db"] = fading_sigma_db;
  j["cqi_delay_ttis"] = cqi_delay_ttis;
  j["cqi_period_ttis"] = cqi_period_ttis;
  j["seed"] = seed;
  return j;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  c.antenna_array = antenna_from_string(j.at("antenna_array").get<std::string>());
  c.cell_radius_m = j.at("cell_radius_m").get<double>();
  c.bandwidth_mhz = j.at("bandwidth_mhz").get<double>();
  c.n_subbands = j.at("n_subbands").get<int>();
  c.dl_tx_power_w = j.at("dl_tx_power_w").get<double>();
  c.ue_antennas = j.at("ue_antennas").get<int>();
  c.max_rank = j.at("max_rank").get<int>();
  c.max_dl_tx = j.at("max_dl_tx").get<int>();
  c.n_fb_ues = j.at("n_fb_ues").get<int>();
  c.n_mbb_ues = j.at("n_mbb_ues").get<int>();
  c.fb_speed_mps = j.at("fb_speed_mps").get<double>();
  c.mbb_speed_mps = j.at("mbb_speed_mps").get<double>();
  c.indoor_prob = j.at("indoor_prob").get<double>();
  c.indoor = j.at("indoor").get<bool>();
  c.mean_sinr_db = j.at("mean_sinr_db").get<double>();
  c.fading_rho = j.at("fading_rho").get<double>();
  c.fading_sigma_db = j.at("fading_sigma_db").get<double>();
  c.cqi_delay_ttis = j.at("cqi_delay_ttis").get<int>();
  c.cqi_period_ttis = j.at("cqi_period_ttis").get<int>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

}  // namespace linkrl::linksim
