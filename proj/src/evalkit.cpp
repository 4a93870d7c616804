#include "linkrl/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "linkrl/mcs.hpp"
#include "linkrl/svg.hpp"

namespace linkrl::evalkit {

namespace fs = std::filesystem;

namespace {

linksim::ScenarioConfig benchmark_config(linksim::AntennaArray antenna, int n_fb_ues,
                                         uint64_t seed) {
  linksim::ScenarioConfig c;
  // Off the training grid on purpose: radius/bandwidth/power/speed values
  // sit between the randomization candidates.
  c.antenna_array = antenna;
  c.cell_radius_m = 500;
  c.bandwidth_mhz = 60;
  c.n_subbands = 160;
  c.dl_tx_power_w = 60;
  c.ue_antennas = 2;
  c.max_rank = 2;
  c.max_dl_tx = 5;
  c.n_fb_ues = n_fb_ues;
  c.n_mbb_ues = 0;
  c.fb_speed_mps = 5;
  c.mbb_speed_mps = 1;
  c.indoor_prob = 0.0;
  c.indoor = false;
  c.cqi_delay_ttis = 2;
  c.cqi_period_ttis = 5;
  c.seed = seed;
  linksim::derive_link_params(c);
  return c;
}

}  // namespace

ScenarioSuite ScenarioSuite::standard() {
  ScenarioSuite suite;
  suite.scenarios.push_back(
      {"SCSU", benchmark_config(linksim::AntennaArray::kMimo4, 1, 7100001), 8200001});
  suite.scenarios.push_back(
      {"MIMO", benchmark_config(linksim::AntennaArray::kMimo4, 10, 7100002), 8200002});
  suite.scenarios.push_back(
      {"mMIMO", benchmark_config(linksim::AntennaArray::kMmimo64, 10, 7100003), 8200003});
  return suite;
}

const BenchmarkScenario& ScenarioSuite::by_name(const std::string& name) const {
  for (const auto& s : scenarios) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("unknown benchmark scenario: " + name);
}

linksim::RandomizationRanges specialist_ranges(const std::string& family) {
  linksim::RandomizationRanges r;
  r.cell_radius_m = {600};
  r.bandwidth_mhz = {50};
  r.n_subbands = {133};
  r.dl_tx_power_w = {50};
  r.ue_antennas = {2};
  r.max_rank = {2};
  r.n_mbb_ues = {5};
  r.fb_speed_mps = {10};
  r.mbb_speed_mps = {1.5};
  r.indoor_prob = {0.2};
  if (family == "SCSU") {
    r.antenna_array = {linksim::AntennaArray::kMimo4};
    r.n_fb_ues = {1};
  } else if (family == "MIMO") {
    r.antenna_array = {linksim::AntennaArray::kMimo4};
    r.n_fb_ues = {10};
  } else if (family == "mMIMO") {
    r.antenna_array = {linksim::AntennaArray::kMmimo64};
    r.n_fb_ues = {10};
  } else {
    throw std::invalid_argument("unknown specialist family: " + family);
  }
  return r;
}

MetricsReport evaluate(Policy& policy, const BenchmarkScenario& scenario, long n_episodes,
                       uint64_t seed, const EvalOptions& opts) {
  linksim::ScenarioConfig cfg = scenario.config;
  cfg.seed = seed;
  env::LinkAdaptEnv e(cfg, opts.reward, opts.bler_model);
  policy.begin_run();

  std::ofstream trace;
  if (!opts.trace_csv_path.empty()) {
    trace.open(opts.trace_csv_path, std::ios::trunc);
    if (!trace) throw std::runtime_error("cannot open trace file: " + opts.trace_csv_path);
    trace << "tti,n,action,sinr_eff,success,reward\n";
  }

  MetricsReport r;
  r.n_episodes = n_episodes;
  r.throughput_samples.reserve(static_cast<size_t>(n_episodes));
  double reward_total = 0.0;
  for (long ep = 0; ep < n_episodes; ++ep) {
    env::StateVector s = e.reset();
    double ep_reward = 0.0;
    bool delivered = false;
    double delivered_se = 0.0;
    int attempts = 0;
    while (true) {
      const int a = policy.act(s);
      auto [next, info] = e.step(a);
      policy.on_feedback(info.success, info.attempt == 0);
      r.action_counts[static_cast<size_t>(a)] += 1;
      r.total_tx += 1;
      if (!info.success) r.failed_tx += 1;
      ep_reward += info.reward;
      attempts = info.attempt + 1;
      if (trace.is_open()) {
        char row[128];
        std::snprintf(row, sizeof(row), "%ld,%d,%d,%.4f,%d,%.4f\n", info.tti, info.attempt, a,
                      info.effective_sinr_db, info.success ? 1 : 0, info.reward);
        trace << row;
      }
      if (info.done) {
        delivered = info.success;
        if (delivered) delivered_se = mcs::spectral_efficiency(a);
        break;
      }
      s = *next;
    }
    reward_total += ep_reward;
    r.throughput_samples.push_back(delivered ? delivered_se / attempts : 0.0);
  }

  if (n_episodes > 0) {
    double tput = 0.0;
    for (double v : r.throughput_samples) tput += v;
    r.mean_ue_throughput = tput / static_cast<double>(n_episodes);
    r.mean_episodic_reward = reward_total / static_cast<double>(n_episodes);
  }
  r.bler = r.total_tx > 0 ? static_cast<double>(r.failed_tx) / static_cast<double>(r.total_tx)
                          : 0.0;
  return r;
}

namespace {

std::optional<double> pct_change(double value, double reference) {
  if (reference == 0.0) return std::nullopt;
  return 100.0 * (value - reference) / reference;
}

}  // namespace

PolicyComparison relative_gain(const MetricsReport& student, const MetricsReport& teacher) {
  PolicyComparison c;
  c.delta_throughput_pct = pct_change(student.mean_ue_throughput, teacher.mean_ue_throughput);
  c.delta_bler_pct = pct_change(student.bler, teacher.bler);
  c.delta_reward_pct = pct_change(student.mean_episodic_reward, teacher.mean_episodic_reward);
  return c;
}

std::array<double, net::kActionDim> action_pdf(Policy& policy, const BenchmarkScenario& scenario,
                                               long n_steps, uint64_t seed,
                                               const EvalOptions& opts) {
  if (n_steps <= 0) throw std::invalid_argument("action_pdf needs n_steps > 0");
  linksim::ScenarioConfig cfg = scenario.config;
  cfg.seed = seed;
  env::LinkAdaptEnv e(cfg, opts.reward, opts.bler_model);
  policy.begin_run();

  std::array<double, net::kActionDim> pdf{};
  long taken = 0;
  while (taken < n_steps) {
    env::StateVector s = e.reset();
    while (taken < n_steps) {
      const int a = policy.act(s);
      auto [next, info] = e.step(a);
      policy.on_feedback(info.success, info.attempt == 0);
      pdf[static_cast<size_t>(a)] += 1.0;
      taken += 1;
      if (info.done) break;
      s = *next;
    }
  }
  for (auto& v : pdf) v /= static_cast<double>(n_steps);
  return pdf;
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distribution lengths differ");
  auto kl_to_mix = [&](std::span<const double> a) {
    double kl = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i] > 0.0) {
        const double m = 0.5 * (p[i] + q[i]);
        kl += a[i] * std::log(a[i] / m);
      }
    }
    return kl;
  };
  return 0.5 * kl_to_mix(p) + 0.5 * kl_to_mix(q);
}

std::vector<std::pair<double, double>> throughput_cdf(const MetricsReport& report) {
  if (report.throughput_samples.empty()) {
    throw std::invalid_argument("throughput CDF needs at least one sample");
  }
  std::vector<double> sorted = report.throughput_samples;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> cdf;
  cdf.reserve(sorted.size());
  const auto n = static_cast<double>(sorted.size());
  for (size_t i = 0; i < sorted.size(); ++i) {
    cdf.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

std::string comparison_table_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "distillation,student,scenario,delta_T_pct,delta_BLER_pct,delta_r_pct\n";
  for (const auto& r : rows) {
    out += r.distillation + "," + r.student + "," + r.scenario + "," +
           fmt_opt(r.comparison.delta_throughput_pct) + "," +
           fmt_opt(r.comparison.delta_bler_pct) + "," + fmt_opt(r.comparison.delta_reward_pct) +
           "\n";
  }
  return out;
}

std::vector<ComparisonRow> parse_comparison_table_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty comparison table");
  std::vector<ComparisonRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 6> cells;
    size_t cell = 0, start = 0;
    for (size_t i = 0; i <= line.size() && cell < cells.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        cells[cell++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (cell != cells.size()) throw std::runtime_error("malformed comparison row: " + line);
    ComparisonRow r;
    r.distillation = cells[0];
    r.student = cells[1];
    r.scenario = cells[2];
    r.comparison.delta_throughput_pct = parse_opt(cells[3]);
    r.comparison.delta_bler_pct = parse_opt(cells[4]);
    r.comparison.delta_reward_pct = parse_opt(cells[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void report_write(const std::vector<ScenarioReports>& reports,
                  const std::vector<ComparisonRow>& comparisons, const nlohmann::json& manifest,
                  const std::string& out_dir, bool svg_charts) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  svg::write_file((dir / "table2.csv").string(), comparison_table_csv(comparisons));

  for (const auto& sr : reports) {
    std::string cdf_csv = "policy,throughput,cum_frac\n";
    std::string pdf_csv = "policy,mcs,prob\n";
    char row[128];
    for (const auto& pe : sr.evals) {
      for (auto [v, f] : throughput_cdf(pe.report)) {
        std::snprintf(row, sizeof(row), "%s,%.6f,%.8f\n", pe.policy_name.c_str(), v, f);
        cdf_csv += row;
      }
      for (int m = 0; m < net::kActionDim; ++m) {
        std::snprintf(row, sizeof(row), "%s,%d,%.8f\n", pe.policy_name.c_str(), m,
                      pe.pdf[static_cast<size_t>(m)]);
        pdf_csv += row;
      }
    }
    svg::write_file((dir / ("cdf_" + sr.scenario + ".csv")).string(), cdf_csv);
    svg::write_file((dir / ("pdf_" + sr.scenario + ".csv")).string(), pdf_csv);

    if (svg_charts) {
      std::vector<svg::Series> cdf_series;
      std::vector<std::pair<std::string, std::vector<double>>> pdf_series;
      for (const auto& pe : sr.evals) {
        svg::Series s;
        s.label = pe.policy_name;
        s.points = throughput_cdf(pe.report);
        cdf_series.push_back(std::move(s));
        pdf_series.emplace_back(pe.policy_name,
                                std::vector<double>(pe.pdf.begin(), pe.pdf.end()));
      }
      std::vector<std::string> mcs_labels;
      for (int m = 0; m < net::kActionDim; ++m) mcs_labels.push_back(std::to_string(m));
      svg::write_file((dir / ("cdf_" + sr.scenario + ".svg")).string(),
                      svg::line_chart(cdf_series, "UE throughput CDF - " + sr.scenario,
                                      "throughput (SE per TTI)", "cumulative fraction"));
      svg::write_file((dir / ("pdf_" + sr.scenario + ".svg")).string(),
                      svg::bar_chart(mcs_labels, pdf_series,
                                     "Selected MCS PDF - " + sr.scenario, "probability"));
    }
  }

  std::ofstream mf(dir / "manifest.json", std::ios::trunc);
  if (!mf) throw std::runtime_error("cannot write manifest.json in " + out_dir);
  mf << manifest.dump(2) << "\n";
}

}  // namespace linkrl::evalkit
