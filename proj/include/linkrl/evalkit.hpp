#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "linkrl/policy.hpp"

namespace linkrl::evalkit {

struct BenchmarkScenario {
  std::string name;
  linksim::ScenarioConfig config;
  uint64_t eval_seed = 0;
};

// The three fixed benchmark scenarios (SCSU, MIMO, mMIMO). Deployment values
// sit off the training grid and the seeds are frozen constants disjoint from
// training streams.
struct ScenarioSuite {
  std::vector<BenchmarkScenario> scenarios;
  static ScenarioSuite standard();
  const BenchmarkScenario& by_name(const std::string& name) const;
};

// Per-family narrow randomization used to train specialist teachers. The
// family names match the benchmark scenario names.
linksim::RandomizationRanges specialist_ranges(const std::string& family);

struct MetricsReport {
  double mean_ue_throughput = 0.0;   // SE of the delivered attempt / episode TTIs
  double bler = 0.0;                 // failed transmissions / total transmissions
  double mean_episodic_reward = 0.0; // gamma = 1
  long n_episodes = 0;
  long total_tx = 0;
  long failed_tx = 0;
  std::vector<double> throughput_samples;  // one per episode
  std::array<long, net::kActionDim> action_counts{};
};

struct EvalOptions {
  env::RewardConfig reward{};
  linksim::BlerModel bler_model{};
  std::string trace_csv_path;  // per-step trace when non-empty
};

MetricsReport evaluate(Policy& policy, const BenchmarkScenario& scenario, long n_episodes,
                       uint64_t seed, const EvalOptions& opts = {});

struct PolicyComparison {
  std::optional<double> delta_throughput_pct;
  std::optional<double> delta_bler_pct;
  std::optional<double> delta_reward_pct;
};

// Relative gain/loss of a student report against its reference (teacher)
// report: 100 * (student - teacher) / teacher per metric. Zero denominators
// yield flagged (absent) values instead of infinities.
PolicyComparison relative_gain(const MetricsReport& student, const MetricsReport& teacher);

// Normalized action histogram over greedy rollouts.
std::array<double, net::kActionDim> action_pdf(Policy& policy, const BenchmarkScenario& scenario,
                                               long n_steps, uint64_t seed,
                                               const EvalOptions& opts = {});

// Jensen-Shannon divergence, natural log, in [0, ln 2].
double js_divergence(std::span<const double> p, std::span<const double> q);

// Empirical CDF of the per-episode throughput samples.
std::vector<std::pair<double, double>> throughput_cdf(const MetricsReport& report);

struct PolicyEval {
  std::string policy_name;
  MetricsReport report;
  std::array<double, net::kActionDim> pdf{};
};

struct ScenarioReports {
  std::string scenario;
  std::vector<PolicyEval> evals;
};

struct ComparisonRow {
  std::string distillation;  // "single-policy" | "multi-policy" | "scratch-control" | ...
  std::string student;
  std::string scenario;
  PolicyComparison comparison;
};

std::string comparison_table_csv(const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> parse_comparison_table_csv(const std::string& csv);

// Writes table2.csv, cdf_<scenario>.csv / pdf_<scenario>.csv per scenario,
// manifest.json, and optional SVG charts into out_dir.
void report_write(const std::vector<ScenarioReports>& reports,
                  const std::vector<ComparisonRow>& comparisons, const nlohmann::json& manifest,
                  const std::string& out_dir, bool svg = false);

}  // namespace linkrl::evalkit
