#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "linkrl/linksim.hpp"
#include "linkrl/net.hpp"
#include "linkrl/rl.hpp"

namespace linkrl::distill {

struct DistillSample {
  env::StateVector state{};
  std::array<double, net::kActionDim> q_teacher{};
};

struct DatasetMeta {
  std::string teacher_id;                  // hash of the teacher's parameters
  std::vector<std::string> scenario_tags;  // scenario families the states came from
  std::string generator;                   // "fresh_sim" | "replay_reuse" | "aggregate"
  uint64_t seed = 0;
  uint64_t count = 0;
};

struct DistillDataset {
  std::vector<DistillSample> samples;
  DatasetMeta meta;

  uint64_t content_hash() const;
  void save(const std::string& path) const;
  static DistillDataset load(const std::string& path);
};

// Rolls the teacher greedily over freshly randomized scenarios until
// n_samples (state, q) pairs are collected. Work is split into fixed
// 500-sample scenario chunks, so the result is identical for any job count.
DistillDataset gen_dataset(const net::DenseNet& teacher, const linksim::RandomizationRanges& ranges,
                           size_t n_samples, uint64_t seed, int jobs = 1,
                           const std::string& scenario_tag = "randomized", double alpha = 0.5,
                           const linksim::BlerModel& bler_model = {});

// (s, forward(teacher, s)) for every distinct state in the replay buffer,
// oldest first. Q-values come from the teacher as passed in, not from
// training time. Throws std::invalid_argument on an empty buffer.
DistillDataset from_replay(const net::DenseNet& teacher, const dqn::ReplayBuffer& replay);

// Concatenates the datasets and applies one seeded permutation; the sample
// multiset is preserved and the metadata unions sources.
DistillDataset aggregate_shuffle(const std::vector<DistillDataset>& datasets, uint64_t seed);

struct DistillConfig {
  std::vector<int> hidden{32, 32, 32};
  double tau = 0.01;
  int epochs = 20;
  double learning_rate = 1e-3;
  int batch_size = 512;
  double holdout_fraction = 0.05;
  uint64_t seed = 1;
};

struct DistillLogRow {
  int epoch = 0;
  double train_kl = 0.0;
  double val_kl = 0.0;
  bool is_best = false;
};

std::string distill_log_csv(const std::vector<DistillLogRow>& log);

struct DistillResult {
  net::DenseNet student;
  std::vector<DistillLogRow> log;
  double best_val_kl = 0.0;
  std::vector<size_t> holdout_indices;  // the 5% validation split
};

// Minimizes the temperature-scaled KL objective over minibatches and returns
// the parameters with the best KL on a held-out split. The teacher dataset
// is read-only throughout.
DistillResult distill(const DistillDataset& dataset, const DistillConfig& cfg);

// Fraction of samples where both nets pick the same greedy action.
double argmax_agreement(const net::DenseNet& a, const net::DenseNet& b,
                        const std::vector<DistillSample>& samples);

}  // namespace linkrl::distill
