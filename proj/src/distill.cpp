#include "linkrl/distill.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "linkrl/common.hpp"

namespace linkrl::distill {

namespace {

constexpr char kMagic[8] = {'L', 'R', 'L', 'D', 'S', 'T', '0', '1'};
constexpr uint32_t kVersion = 1;
constexpr size_t kSamplesPerScenarioChunk = 500;

std::array<double, net::kActionDim> to_q_array(const Eigen::VectorXd& q) {
  std::array<double, net::kActionDim> out{};
  for (int i = 0; i < net::kActionDim; ++i) out[static_cast<size_t>(i)] = q[i];
  return out;
}

}  // namespace

uint64_t DistillDataset::content_hash() const {
  uint64_t h = fnv1a64(meta.generator);
  h = fnv1a64(meta.teacher_id, h);
  for (const auto& s : samples) {
    h = fnv1a64(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.state.data()),
                                         sizeof(s.state)),
                h);
    h = fnv1a64(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.q_teacher.data()),
                                         sizeof(s.q_teacher)),
                h);
  }
  return h;
}

void DistillDataset::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open dataset file for writing: " + path);

  nlohmann::json meta_json;
  meta_json["teacher_id"] = meta.teacher_id;
  meta_json["scenario_tags"] = meta.scenario_tags;
  meta_json["generator"] = meta.generator;
  meta_json["seed"] = meta.seed;
  meta_json["count"] = meta.count;
  const std::string meta_str = meta_json.dump();

  f.write(kMagic, sizeof(kMagic));
  const uint32_t version = kVersion;
  const uint32_t state_dim = net::kStateDim;
  const uint32_t action_dim = net::kActionDim;
  const uint64_t count = samples.size();
  const uint32_t meta_len = static_cast<uint32_t>(meta_str.size());
  f.write(reinterpret_cast<const char*>(&version), sizeof(version));
  f.write(reinterpret_cast<const char*>(&state_dim), sizeof(state_dim));
  f.write(reinterpret_cast<const char*>(&action_dim), sizeof(action_dim));
  f.write(reinterpret_cast<const char*>(&count), sizeof(count));
  f.write(reinterpret_cast<const char*>(&meta_len), sizeof(meta_len));
  f.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
  for (const auto& s : samples) {
    f.write(reinterpret_cast<const char*>(s.state.data()), sizeof(s.state));
    f.write(reinterpret_cast<const char*>(s.q_teacher.data()), sizeof(s.q_teacher));
  }
  if (!f) throw std::runtime_error("failed writing dataset file: " + path);
}

DistillDataset DistillDataset::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open dataset file: " + path);

  auto fail = [&](const std::string& what) {
    throw std::runtime_error("corrupt dataset file " + path + ": " + what + " at byte offset " +
                             std::to_string(static_cast<long>(f.tellg())));
  };

  char magic[8];
  if (!f.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("corrupt dataset file " + path + ": bad magic at byte offset 0");
  }
  uint32_t version = 0, state_dim = 0, action_dim = 0, meta_len = 0;
  uint64_t count = 0;
  if (!f.read(reinterpret_cast<char*>(&version), sizeof(version))) fail("missing version");
  if (version != kVersion) fail("unsupported version " + std::to_string(version));
  if (!f.read(reinterpret_cast<char*>(&state_dim), sizeof(state_dim))) fail("missing state dim");
  if (!f.read(reinterpret_cast<char*>(&action_dim), sizeof(action_dim))) {
    fail("missing action dim");
  }
  if (state_dim != net::kStateDim || action_dim != net::kActionDim) {
    fail("dimension mismatch (" + std::to_string(state_dim) + "x" + std::to_string(action_dim) +
         ")");
  }
  if (!f.read(reinterpret_cast<char*>(&count), sizeof(count))) fail("missing sample count");
  if (!f.read(reinterpret_cast<char*>(&meta_len), sizeof(meta_len))) fail("missing metadata size");
  std::string meta_str(meta_len, '\0');
  if (!f.read(meta_str.data(), meta_len)) fail("truncated metadata");

  DistillDataset d;
  try {
    const auto j = nlohmann::json::parse(meta_str);
    d.meta.teacher_id = j.at("teacher_id").get<std::string>();
    d.meta.scenario_tags = j.at("scenario_tags").get<std::vector<std::string>>();
    d.meta.generator = j.at("generator").get<std::string>();
    d.meta.seed = j.at("seed").get<uint64_t>();
    d.meta.count = j.at("count").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("invalid metadata JSON: ") + e.what());
  }

  d.samples.resize(count);
  for (auto& s : d.samples) {
    if (!f.read(reinterpret_cast<char*>(s.state.data()), sizeof(s.state))) {
      fail("truncated sample state");
    }
    if (!f.read(reinterpret_cast<char*>(s.q_teacher.data()), sizeof(s.q_teacher))) {
      fail("truncated sample q-vector");
    }
  }
  if (d.meta.count != d.samples.size()) fail("count field disagrees with payload");
  return d;
}

namespace {

// One scenario worth of greedy teacher rollouts.
std::vector<DistillSample> gen_chunk(const net::DenseNet& teacher,
                                     const linksim::RandomizationRanges& ranges, uint64_t seed,
                                     size_t n, double alpha,
                                     const linksim::BlerModel& bler_model) {
  std::vector<DistillSample> out;
  out.reserve(n);
  const auto scenario = linksim::sample_scenario(ranges, seed);
  env::LinkAdaptEnv e(scenario, env::RewardConfig{alpha, 0}, bler_model);
  while (out.size() < n) {
    env::StateVector s = e.reset();
    while (out.size() < n) {
      const Eigen::VectorXd q = teacher.forward(s);
      int a = 0;
      for (int i = 1; i < net::kActionDim; ++i) {
        if (q[i] > q[a]) a = i;
      }
      out.push_back(DistillSample{s, to_q_array(q)});
      auto [next, info] = e.step(a);
      if (info.done) break;
      s = *next;
    }
  }
  return out;
}

}  // namespace

DistillDataset gen_dataset(const net::DenseNet& teacher, const linksim::RandomizationRanges& ranges,
                           size_t n_samples, uint64_t seed, int jobs,
                           const std::string& scenario_tag, double alpha,
                           const linksim::BlerModel& bler_model) {
  ranges.validate();
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");

  DistillDataset d;
  d.meta.teacher_id = hex64(teacher.param_hash());
  d.meta.scenario_tags = {scenario_tag};
  d.meta.generator = "fresh_sim";
  d.meta.seed = seed;

  const size_t n_chunks = (n_samples + kSamplesPerScenarioChunk - 1) / kSamplesPerScenarioChunk;
  std::vector<std::vector<DistillSample>> chunks(n_chunks);
  auto run_chunk = [&](size_t k) {
    const size_t want = std::min(kSamplesPerScenarioChunk,
                                 n_samples - k * kSamplesPerScenarioChunk);
    chunks[k] = gen_chunk(teacher, ranges, derive_seed(seed, k), want, alpha, bler_model);
  };

  if (jobs == 1 || n_chunks <= 1) {
    for (size_t k = 0; k < n_chunks; ++k) run_chunk(k);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t k = next.fetch_add(1); k < n_chunks; k = next.fetch_add(1)) run_chunk(k);
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(jobs, static_cast<int>(n_chunks));
    pool.reserve(static_cast<size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  d.samples.reserve(n_samples);
  for (auto& c : chunks) {
    d.samples.insert(d.samples.end(), c.begin(), c.end());
  }
  d.meta.count = d.samples.size();
  return d;
}

DistillDataset from_replay(const net::DenseNet& teacher, const dqn::ReplayBuffer& replay) {
  if (replay.size() == 0) {
    throw std::invalid_argument("cannot build a distillation dataset from an empty replay buffer");
  }
  DistillDataset d;
  d.meta.teacher_id = hex64(teacher.param_hash());
  d.meta.scenario_tags = {"replay"};
  d.meta.generator = "replay_reuse";
  d.meta.seed = 0;

  std::unordered_set<uint64_t> seen;
  seen.reserve(replay.size() * 2);
  d.samples.reserve(replay.size());
  for (size_t i = 0; i < replay.size(); ++i) {
    const env::StateVector& s = replay.at(i).state;
    const uint64_t key = fnv1a64(
        std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), sizeof(s)));
    if (!seen.insert(key).second) continue;
    d.samples.push_back(DistillSample{s, to_q_array(teacher.forward(s))});
  }
  d.meta.count = d.samples.size();
  return d;
}

DistillDataset aggregate_shuffle(const std::vector<DistillDataset>& datasets, uint64_t seed) {
  if (datasets.empty()) {
    throw std::invalid_argument("aggregate_shuffle needs at least one dataset");
  }
  DistillDataset out;
  out.meta.generator = "aggregate";
  out.meta.seed = seed;
  size_t total = 0;
  for (const auto& d : datasets) total += d.samples.size();
  out.samples.reserve(total);
  for (const auto& d : datasets) {
    out.samples.insert(out.samples.end(), d.samples.begin(), d.samples.end());
    if (!out.meta.teacher_id.empty()) out.meta.teacher_id += "+";
    out.meta.teacher_id += d.meta.teacher_id;
    for (const auto& tag : d.meta.scenario_tags) {
      if (std::find(out.meta.scenario_tags.begin(), out.meta.scenario_tags.end(), tag) ==
          out.meta.scenario_tags.end()) {
        out.meta.scenario_tags.push_back(tag);
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::shuffle(out.samples.begin(), out.samples.end(), rng);
  out.meta.count = out.samples.size();
  return out;
}

std::string distill_log_csv(const std::vector<DistillLogRow>& log) {
  std::string out = "epoch,train_kl,val_kl,is_best\n";
  char row[96];
  for (const auto& r : log) {
    std::snprintf(row, sizeof(row), "%d,%.8f,%.8f,%d\n", r.epoch, r.train_kl, r.val_kl,
                  r.is_best ? 1 : 0);
    out += row;
  }
  return out;
}

namespace {

double mean_val_kl(const net::DenseNet& student, const DistillDataset& data,
                   const std::vector<size_t>& idx, double tau) {
  if (idx.empty()) return 0.0;
  double total = 0.0;
  for (size_t i : idx) {
    const auto& s = data.samples[i];
    const Eigen::VectorXd q = student.forward(s.state);
    const Eigen::VectorXd qt =
        Eigen::Map<const Eigen::VectorXd>(s.q_teacher.data(), net::kActionDim);
    total += net::kl_loss(qt, q, tau).loss;
  }
  return total / static_cast<double>(idx.size());
}

}  // namespace

DistillResult distill(const DistillDataset& dataset, const DistillConfig& cfg) {
  if (dataset.samples.empty()) {
    throw std::invalid_argument("cannot distill from an empty dataset");
  }
  if (!(cfg.tau > 0.0)) throw std::domain_error("tau must be positive");
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be >= 1");

  const size_t n = dataset.samples.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 split_rng(derive_seed(cfg.seed, 11));
  std::shuffle(order.begin(), order.end(), split_rng);

  size_t n_val = static_cast<size_t>(static_cast<double>(n) * cfg.holdout_fraction);
  if (n_val == 0 && n > 1) n_val = 1;
  std::vector<size_t> val_idx(order.begin(), order.begin() + static_cast<long>(n_val));
  std::vector<size_t> train_idx(order.begin() + static_cast<long>(n_val), order.end());
  if (train_idx.empty()) train_idx = val_idx;  // degenerate single-sample dataset

  DistillResult result;
  result.student = net::DenseNet::init(net::layer_dims(cfg.hidden), cfg.seed);
  net::DenseNet best = result.student;
  double best_val = mean_val_kl(result.student, dataset, val_idx, cfg.tau);

  net::Adam opt(result.student, net::AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});
  std::mt19937_64 batch_rng(derive_seed(cfg.seed, 12));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), batch_rng);
    double epoch_loss = 0.0;
    long batches = 0;
    for (size_t start = 0; start < train_idx.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop = std::min(train_idx.size(), start + static_cast<size_t>(cfg.batch_size));
      const auto b = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd inputs(net::kStateDim, b);
      Eigen::MatrixXd q_teacher(net::kActionDim, b);
      for (Eigen::Index j = 0; j < b; ++j) {
        const auto& s = dataset.samples[train_idx[start + static_cast<size_t>(j)]];
        inputs.col(j) = Eigen::Map<const Eigen::VectorXd>(s.state.data(), net::kStateDim);
        q_teacher.col(j) =
            Eigen::Map<const Eigen::VectorXd>(s.q_teacher.data(), net::kActionDim);
      }
      auto loss = [&](const Eigen::MatrixXd& q, Eigen::MatrixXd& grad) {
        double total = 0.0;
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
          const auto r = net::kl_loss(q_teacher.col(j), q.col(j), cfg.tau);
          total += r.loss;
          grad.col(j) = r.grad_q_student;
        }
        return total;
      };
      epoch_loss += net::train_step(result.student, inputs, loss, opt);
      batches += 1;
    }

    DistillLogRow row;
    row.epoch = epoch;
    row.train_kl = batches > 0 ? epoch_loss / static_cast<double>(batches) : 0.0;
    row.val_kl = mean_val_kl(result.student, dataset, val_idx, cfg.tau);
    if (row.val_kl < best_val) {
      best_val = row.val_kl;
      best = result.student;
      row.is_best = true;
    }
    result.log.push_back(row);
  }

  result.student = std::move(best);
  result.best_val_kl = best_val;
  result.holdout_indices = std::move(val_idx);
  return result;
}

double argmax_agreement(const net::DenseNet& a, const net::DenseNet& b,
                        const std::vector<DistillSample>& samples) {
  if (samples.empty()) return 1.0;
  long agree = 0;
  for (const auto& s : samples) {
    if (a.argmax_action(s.state) == b.argmax_action(s.state)) agree += 1;
  }
  return static_cast<double>(agree) / static_cast<double>(samples.size());
}

}  // namespace linkrl::distill
