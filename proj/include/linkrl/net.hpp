#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "linkrl/env.hpp"

namespace linkrl::net {

inline constexpr int kStateDim = env::kStateDim;  // 16
inline constexpr int kActionDim = 28;

// Hidden widths "L x H" -> full layer dims [16, H, ..., H, 28].
std::vector<int> layer_dims(const std::vector<int>& hidden);

// Closed-form parameter count for a dims list: sum over layers of
// (fan_in + 1) * fan_out.
size_t param_count_for_dims(const std::vector<int>& dims);

struct Gradients {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
};

// Dense feed-forward net: rectified-linear hidden layers, identity output
// (unnormalized Q-values). All math in 64-bit. Forward passes are const and
// safe to run concurrently on a shared snapshot.
class DenseNet {
 public:
  DenseNet() = default;

  // He-normal weights (variance 2/fan_in), zero biases, deterministic per
  // seed. dims must start at 16 and end at 28.
  static DenseNet init(const std::vector<int>& dims, uint64_t seed);

  const std::vector<int>& dims() const { return dims_; }
  size_t param_count() const;
  int n_layers() const { return static_cast<int>(weights_.size()); }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::VectorXd forward(const env::StateVector& s) const;
  int argmax_action(const env::StateVector& s) const;

  // Columns are samples. `cache` keeps post-activation values per layer for
  // the backward pass (cache.acts[0] is the input, back() the output).
  struct Cache {
    std::vector<Eigen::MatrixXd> acts;
  };
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs, Cache& cache) const;

  // grad_output has one column per sample (d loss / d q). Returns summed
  // (not averaged) parameter gradients.
  Gradients backward(const Cache& cache, const Eigen::MatrixXd& grad_output) const;

  Gradients zero_gradients() const;

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  std::vector<uint8_t> serialize() const;
  static DenseNet deserialize(const std::vector<uint8_t>& bytes);
  void save(const std::string& path) const;
  static DenseNet load(const std::string& path);
  uint64_t param_hash() const;

 private:
  std::vector<int> dims_;
  std::vector<Eigen::MatrixXd> weights_;  // [l]: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases_;   // [l]: dims[l+1]
};

// Temperature softmax, max-subtracted. Throws std::domain_error for tau <= 0.
Eigen::VectorXd softmax_temp(const Eigen::VectorXd& q, double tau);

struct KlResult {
  double loss = 0.0;
  Eigen::VectorXd grad_q_student;
};

// KL( softmax(q_teacher / tau) || softmax(q_student) ), natural log, with
// the analytic student gradient softmax(q_student) - softmax(q_teacher/tau).
// The teacher side is treated as a constant.
KlResult kl_loss(const Eigen::VectorXd& q_teacher, const Eigen::VectorXd& q_student, double tau);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(const DenseNet& net, AdamConfig cfg);
  // One update from already-averaged gradients.
  void apply(DenseNet& net, const Gradients& grads);
  long step_count() const { return step_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  Gradients m_, v_;
  long step_ = 0;
};

// Fills `grad` (kActionDim x batch) given the batch outputs `q`; returns the
// summed loss over the batch. train_step averages both by the batch size.
using BatchLoss = std::function<double(const Eigen::MatrixXd& q, Eigen::MatrixXd& grad)>;

// Forward, loss, backward, Adam. Returns the mean loss. Throws
// std::runtime_error when the loss is not finite.
double train_step(DenseNet& net, const Eigen::MatrixXd& inputs, const BatchLoss& loss, Adam& opt);

}  // namespace linkrl::net
