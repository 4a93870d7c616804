#include "linkrl/net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "linkrl/common.hpp"

namespace linkrl::net {

namespace {

constexpr char kMagic[8] = {'L', 'R', 'L', 'N', 'E', 'T', '0', '1'};

void append_bytes(std::vector<uint8_t>& out, const void* p, size_t n) {
  const auto* b = static_cast<const uint8_t*>(p);
  out.insert(out.end(), b, b + n);
}

}  // namespace

std::vector<int> layer_dims(const std::vector<int>& hidden) {
  std::vector<int> dims;
  dims.reserve(hidden.size() + 2);
  dims.push_back(kStateDim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(kActionDim);
  return dims;
}

size_t param_count_for_dims(const std::vector<int>& dims) {
  size_t n = 0;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    n += static_cast<size_t>(dims[l] + 1) * static_cast<size_t>(dims[l + 1]);
  }
  return n;
}

DenseNet DenseNet::init(const std::vector<int>& dims, uint64_t seed) {
  if (dims.size() < 2 || dims.front() != kStateDim || dims.back() != kActionDim) {
    throw std::invalid_argument("layer dims must start at 16 and end at 28");
  }
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("layer widths must be >= 1");
  }
  DenseNet net;
  net.dims_ = dims;
  std::mt19937_64 rng(seed);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    Eigen::MatrixXd w(fan_out, fan_in);
    const double stddev = std::sqrt(2.0 / fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        w(r, c) = stddev * gaussian(rng);
      }
    }
    net.weights_.push_back(std::move(w));
    net.biases_.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

size_t DenseNet::param_count() const { return param_count_for_dims(dims_); }

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd a = x;
  const int n = n_layers();
  for (int l = 0; l < n; ++l) {
    Eigen::VectorXd z = weights_[l] * a + biases_[l];
    if (l + 1 < n) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Eigen::VectorXd DenseNet::forward(const env::StateVector& s) const {
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(s.data(), kStateDim);
  return forward(x);
}

int DenseNet::argmax_action(const env::StateVector& s) const {
  const Eigen::VectorXd q = forward(s);
  int best = 0;
  for (int i = 1; i < kActionDim; ++i) {
    if (q[i] > q[best]) best = i;  // ties keep the lowest index
  }
  return best;
}

Eigen::MatrixXd DenseNet::forward_batch(const Eigen::MatrixXd& inputs) const {
  Cache cache;
  return forward_batch(inputs, cache);
}

Eigen::MatrixXd DenseNet::forward_batch(const Eigen::MatrixXd& inputs, Cache& cache) const {
  if (inputs.rows() != dims_.front()) {
    throw std::invalid_argument("batch input row count does not match the net input width");
  }
  const int n = n_layers();
  cache.acts.clear();
  cache.acts.reserve(static_cast<size_t>(n) + 1);
  cache.acts.push_back(inputs);
  for (int l = 0; l < n; ++l) {
    Eigen::MatrixXd z = (weights_[l] * cache.acts.back()).colwise() + biases_[l];
    if (l + 1 < n) z = z.cwiseMax(0.0);
    cache.acts.push_back(std::move(z));
  }
  return cache.acts.back();
}

Gradients DenseNet::zero_gradients() const {
  Gradients g;
  for (int l = 0; l < n_layers(); ++l) {
    g.w.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    g.b.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  return g;
}

Gradients DenseNet::backward(const Cache& cache, const Eigen::MatrixXd& grad_output) const {
  const int n = n_layers();
  if (cache.acts.size() != static_cast<size_t>(n) + 1) {
    throw std::invalid_argument("backward called with a stale forward cache");
  }
  Gradients g;
  g.w.resize(n);
  g.b.resize(n);
  Eigen::MatrixXd delta = grad_output;
  for (int l = n - 1; l >= 0; --l) {
    g.w[l].noalias() = delta * cache.acts[static_cast<size_t>(l)].transpose();
    g.b[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = weights_[l].transpose() * delta;
      // Rectifier mask from the stored post-activations.
      delta = back.cwiseProduct(
          (cache.acts[static_cast<size_t>(l)].array() > 0.0).cast<double>().matrix());
    }
  }
  return g;
}

Eigen::VectorXd softmax_temp(const Eigen::VectorXd& q, double tau) {
  if (!(tau > 0.0)) {
    throw std::domain_error("softmax temperature must be positive");
  }
  Eigen::ArrayXd scaled = q.array() / tau;
  const double mx = scaled.maxCoeff();
  Eigen::ArrayXd e = (scaled - mx).exp();
  return (e / e.sum()).matrix();
}

KlResult kl_loss(const Eigen::VectorXd& q_teacher, const Eigen::VectorXd& q_student, double tau) {
  if (q_teacher.size() != q_student.size()) {
    throw std::invalid_argument("teacher/student Q-vector lengths differ");
  }
  // Stable log-softmax for both sides.
  Eigen::ArrayXd t = q_teacher.array() / tau;
  t -= t.maxCoeff();
  const double lse_t = std::log(t.exp().sum());
  Eigen::ArrayXd log_p = t - lse_t;

  Eigen::ArrayXd s = q_student.array();
  s -= s.maxCoeff();
  const double lse_s = std::log(s.exp().sum());
  Eigen::ArrayXd log_s = s - lse_s;

  const Eigen::ArrayXd p = log_p.exp();
  KlResult r;
  r.loss = std::max(0.0, (p * (log_p - log_s)).sum());
  r.grad_q_student = (log_s.exp() - p).matrix();
  return r;
}

Adam::Adam(const DenseNet& net, AdamConfig cfg) : cfg_(cfg) {
  m_ = net.zero_gradients();
  v_ = net.zero_gradients();
}

void Adam::apply(DenseNet& net, const Gradients& grads) {
  step_ += 1;
  const double b1 = cfg_.beta1;
  const double b2 = cfg_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = cfg_.learning_rate;
  for (size_t l = 0; l < grads.w.size(); ++l) {
    m_.w[l] = b1 * m_.w[l] + (1.0 - b1) * grads.w[l];
    v_.w[l] = b2 * v_.w[l] + (1.0 - b2) * grads.w[l].cwiseProduct(grads.w[l]);
    net.weights()[l].array() -=
        lr * (m_.w[l].array() / bc1) / ((v_.w[l].array() / bc2).sqrt() + cfg_.epsilon);

    m_.b[l] = b1 * m_.b[l] + (1.0 - b1) * grads.b[l];
    v_.b[l] = b2 * v_.b[l] + (1.0 - b2) * grads.b[l].cwiseProduct(grads.b[l]);
    net.biases()[l].array() -=
        lr * (m_.b[l].array() / bc1) / ((v_.b[l].array() / bc2).sqrt() + cfg_.epsilon);
  }
}

double train_step(DenseNet& net, const Eigen::MatrixXd& inputs, const BatchLoss& loss, Adam& opt) {
  const auto batch = static_cast<double>(inputs.cols());
  if (batch < 1) throw std::invalid_argument("empty training batch");

  DenseNet::Cache cache;
  const Eigen::MatrixXd q = net.forward_batch(inputs, cache);
  Eigen::MatrixXd grad_q = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  const double total_loss = loss(q, grad_q);
  if (!std::isfinite(total_loss)) {
    throw std::runtime_error("non-finite training loss (" + std::to_string(total_loss) +
                             ") at optimizer step " + std::to_string(opt.step_count() + 1));
  }
  grad_q /= batch;
  Gradients grads = net.backward(cache, grad_q);
  opt.apply(net, grads);
  return total_loss / batch;
}

std::vector<uint8_t> DenseNet::serialize() const {
  std::vector<uint8_t> out;
  append_bytes(out, kMagic, sizeof(kMagic));
  const uint32_t n_dims = static_cast<uint32_t>(dims_.size());
  append_bytes(out, &n_dims, sizeof(n_dims));
  for (int d : dims_) {
    const uint32_t v = static_cast<uint32_t>(d);
    append_bytes(out, &v, sizeof(v));
  }
  for (int l = 0; l < n_layers(); ++l) {
    // Row-major per output neuron, then the bias vector.
    for (int r = 0; r < weights_[l].rows(); ++r) {
      for (int c = 0; c < weights_[l].cols(); ++c) {
        const double v = weights_[l](r, c);
        append_bytes(out, &v, sizeof(v));
      }
    }
    append_bytes(out, biases_[l].data(), sizeof(double) * static_cast<size_t>(biases_[l].size()));
  }
  return out;
}

DenseNet DenseNet::deserialize(const std::vector<uint8_t>& bytes) {
  size_t off = 0;
  auto need = [&](size_t n, const char* what) {
    if (off + n > bytes.size()) {
      throw std::runtime_error("model data truncated at byte offset " + std::to_string(off) +
                               " while reading " + what);
    }
  };
  need(sizeof(kMagic), "magic");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("bad model magic at byte offset 0");
  }
  off = sizeof(kMagic);
  uint32_t n_dims = 0;
  need(sizeof(n_dims), "dim count");
  std::memcpy(&n_dims, bytes.data() + off, sizeof(n_dims));
  off += sizeof(n_dims);
  if (n_dims < 2 || n_dims > 64) {
    throw std::runtime_error("implausible layer count in model header at byte offset 8");
  }
  std::vector<int> dims(n_dims);
  for (auto& d : dims) {
    uint32_t v = 0;
    need(sizeof(v), "layer dim");
    std::memcpy(&v, bytes.data() + off, sizeof(v));
    off += sizeof(v);
    if (v < 1 || v > 1u << 20) {
      throw std::runtime_error("implausible layer width in model header at byte offset " +
                               std::to_string(off - sizeof(v)));
    }
    d = static_cast<int>(v);
  }

  DenseNet net;
  net.dims_ = dims;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    Eigen::MatrixXd w(dims[l + 1], dims[l]);
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) {
        need(sizeof(double), "weight");
        double v = 0;
        std::memcpy(&v, bytes.data() + off, sizeof(v));
        off += sizeof(v);
        w(r, c) = v;
      }
    }
    Eigen::VectorXd b(dims[l + 1]);
    for (int r = 0; r < b.size(); ++r) {
      need(sizeof(double), "bias");
      double v = 0;
      std::memcpy(&v, bytes.data() + off, sizeof(v));
      off += sizeof(v);
      b[r] = v;
    }
    net.weights_.push_back(std::move(w));
    net.biases_.push_back(std::move(b));
  }
  if (off != bytes.size()) {
    throw std::runtime_error("trailing bytes after model payload at byte offset " +
                             std::to_string(off));
  }
  return net;
}

void DenseNet::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open model file for writing: " + path);
  const auto bytes = serialize();
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("failed writing model file: " + path);
}

DenseNet DenseNet::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

uint64_t DenseNet::param_hash() const { return fnv1a64(serialize()); }

}  // namespace linkrl::net
