#pragma once

// Central finite-difference gradient oracle used by the unit and acceptance
// suites. Kept independent of the analytic backward pass: it only calls the
// forward pass on perturbed parameters.

#include <cmath>
#include <functional>

#include "linkrl/net.hpp"

namespace gradcheck {

// loss(q) must be a pure function of the net output.
using ScalarLoss = std::function<double(const Eigen::VectorXd& q)>;

inline double loss_at(const linkrl::net::DenseNet& net, const Eigen::VectorXd& x,
                      const ScalarLoss& loss) {
  return loss(net.forward(x));
}

struct Result {
  double max_rel_error = 0.0;
  long params_checked = 0;
};

// Compares the analytic gradient of `loss` w.r.t. every parameter against
// central differences with step h.
inline Result check(linkrl::net::DenseNet net, const Eigen::VectorXd& x, const ScalarLoss& loss,
                    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& loss_grad,
                    double h = 1e-5) {
  // analytic gradients via the batch path (batch of one)
  linkrl::net::DenseNet::Cache cache;
  Eigen::MatrixXd xm(x.size(), 1);
  xm.col(0) = x;
  const Eigen::MatrixXd q = net.forward_batch(xm, cache);
  Eigen::MatrixXd gq(q.rows(), 1);
  gq.col(0) = loss_grad(q.col(0));
  const linkrl::net::Gradients analytic = net.backward(cache, gq);

  Result res;
  auto accumulate = [&](double a, double* param) {
    const double saved = *param;
    *param = saved + h;
    const double up = loss_at(net, x, loss);
    *param = saved - h;
    const double down = loss_at(net, x, loss);
    *param = saved;
    const double fd = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(a), std::abs(fd), 1e-8});
    res.max_rel_error = std::max(res.max_rel_error, std::abs(a - fd) / denom);
    res.params_checked += 1;
  };

  for (int l = 0; l < net.n_layers(); ++l) {
    auto& w = net.weights()[static_cast<size_t>(l)];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        accumulate(analytic.w[static_cast<size_t>(l)](r, c), &w(r, c));
      }
    }
    auto& b = net.biases()[static_cast<size_t>(l)];
    for (Eigen::Index r = 0; r < b.size(); ++r) {
      accumulate(analytic.b[static_cast<size_t>(l)](r), &b(r));
    }
  }
  return res;
}

}  // namespace gradcheck
