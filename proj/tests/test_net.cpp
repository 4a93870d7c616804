#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "gradcheck_util.hpp"
#include "linkrl/common.hpp"
#include "linkrl/net.hpp"

using namespace linkrl;
namespace fs = std::filesystem;

namespace {

Eigen::VectorXd random_vec(int n, std::mt19937_64& rng, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * (2.0 * uniform01(rng) - 1.0);
  return v;
}

double entropy(const Eigen::VectorXd& p) {
  double h = 0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] > 0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

}  // namespace

TEST_CASE("parameter counts match the closed form") {
  CHECK(net::param_count_for_dims({16, 32, 32, 28}) == 2524);
  CHECK(net::param_count_for_dims({16, 8, 28}) == 388);
  // teacher and student architectures; the paper-scale counts
  CHECK(net::DenseNet::init(net::layer_dims(std::vector<int>(7, 128)), 1).param_count() == 104860);
  CHECK(net::param_count_for_dims(net::layer_dims(std::vector<int>(4, 64))) == 15388);
  CHECK(net::param_count_for_dims(net::layer_dims(std::vector<int>(4, 32))) == 4636);
  CHECK(net::param_count_for_dims(net::layer_dims(std::vector<int>(3, 32))) == 3580);
}

TEST_CASE("init is deterministic per seed and validates dims") {
  const auto a = net::DenseNet::init({16, 32, 28}, 7);
  const auto b = net::DenseNet::init({16, 32, 28}, 7);
  CHECK(a.param_hash() == b.param_hash());
  const auto c = net::DenseNet::init({16, 32, 28}, 8);
  CHECK(a.param_hash() != c.param_hash());
  CHECK_THROWS_AS(net::DenseNet::init({8, 32, 28}, 1), std::invalid_argument);
  CHECK_THROWS_AS(net::DenseNet::init({16, 32, 27}, 1), std::invalid_argument);
  CHECK_THROWS_AS(net::DenseNet::init({16}, 1), std::invalid_argument);
  for (const auto& bias : a.biases()) CHECK(bias.isZero());
}

TEST_CASE("forward basics") {
  auto n = net::DenseNet::init({16, 8, 28}, 3);
  std::mt19937_64 rng(4);
  const Eigen::VectorXd x = random_vec(16, rng);

  SUBCASE("all-zero parameters give a zero output") {
    for (auto& w : n.weights()) w.setZero();
    for (auto& b : n.biases()) b.setZero();
    CHECK(n.forward(x).isZero());
  }

  SUBCASE("doubling the last layer weights doubles the output") {
    for (auto& b : n.biases()) b.setZero();
    const Eigen::VectorXd q1 = n.forward(x);
    n.weights().back() *= 2.0;
    const Eigen::VectorXd q2 = n.forward(x);
    CHECK((q2 - 2.0 * q1).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("finite input gives finite output") {
    const auto big = net::DenseNet::init(net::layer_dims({128, 128, 128}), 5);
    const Eigen::VectorXd q = big.forward(x);
    for (int i = 0; i < q.size(); ++i) CHECK(std::isfinite(q[i]));
  }

  SUBCASE("batch forward equals single-sample forward") {
    Eigen::MatrixXd batch(16, 5);
    for (int j = 0; j < 5; ++j) batch.col(j) = random_vec(16, rng);
    const Eigen::MatrixXd q = n.forward_batch(batch);
    for (int j = 0; j < 5; ++j) {
      CHECK((q.col(j) - n.forward(Eigen::VectorXd(batch.col(j)))).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("temperature softmax") {
  std::mt19937_64 rng(12);

  SUBCASE("zero vector gives the uniform distribution") {
    const Eigen::VectorXd q = Eigen::VectorXd::Zero(28);
    const auto p = net::softmax_temp(q, 0.37);
    for (int i = 0; i < 28; ++i) CHECK(p[i] == doctest::Approx(1.0 / 28).epsilon(1e-12));
  }

  SUBCASE("shift invariance") {
    const Eigen::VectorXd q = random_vec(28, rng, 3.0);
    const auto p1 = net::softmax_temp(q, 0.5);
    const auto p2 = net::softmax_temp(q.array() + 17.5, 0.5);
    CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("positive, sums to one") {
    for (int rep = 0; rep < 200; ++rep) {
      for (double tau : {0.01, 0.1, 1.0, 10.0}) {
        // keep q/tau within double range so positivity is representable
        const double scale = tau < 0.1 ? 1.0 : 10.0;
        const Eigen::VectorXd q = random_vec(28, rng, scale);
        const auto p = net::softmax_temp(q, tau);
        double sum = 0;
        for (int i = 0; i < 28; ++i) {
          CHECK(p[i] > 0.0);
          sum += p[i];
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
      }
    }
  }

  SUBCASE("entropy is non-decreasing in tau") {
    const Eigen::VectorXd q = random_vec(28, rng, 2.0);
    double last = -1;
    for (double tau : {0.01, 0.1, 1.0, 10.0}) {
      const double h = entropy(net::softmax_temp(q, tau));
      CHECK(h >= last - 1e-12);
      last = h;
    }
  }

  SUBCASE("temperature never changes the argmax") {
    for (int rep = 0; rep < 500; ++rep) {
      const Eigen::VectorXd q = random_vec(28, rng, 5.0);
      int qa = 0;
      for (int i = 1; i < 28; ++i) {
        if (q[i] > q[qa]) qa = i;
      }
      for (double tau : {0.01, 0.3, 1.0, 7.0}) {
        const auto p = net::softmax_temp(q, tau);
        int pa = 0;
        for (int i = 1; i < 28; ++i) {
          if (p[i] > p[pa]) pa = i;
        }
        CHECK(pa == qa);
      }
    }
  }

  SUBCASE("non-positive temperature is a domain error") {
    CHECK_THROWS_AS(net::softmax_temp(Eigen::VectorXd::Zero(28), 0.0), std::domain_error);
    CHECK_THROWS_AS(net::softmax_temp(Eigen::VectorXd::Zero(28), -1.0), std::domain_error);
  }
}

TEST_CASE("KL loss") {
  std::mt19937_64 rng(21);

  SUBCASE("matching distributions give zero loss and zero gradient") {
    const Eigen::VectorXd qt = random_vec(28, rng, 3.0);
    const double tau = 0.25;
    const Eigen::VectorXd qs = qt / tau;  // softmax(qs) == softmax_temp(qt, tau)
    const auto r = net::kl_loss(qt, qs, tau);
    CHECK(r.loss == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.grad_q_student.cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("two-action worked example") {
    Eigen::VectorXd qt(2), qs(2);
    qt << 1.0, 0.0;
    qs << 0.0, 0.0;
    const auto r = net::kl_loss(qt, qs, 1.0);
    CHECK(r.loss == doctest::Approx(0.110944071672).epsilon(1e-9));
    const auto p = net::softmax_temp(qt, 1.0);
    CHECK(p[0] == doctest::Approx(0.7310585786).epsilon(1e-9));
    CHECK(r.grad_q_student[0] == doctest::Approx(0.5 - 0.7310585786).epsilon(1e-9));
  }

  SUBCASE("non-negativity over random draws") {
    for (int rep = 0; rep < 10000; ++rep) {
      const Eigen::VectorXd qt = random_vec(28, rng, 6.0);
      const Eigen::VectorXd qs = random_vec(28, rng, 6.0);
      const double tau = 0.01 + 5.0 * uniform01(rng);
      CHECK(net::kl_loss(qt, qs, tau).loss >= 0.0);
    }
  }

  SUBCASE("gradient equals softmax(qS) - softmax_temp(qT, tau)") {
    for (int rep = 0; rep < 1000; ++rep) {
      const Eigen::VectorXd qt = random_vec(28, rng, 4.0);
      const Eigen::VectorXd qs = random_vec(28, rng, 4.0);
      const double tau = 0.05 + 2.0 * uniform01(rng);
      const auto r = net::kl_loss(qt, qs, tau);
      const Eigen::VectorXd expected = net::softmax_temp(qs, 1.0) - net::softmax_temp(qt, tau);
      CHECK((r.grad_q_student - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  SUBCASE("gradient matches finite differences of the loss") {
    const Eigen::VectorXd qt = random_vec(28, rng, 2.0);
    Eigen::VectorXd qs = random_vec(28, rng, 2.0);
    const double tau = 0.5;
    const auto r = net::kl_loss(qt, qs, tau);
    const double h = 1e-6;
    for (int i = 0; i < 28; ++i) {
      qs[i] += h;
      const double up = net::kl_loss(qt, qs, tau).loss;
      qs[i] -= 2 * h;
      const double down = net::kl_loss(qt, qs, tau).loss;
      qs[i] += h;
      CHECK(r.grad_q_student[i] == doctest::Approx((up - down) / (2 * h)).epsilon(1e-4));
    }
  }
}

TEST_CASE("train_step") {
  std::mt19937_64 rng(33);

  SUBCASE("zero gradients leave the parameters unchanged") {
    auto n = net::DenseNet::init({16, 8, 28}, 1);
    const auto before = n.param_hash();
    net::Adam opt(n, {1e-3, 0.9, 0.999, 1e-8});
    Eigen::MatrixXd x(16, 4);
    for (int j = 0; j < 4; ++j) x.col(j) = random_vec(16, rng);
    const double loss = net::train_step(
        n, x, [](const Eigen::MatrixXd&, Eigen::MatrixXd&) { return 0.0; }, opt);
    CHECK(loss == 0.0);
    CHECK(n.param_hash() == before);
    CHECK(opt.step_count() == 1);
  }

  SUBCASE("one step on one sample decreases its loss") {
    auto n = net::DenseNet::init({16, 8, 28}, 2);
    net::Adam opt(n, {1e-3, 0.9, 0.999, 1e-8});
    Eigen::MatrixXd x(16, 1);
    x.col(0) = random_vec(16, rng);
    const Eigen::VectorXd target = random_vec(28, rng, 2.0);
    auto sq_loss = [&](const Eigen::MatrixXd& q, Eigen::MatrixXd& g) {
      g.col(0) = 2.0 * (q.col(0) - target);
      return (q.col(0) - target).squaredNorm();
    };
    const double before = net::train_step(n, x, sq_loss, opt);
    Eigen::MatrixXd g_unused(28, 1);
    const double after = (n.forward(Eigen::VectorXd(x.col(0))) - target).squaredNorm();
    CHECK(after < before);
  }

  SUBCASE("non-finite loss raises a training error") {
    auto n = net::DenseNet::init({16, 8, 28}, 3);
    net::Adam opt(n, {1e-3, 0.9, 0.999, 1e-8});
    Eigen::MatrixXd x(16, 1);
    x.col(0) = random_vec(16, rng);
    CHECK_THROWS_AS(net::train_step(
                        n, x,
                        [](const Eigen::MatrixXd&, Eigen::MatrixXd&) {
                          return std::numeric_limits<double>::quiet_NaN();
                        },
                        opt),
                    std::runtime_error);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937_64 rng(44);
  const auto n = net::DenseNet::init({16, 8, 28}, 17);
  const Eigen::VectorXd x = random_vec(16, rng);

  SUBCASE("squared TD loss through one action") {
    const int action = 11;
    const double target = 1.7;
    auto loss = [&](const Eigen::VectorXd& q) {
      const double d = q[action] - target;
      return d * d;
    };
    auto grad = [&](const Eigen::VectorXd& q) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(28);
      g[action] = 2.0 * (q[action] - target);
      return g;
    };
    const auto res = gradcheck::check(n, x, loss, grad);
    CHECK(res.params_checked == 388);
    CHECK(res.max_rel_error < 1e-4);
  }

  SUBCASE("KL loss") {
    const Eigen::VectorXd qt = random_vec(28, rng, 2.0);
    const double tau = 0.5;
    auto loss = [&](const Eigen::VectorXd& q) { return net::kl_loss(qt, q, tau).loss; };
    auto grad = [&](const Eigen::VectorXd& q) { return net::kl_loss(qt, q, tau).grad_q_student; };
    const auto res = gradcheck::check(n, x, loss, grad);
    CHECK(res.params_checked == 388);
    CHECK(res.max_rel_error < 1e-4);
  }
}

TEST_CASE("model file round-trip") {
  const fs::path dir = fs::temp_directory_path() / "linkrl_net_test";
  fs::create_directories(dir);
  const auto path = (dir / "roundtrip.model").string();
  const auto n = net::DenseNet::init({16, 24, 24, 28}, 99);
  n.save(path);

  SUBCASE("file size is header + 8 bytes per parameter") {
    const size_t header = 8 + 4 + 4 * 4;
    CHECK(fs::file_size(path) == header + 8 * n.param_count());
  }

  SUBCASE("loaded net is bit-identical and forwards identically") {
    const auto m = net::DenseNet::load(path);
    CHECK(m.param_hash() == n.param_hash());
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 100; ++rep) {
      const Eigen::VectorXd x = random_vec(16, rng);
      CHECK((m.forward(x) - n.forward(x)).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("corrupt magic is rejected with an offset") {
    auto bytes = n.serialize();
    bytes[0] = 'X';
    std::ofstream f(dir / "bad_magic.model", std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    f.close();
    CHECK_THROWS_WITH_AS(net::DenseNet::load((dir / "bad_magic.model").string()),
                         doctest::Contains("byte offset 0"), std::runtime_error);
  }

  SUBCASE("mismatched dims header is rejected") {
    auto bytes = n.serialize();
    bytes.resize(bytes.size() - 8);  // drop one parameter
    std::ofstream f(dir / "truncated.model", std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    f.close();
    CHECK_THROWS_AS(net::DenseNet::load((dir / "truncated.model").string()), std::runtime_error);
  }

  fs::remove_all(dir);
}
