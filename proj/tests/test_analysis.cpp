#include <cmath>
#include <random>

#include "doctest.h"
#include "geogossip/analysis.hpp"
#include "geogossip/sampling.hpp"
#include "oracles.hpp"

using namespace geogossip;

namespace {

Eigen::VectorXd random_distribution(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd q(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = e(rng);
  return q / q.sum();
}

}  // namespace

TEST_CASE("uniform q has the closed form") {
  for (std::size_t n : {2, 3, 10, 57}) {
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / n);
    const auto w = build_w(q);
    const double dn = static_cast<double>(n);
    const Eigen::MatrixXd expected =
        (1.0 - 1.0 / dn) * Eigen::MatrixXd::Identity(q.size(), q.size()) +
        Eigen::MatrixXd::Constant(q.size(), q.size(), 1.0 / (dn * dn));
    CHECK((w.w - expected).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(w.lambda2 == doctest::Approx(1.0 - 1.0 / dn).epsilon(1e-12));
  }
  CHECK(build_w(Eigen::VectorXd::Constant(10, 0.1)).lambda2 == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("all mass on one node, n=2") {
  Eigen::VectorXd q(2);
  q << 1.0, 0.0;
  const auto w = build_w(q);
  CHECK(w.w(0, 0) == 0.75);
  CHECK(w.w(0, 1) == 0.25);
  CHECK(w.w(1, 0) == 0.25);
  CHECK(w.w(1, 1) == 0.75);
  const auto [hi, lo] = oracle::sym2x2_eigen(0.75, 0.25, 0.75);
  CHECK(hi == doctest::Approx(1.0));
  CHECK(lo == doctest::Approx(0.5));
  CHECK(w.lambda2 == doctest::Approx(lo).epsilon(1e-14));
  CHECK(lambda2_deflated(w.w) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("input validation") {
  Eigen::VectorXd bad(3);
  bad << 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(build_w(bad), InvalidInput);
  bad << 1.2, -0.1, -0.1;
  CHECK_THROWS_AS(build_w(bad), InvalidInput);
  CHECK_THROWS_AS(build_w(Eigen::VectorXd::Ones(1)), InvalidInput);
  CHECK_THROWS_AS(lambda2(Eigen::MatrixXd::Identity(2, 3)), InvalidInput);
}

TEST_CASE("structure of W for random q") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t n = 2 + 41 * seed;
    const Eigen::VectorXd q = random_distribution(n, seed);
    const Eigen::MatrixXd w = expected_update(q);
    const Eigen::MatrixXd w2 = expected_update_from_pairs(q);
    CHECK((w - w2).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(w == w.transpose());
    CHECK((w.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK((w.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::VectorXd top = es.eigenvectors().col(w.rows() - 1);
    CHECK(std::abs(top.cwiseAbs().minCoeff() - 1.0 / std::sqrt(static_cast<double>(n))) <= 1e-8);
  }
  // The two forms also agree at the size limit.
  const Eigen::VectorXd q = random_distribution(500, 99);
  CHECK((expected_update(q) - expected_update_from_pairs(q)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("power iteration agrees with the dense solve") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const std::size_t n = 20 + 16 * seed;
    const Network net = generate_network(n, transmission_radius(n), 300 + seed);
    const Eigen::MatrixXd w = expected_update(make_policy(net.areas).q);
    CHECK(std::abs(lambda2_deflated(w) - lambda2(w)) <= 1e-9);
  }
}

TEST_CASE("single precision instantiation") {
  const Eigen::VectorXf q = Eigen::VectorXf::Constant(10, 0.1f);
  CHECK(build_w(q).lambda2 == doctest::Approx(0.9f).epsilon(1e-5));
}

TEST_CASE("Weyl certificate") {
  const auto u = weyl_certificate(Eigen::VectorXd::Constant(40, 1.0 / 40));
  CHECK(u.eps2 == doctest::Approx(0.0));
  CHECK(u.bound == doctest::Approx(1.0 - 1.0 / 80));
  CHECK(u.holds);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Network net = generate_network(200, transmission_radius(200), 700 + seed);
    const SamplingPolicy pol = make_policy(net.areas);
    const auto c = weyl_certificate(pol.q);
    CHECK(c.holds);
    // eps2 = sqrt(n) * l2 distance, bounded through the l2 guarantee.
    CHECK(c.eps2 <= std::sqrt(pol.nu + pol.mu * pol.mu) + 1e-12);
  }
}

TEST_CASE("predictions") {
  CHECK(predict_tave(0.3, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
  const double n = 1e5;
  CHECK(predict_tave(1.0 - 1.0 / n, 1.0 / n) == doctest::Approx(n * std::log(n)).epsilon(1e-4));
  CHECK_THROWS_AS(predict_tave(1.0, 0.1), InvalidInput);
  CHECK_THROWS_AS(predict_tave(0.5, 1.0), InvalidParameter);

  CHECK(predict_cost(100, 0.01, 1.0, 1.0, 321.0) == 321.0);
  CHECK(predict_cost(100, 0.01, 10.0, 2.0, 100.0) == 2000.0);
  CHECK_THROWS_AS(predict_cost(100, 0.01, 0.0, 1.0, 1.0), InvalidParameter);

  const SpectralReport r = spectral_report(Eigen::VectorXd::Constant(10, 0.1), 0.01);
  CHECK(r.n == 10);
  CHECK(r.one_minus_lambda2_times_n == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.tave_prediction == doctest::Approx(std::log(100.0) / std::log(1.0 / 0.9)).epsilon(1e-10));
}

TEST_CASE("n (1 - lambda2) collapses across sizes") {
  double lo = 1e300, hi = 0.0;
  for (std::size_t n : {100, 200, 400}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const Network net = generate_connected_network(n, transmission_radius(n), 50 * n + seed).network;
      const double v = static_cast<double>(n) * (1.0 - build_w(make_policy(net.areas).q).lambda2);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  CHECK(hi / lo < 3.0);
}
