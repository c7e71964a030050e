#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "../oracles/classic_dcf.hpp"
#include "uavmac/chain.hpp"

using namespace uavmac;

TEST_CASE("layout") {
  const ChainLayout l(4, 2);
  CHECK(l.size() == 4 + 8 + 16);
  CHECK(l.index(0, 0) == 0);
  CHECK(l.index(1, 0) == 4);
  CHECK(l.index(2, 15) == 27);
  CHECK(l.window(2) == 16);
}

TEST_CASE("transition matrix is stochastic") {
  const auto P = transition_matrix<double>(4, 2, 0.3, 0.1);
  const Eigen::MatrixXd D(P);
  CHECK((D.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(D.minCoeff() >= 0.0);
}

TEST_CASE("quitting freezes every counter") {
  const Eigen::MatrixXd D(transition_matrix<double>(4, 2, 0.3, 1.0));
  const ChainLayout l(4, 2);
  for (int j = 0; j <= 2; ++j) {
    for (std::int64_t k = 1; k < l.window(j); ++k) {
      CHECK(D(l.index(j, k), l.index(j, k)) == 1.0);
    }
  }
}

TEST_CASE("Q = 0 gives the classic retry-limited chain") {
  for (double q : {0.0, 0.2, 0.7}) {
    const Eigen::MatrixXd D(transition_matrix<double>(4, 3, q, 0.0));
    const Eigen::MatrixXd C = oracle::classic_matrix(4, 3, q);
    CHECK((D - C).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("stationary distribution") {
  SUBCASE("normalisation") {
    for (auto [w, j] : {std::pair{4, 2}, std::pair{8, 7}, std::pair{16, 3}}) {
      for (double q : {0.0, 0.3, 0.6}) {
        const auto b = stationary_distribution<double>(w, j, q, 0.1);
        CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(b.minCoeff() >= 0.0);
        CHECK(b.maxCoeff() <= 1.0);
      }
    }
  }
  SUBCASE("k = 0 column") {
    const double q = 0.35, Q = 0.2;
    const double p = (1 - Q) * q + Q;
    const auto b = stationary_distribution<double>(8, 5, q, Q);
    const ChainLayout l(8, 5);
    for (int j = 0; j <= 5; ++j) {
      CHECK(b[l.index(j, 0)] == doctest::Approx(std::pow(p, j) * b[0]).epsilon(1e-14));
    }
  }
  SUBCASE("fixed vector of the explicit matrix") {
    for (double q : {0.0, 0.25, 0.5, 0.9}) {
      for (double Q : {0.0, 0.25, 0.5, 0.9}) {
        const auto b = stationary_distribution<double>(4, 2, q, Q);
        const auto P = transition_matrix<double>(4, 2, q, Q);
        const Eigen::VectorXd bp = (b.transpose() * P).transpose();
        CHECK((bp - b).lpNorm<Eigen::Infinity>() <= 1e-8);
      }
    }
  }
  SUBCASE("agrees with a dense linear solve") {
    const auto b = stationary_distribution<double>(8, 3, 0.4, 0.05);
    const auto pi = oracle::dense_stationary(oracle::classic_matrix(8, 3, 0.4, 0.05));
    CHECK((b - pi).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("base state probability") {
  CHECK(base_state_probability<double>(1, 0, 0.0, 0.0) == 1.0);
  CHECK(base_state_probability<double>(32, 5, 0.2, 0.0) ==
        doctest::Approx(oracle::renewal_b00(32, 5, 0.2)).epsilon(1e-12));
  const auto pi = oracle::dense_stationary(oracle::classic_matrix(32, 5, 0.2));
  CHECK(base_state_probability<double>(32, 5, 0.2, 0.0) ==
        doctest::Approx(pi[0]).epsilon(1e-10));

  SUBCASE("no singularity at P_eq = 1/2") {
    const double mid = base_state_probability<double>(8, 3, 0.5);
    CHECK(std::isfinite(mid));
    CHECK(mid == doctest::Approx(base_state_probability<double>(8, 3, 0.5 + 1e-7)).epsilon(1e-6));
    CHECK(mid == doctest::Approx(base_state_probability<double>(8, 3, 0.5 - 1e-7)).epsilon(1e-6));
    CHECK(mid == doctest::Approx(oracle::renewal_b00(8, 3, 0.5)).epsilon(1e-13));
  }
  SUBCASE("absorbed chain") {
    try {
      (void)base_state_probability<double>(8, 3, 1.0);
      FAIL("expected absorbed-chain");
    } catch (const Error& e) {
      CHECK(e.code() == "absorbed-chain");
    }
    CHECK_THROWS_AS((void)base_state_probability<double>(8, 3, 0.5, 1.0), Error);
  }
}

TEST_CASE("transmission probability") {
  CHECK(tx_probability(0.2, 0.5, 1) == doctest::Approx(0.3));
  CHECK(tx_probability(0.2, 0.7, 0) == 0.2);
  CHECK(tx_probability(0.2, 0.0, 5) == 0.2);
  CHECK(tx_probability(0.1, 1.0, 3) == doctest::Approx(0.4));
  for (double p : {0.0, 0.1, 0.5, 0.95}) {
    const double b = base_state_probability<double>(16, 4, p);
    CHECK(tx_probability_of_stall<double>(16, 4, p) ==
          doctest::Approx(tx_probability(b, p, 4)).epsilon(1e-14));
    CHECK(tx_probability_of_stall<double>(16, 4, p) ==
          doctest::Approx(oracle::renewal_tau(16, 4, p)).epsilon(1e-13));
  }
  CHECK(tx_probability_of_stall<double>(16, 4, 1.0) == 0.0);
  CHECK(tx_probability_of_stall<double>(16, 4, 1.0 - 1e-9) < 1e-8);
}

TEST_CASE("quitting probability") {
  CHECK(quitting_probability(0.1, 3) == doctest::Approx(0.729));
  CHECK(quitting_probability(1.0, 5) == 0.0);
  CHECK(quitting_probability(0.01, 1'000'000) == 0.0);
  CHECK_THROWS_AS((void)quitting_probability(0.1, 0), Error);
}

TEST_CASE("long double instantiation") {
  const auto b = stationary_distribution<long double>(8, 3, 0.3L, 0.1L);
  CHECK(static_cast<double>(b.sum()) == doctest::Approx(1.0).epsilon(1e-15));
}
