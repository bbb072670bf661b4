#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "otasched/coordination.hpp"

using namespace otasched;
using cd = std::complex<double>;

namespace {

struct Instance {
  ChannelRealization h;
  ComplexVector c;
  std::vector<double> phi;
};

Instance random_instance(int n, int k, Rng& rng) {
  Instance in{sample_iid_gaussian(n, k, rng), random_unit_vector(n, rng), {}};
  for (int j = 0; j < k; ++j) in.phi.push_back(uniform(rng, 0.2, 1.5));
  return in;
}

// Termwise reference: every quantity expanded as scalar sums.
cd inner(const ChannelRealization& h, int k, const ComplexVector& c) {
  cd s = 0.0;
  for (int n = 0; n < h.rows(); ++n) s += std::conj(h(n, k)) * c(n);
  return s;
}

double brute_eta(const Instance& in, const DeviceSet& s, double p) {
  double best = INFINITY;
  for (int k : s) best = std::min(best, p * std::norm(inner(in.h, k, in.c)) / (in.phi[k] * in.phi[k]));
  return best;
}

double brute_error(const Instance& in, const DeviceSet& s, double noise, double p) {
  double worst = 0.0;
  const double cn = in.c.squaredNorm();
  for (int k : s)
    worst = std::max(worst, in.phi[k] * in.phi[k] * cn / std::norm(inner(in.h, k, in.c)));
  return noise / p * worst;
}

DeviceSet all_devices(int k) {
  DeviceSet s(k);
  for (int j = 0; j < k; ++j) s[j] = j;
  return s;
}

}  // namespace

TEST_CASE("gamma conversion") {
  CHECK(gamma_from_db(0.0) == doctest::Approx(1.0));
  CHECK(gamma_from_db(10.0) == doctest::Approx(10.0));
  CHECK(gamma_from_db(-10.0) == doctest::Approx(0.1));
}

TEST_CASE("zero-forcing power factor") {
  SUBCASE("matched filter") {
    Rng rng(1);
    const auto h = sample_iid_gaussian(4, 1, rng);
    const ComplexVector c = h.col(0) / h.col(0).norm();
    const std::vector<double> phi{1.0};
    CHECK(zf_power_factor(h, c, DeviceSet{0}, phi, 2.0) ==
          doctest::Approx(2.0 * h.col(0).squaredNorm()));
  }
  SUBCASE("minimum over two devices") {
    ChannelRealization h(1, 2);
    h(0, 0) = 2.0;
    h(0, 1) = cd(0.0, 1.0);
    ComplexVector c(1);
    c(0) = 1.0;
    const std::vector<double> phi{1.0, 1.0};
    CHECK(zf_power_factor(h, c, DeviceSet{0, 1}, phi, 1.0) == doctest::Approx(1.0));
  }
  SUBCASE("agrees with enumeration") {
    Rng rng(2);
    for (int rep = 0; rep < 50; ++rep) {
      const auto in = random_instance(3, 6, rng);
      const DeviceSet s{0, 2, 3, 5};
      CHECK(zf_power_factor(in.h, in.c, s, in.phi, 1.7) ==
            doctest::Approx(brute_eta(in, s, 1.7)).epsilon(1e-12));
    }
  }
  SUBCASE("orthogonal channel names the device") {
    ChannelRealization h = ChannelRealization::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    ComplexVector c(2);
    c << 1.0, 0.0;
    const std::vector<double> phi{1.0, 1.0};
    try {
      zf_power_factor(h, c, DeviceSet{0, 1}, phi, 1.0);
      FAIL("expected OrthogonalChannelError");
    } catch (const OrthogonalChannelError& e) {
      CHECK(e.device() == 1);
    }
  }
  SUBCASE("empty set rejected") {
    Rng rng(3);
    const auto in = random_instance(2, 2, rng);
    CHECK_THROWS(zf_power_factor(in.h, in.c, DeviceSet{}, in.phi, 1.0));
  }
}

TEST_CASE("zero-forcing transmit weights") {
  Rng rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const auto in = random_instance(4, 7, rng);
    const DeviceSet s{1, 2, 4, 6};
    const double p = 0.8;
    const double eta = zf_power_factor(in.h, in.c, s, in.phi, p);
    const auto psi = zf_transmit_weights(in.h, in.c, s, in.phi, eta);
    REQUIRE(psi.size() == s.size());
    int binding = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const int k = s[i];
      const cd eff = psi[i] / std::sqrt(eta) * std::conj(inner(in.h, k, in.c));
      CHECK(std::abs(eff - in.phi[k]) < 1e-10);
      CHECK(std::norm(psi[i]) <= p * (1 + 1e-9));
      binding += std::abs(std::norm(psi[i]) - p) < 1e-9 * p;
    }
    CHECK(binding >= 1);
  }
}

TEST_CASE("computation error") {
  SUBCASE("single device matched filter") {
    Rng rng(5);
    const auto h = sample_iid_gaussian(3, 1, rng);
    const ComplexVector c = h.col(0) / h.col(0).norm();
    const std::vector<double> phi{1.0};
    CHECK(computation_error(h, c, DeviceSet{0}, phi, 0.3, 2.0) ==
          doctest::Approx(0.3 / (2.0 * h.col(0).squaredNorm())));
  }
  SUBCASE("scale invariant in the receiver") {
    Rng rng(6);
    const auto in = random_instance(3, 5, rng);
    const auto s = all_devices(5);
    CHECK(computation_error(in.h, in.c, s, in.phi, 1.0, 1.0) ==
          doctest::Approx(computation_error(in.h, 2.0 * in.c, s, in.phi, 1.0, 1.0)).epsilon(1e-12));
  }
  SUBCASE("agrees with enumeration") {
    Rng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
      const auto in = random_instance(2, 5, rng);
      const DeviceSet s{0, 1, 4};
      CHECK(computation_error(in.h, in.c, s, in.phi, 0.7, 1.3) ==
            doctest::Approx(brute_error(in, s, 0.7, 1.3)).epsilon(1e-12));
    }
  }
  SUBCASE("monotone under set inclusion at a fixed receiver") {
    Rng rng(8);
    for (int rep = 0; rep < 200; ++rep) {
      const auto in = random_instance(3, 8, rng);
      DeviceSet big, small;
      for (int k = 0; k < 8; ++k) {
        if (uniform(rng, 0, 1) < 0.7) big.push_back(k);
      }
      if (big.empty()) big.push_back(0);
      for (int k : big)
        if (uniform(rng, 0, 1) < 0.5) small.push_back(k);
      if (small.empty()) small.push_back(big.front());
      CHECK(computation_error(in.h, in.c, small, in.phi, 1.0, 1.0) <=
            computation_error(in.h, in.c, big, in.phi, 1.0, 1.0));
    }
  }
}

TEST_CASE("AirComp symbol") {
  SUBCASE("noiseless estimate is exact") {
    Rng rng(9);
    for (int rep = 0; rep < 100; ++rep) {
      const auto in = random_instance(4, 6, rng);
      const DeviceSet s{0, 3, 5};
      const auto sched = make_zf_schedule(in.h, in.c, s, in.phi, 1.0);
      std::vector<double> theta(6);
      for (double& t : theta) t = uniform(rng, -5, 5);
      const cd est = aircomp_round(in.h, sched, theta, 0.0, rng);
      CHECK(std::abs(est - aggregation_target(s, in.phi, theta)) < 1e-9);
    }
  }
  SUBCASE("zero inputs leave pure noise") {
    Rng rng(10);
    const auto in = random_instance(3, 4, rng);
    const auto sched = make_zf_schedule(in.h, in.c, all_devices(4), in.phi, 1.0);
    const std::vector<double> zeros(4, 0.0);
    const double noise = 0.5;
    const int rounds = 100000;
    double mse = 0.0;
    for (int i = 0; i < rounds; ++i) mse += std::norm(aircomp_round(in.h, sched, zeros, noise, rng));
    mse /= rounds;
    const double expected = noise * in.c.squaredNorm() / sched.power_factor;
    CHECK(std::abs(mse / expected - 1.0) < 0.05);
    CHECK(expected == doctest::Approx(computation_error(in.h, in.c, all_devices(4), in.phi, noise, 1.0)));
  }
}

TEST_CASE("schedule construction") {
  Rng rng(11);
  const auto in = random_instance(3, 4, rng);
  const auto sched = make_zf_schedule(in.h, in.c, DeviceSet{1, 2}, in.phi, 1.0);
  CHECK(sched.active == DeviceSet{1, 2});
  CHECK(sched.psi.size() == 2);
  CHECK(sched.power_factor == doctest::Approx(brute_eta(in, DeviceSet{1, 2}, 1.0)));
}
