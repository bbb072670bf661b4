#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "otasched/channel.hpp"

using namespace otasched;
using std::numbers::pi;
using cd = std::complex<double>;

TEST_CASE("i.i.d. Gaussian entries") {
  SUBCASE("dimensions") {
    Rng rng(1);
    const auto h = sample_iid_gaussian(2, 3, rng);
    CHECK(h.rows() == 2);
    CHECK(h.cols() == 3);
  }
  SUBCASE("unit second moment") {
    Rng rng(2);
    double power = 0.0, re2 = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      const cd x = sample_iid_gaussian(1, 1, rng)(0, 0);
      power += std::norm(x);
      re2 += x.real() * x.real();
    }
    CHECK(std::abs(power / draws - 1.0) < 0.02);
    CHECK(std::abs(re2 / draws - 0.5) < 0.01);
  }
  SUBCASE("fixed seed repeats bit for bit") {
    Rng a(77), b(77);
    CHECK(sample_iid_gaussian(4, 5, a) == sample_iid_gaussian(4, 5, b));
  }
}

TEST_CASE("array response") {
  const auto broadside = array_response(0.0, 3, 0.5);
  for (int n = 0; n < 3; ++n) CHECK(std::abs(broadside(n) - cd(1.0)) < 1e-12);

  const auto endfire = array_response(pi / 2, 2, 0.5);
  CHECK(std::abs(endfire(0) - cd(1.0)) < 1e-12);
  CHECK(std::abs(endfire(1) - cd(-1.0)) < 1e-12);

  const auto sixth = array_response(pi / 6, 2, 0.5);
  CHECK(std::abs(sixth(1) - cd(0.0, 1.0)) < 1e-12);

  for (int n = 0; n < 8; ++n) CHECK(std::abs(std::abs(array_response(1.1, 8, 0.37)(n)) - 1.0) < 1e-12);
}

TEST_CASE("spatial covariance") {
  SUBCASE("unit diagonal and Hermitian") {
    const auto r = spatial_covariance(0.7, 0.3, 5, 0.5);
    for (int n = 0; n < 5; ++n) CHECK(std::abs(r(n, n) - cd(1.0)) < 1e-15);
    CHECK((r - r.adjoint()).norm() == 0.0);
  }
  SUBCASE("zero spread gives the rank-one LoS outer product") {
    const double theta = 0.4;
    const auto g = array_response(theta, 4, 0.5);
    const auto r = spatial_covariance(theta, 0.0, 4, 0.5);
    CHECK((r - g * g.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(r);
    CHECK(eig.eigenvalues()(2) < 1e-12);
    CHECK(eig.eigenvalues()(3) == doctest::Approx(4.0));
  }
  SUBCASE("entry (0,2) matches the closed form") {
    const double theta = pi / 4, spread = 0.2, d = 0.5;
    const auto r = spatial_covariance(theta, spread, 3, d);
    const double diff = 0.0 - 2.0;
    const double rho = std::exp(-2.0 * spread * spread *
                                std::pow(pi * diff * d * std::cos(theta), 2));
    const cd u = std::exp(cd(0.0, 2.0 * pi * d * std::sin(theta)));
    const cd expected = std::pow(u, diff) * rho;
    CHECK(std::abs(r(0, 2) - expected) < 1e-12);
  }
  SUBCASE("positive semidefinite up to clipping") {
    for (double s : {0.0, 0.05, 0.21, 0.26}) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(spatial_covariance(1.2, s, 12, 0.5));
      CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
    }
  }
}

TEST_CASE("path loss") {
  CHECK(path_loss(10.0, 3.0, 2.5, 10.0) == doctest::Approx(2.5));
  CHECK(path_loss(20.0, 3.0, 1.0, 10.0) == doctest::Approx(0.125));
  CHECK(path_loss(30.0, 3.0, 1.0, 10.0) == doctest::Approx(1.0 / 27.0));
  CHECK_THROWS(path_loss(0.0, 3.0, 1.0, 10.0));
  CHECK_THROWS(path_loss(-1.0, 3.0, 1.0, 10.0));
  CHECK_THROWS(path_loss(5.0, 3.0, 1.0, 0.0));
}

TEST_CASE("annulus geometry") {
  SUBCASE("bounds") {
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
      const auto g = sample_geometry(1, 10.0, 100.0, rng);
      CHECK(g.distances[0] >= 10.0);
      CHECK(g.distances[0] <= 100.0);
      CHECK(g.angles[0] >= 0.0);
      CHECK(g.angles[0] < 2 * pi);
    }
  }
  SUBCASE("area-uniform radial CDF") {
    Rng rng(5);
    const double r_in = 10.0, r_out = 100.0;
    const auto g = sample_geometry(100000, r_in, r_out, rng);
    for (double r : {20.0, 40.0, 60.0, 80.0}) {
      double hits = 0;
      for (double l : g.distances) hits += l <= r;
      const double expected = (r * r - r_in * r_in) / (r_out * r_out - r_in * r_in);
      CHECK(std::abs(hits / g.distances.size() - expected) < 0.01);
    }
  }
  SUBCASE("reproducible") {
    Rng a(8), b(8);
    const auto x = sample_geometry(6, 10.0, 100.0, a);
    const auto y = sample_geometry(6, 10.0, 100.0, b);
    CHECK(x.distances == y.distances);
    CHECK(x.angles == y.angles);
  }
  SUBCASE("invalid radii") {
    Rng rng(9);
    CHECK_THROWS(sample_geometry(3, 100.0, 10.0, rng));
    CHECK_THROWS(sample_geometry(3, 0.0, 10.0, rng));
  }
}

namespace {

NetworkGeometry single_device(double distance, double angle) {
  NetworkGeometry g;
  g.distances = {distance};
  g.angles = {angle};
  g.inner_radius = 1.0;
  g.outer_radius = 100.0;
  return g;
}

RicianParams params_for(int n, double kappa, double spread) {
  RicianParams p;
  p.num_antennas = n;
  p.rician_factors = {kappa};
  p.angular_std = {spread};
  p.reference_distance = 10.0;
  return p;
}

}  // namespace

TEST_CASE("Rician sampling") {
  SUBCASE("pure line of sight at the reference distance") {
    Rng rng(10);
    const auto h = sample_rician(single_device(10.0, 0.9), params_for(4, 1e9, 0.2), rng);
    CHECK((h.col(0) - array_response(0.9, 4, 0.5)).norm() < 1e-3);
  }
  SUBCASE("scattered part has covariance R") {
    Rng rng(11);
    const int n = 3, draws = 100000;
    const double theta = 0.6, spread = 0.22;
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    const auto geo = single_device(10.0, theta);
    const auto params = params_for(n, 0.0, spread);
    for (int i = 0; i < draws; ++i) {
      const ComplexVector g = sample_rician(geo, params, rng).col(0);
      acc += g * g.adjoint();
    }
    acc /= draws;
    const auto r = spatial_covariance(theta, spread, n, 0.5);
    CHECK((acc - r).norm() / r.norm() < 0.05);
  }
  SUBCASE("3 dB Rician factor preserves average power") {
    Rng rng(12);
    const int n = 6, draws = 100000;
    const auto geo = single_device(10.0, 2.0);
    const auto params = params_for(n, std::pow(10.0, 0.3), 13.5 * pi / 180.0);
    double power = 0.0;
    for (int i = 0; i < draws; ++i) power += sample_rician(geo, params, rng).col(0).squaredNorm();
    CHECK(std::abs(power / draws / n - 1.0) < 0.02);
  }
  SUBCASE("path loss scales the column power") {
    Rng a(13), b(13);
    const auto near = sample_rician(single_device(10.0, 1.0), params_for(2, 2.0, 0.2), a);
    const auto far = sample_rician(single_device(20.0, 1.0), params_for(2, 2.0, 0.2), b);
    CHECK((far - std::sqrt(0.125) * near).norm() < 1e-12);
  }
  SUBCASE("inconsistent dimensions") {
    Rng rng(14);
    auto p = params_for(2, 1.0, 0.2);
    p.rician_factors.push_back(1.0);
    CHECK_THROWS(sample_rician(single_device(10.0, 1.0), p, rng));
  }
}

TEST_CASE("ring scenario") {
  Rng rng(15);
  const RicianScenario scenario;
  const auto h = sample_rician_network(6, 20, scenario, rng);
  CHECK(h.rows() == 6);
  CHECK(h.cols() == 20);
  CHECK(all_finite(h));
  CHECK(db_to_linear(3.0) == doctest::Approx(std::pow(10.0, 0.3)));
  CHECK(db_to_linear(-10.0) == doctest::Approx(0.1));
}
