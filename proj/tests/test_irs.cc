#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "otasched/irs.hpp"

using namespace otasched;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {

IrsChannelModel random_model(int n, int m, int k, Rng& rng) {
  IrsScenario sc;
  sc.num_elements = m;
  return sample_irs_model(sample_iid_gaussian(n, k, rng), sc, rng);
}

PhaseVector random_phases(int m, Rng& rng) {
  std::vector<double> a(m);
  for (double& x : a) x = uniform(rng, 0, 2 * pi);
  return PhaseVector::from_angles(a);
}

std::vector<double> random_weights(int k, Rng& rng) {
  std::vector<double> w(k);
  for (double& x : w) x = uniform(rng, 0, 1);
  return w;
}

double weighted_gain(const ChannelRealization& h, const std::vector<double>& w,
                     const ComplexVector& c) {
  double s = 0;
  for (int k = 0; k < h.cols(); ++k) s += w[k] * std::norm(h.col(k).dot(c));
  return s;
}

double grid_maximum(const QuadraticForm& f, int steps) {
  double best = -INFINITY;
  ComplexVector mu(2);
  for (int i = 0; i < steps; ++i) {
    mu(0) = std::polar(1.0, 2 * pi * i / steps);
    for (int j = 0; j < steps; ++j) {
      mu(1) = std::polar(1.0, 2 * pi * j / steps);
      best = std::max(best, f.evaluate(mu));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("phase vectors stay on the unit circle") {
  CHECK(PhaseVector::ones(3).values() == ComplexVector::Ones(3));
  const auto p = PhaseVector::from_angles({0.0, pi / 2});
  CHECK(std::abs(p[1] - cd(0, 1)) < 1e-15);
  ComplexVector bad(2);
  bad << 1.0, 1.1;
  CHECK_THROWS(PhaseVector(bad));
}

TEST_CASE("effective channel") {
  Rng rng(1);
  SUBCASE("no elements") {
    const auto h0 = sample_iid_gaussian(3, 4, rng);
    const IrsChannelModel model{h0, ComplexMatrix(3, 0), ComplexMatrix(0, 4)};
    CHECK(effective_channel(model, PhaseVector::ones(0)) == h0);
  }
  SUBCASE("zero cascades") {
    auto model = random_model(3, 5, 4, rng);
    model.cascade.setZero();
    CHECK(effective_channel(model, random_phases(5, rng)) == model.direct);
  }
  SUBCASE("matches the scalar expansion") {
    const auto model = random_model(2, 3, 2, rng);
    const auto mu = random_phases(3, rng);
    const auto h = effective_channel(model, mu);
    for (int n = 0; n < 2; ++n)
      for (int k = 0; k < 2; ++k) {
        cd s = model.direct(n, k);
        for (int m = 0; m < 3; ++m) s += model.reflect(n, m) * model.cascade(m, k) * mu[m];
        CHECK(std::abs(h(n, k) - s) < 1e-12);
      }
  }
  SUBCASE("dimension mismatch") {
    const auto model = random_model(2, 3, 2, rng);
    CHECK_THROWS(effective_channel(model, PhaseVector::ones(4)));
    IrsChannelModel broken = model;
    broken.cascade.resize(2, 2);
    CHECK_THROWS(broken.validate());
  }
}

TEST_CASE("quadratic form") {
  Rng rng(2);
  SUBCASE("single device without direct path") {
    auto model = random_model(3, 4, 1, rng);
    model.direct.setZero();
    const ComplexVector c = random_unit_vector(3, rng);
    const auto f = build_quadratic(c, {0.7}, model);
    const ComplexVector b = model.cascade.col(0).conjugate().cwiseProduct(model.reflect.adjoint() * c);
    CHECK((f.q - 0.7 * b * b.adjoint()).norm() < 1e-12);
    CHECK(f.a.norm() < 1e-15);
  }
  SUBCASE("zero weights") {
    const auto model = random_model(3, 4, 3, rng);
    const auto f = build_quadratic(random_unit_vector(3, rng), {0, 0, 0}, model);
    CHECK(f.q.norm() == 0.0);
    CHECK(f.a.norm() == 0.0);
  }
  SUBCASE("expansion identity") {
    const auto model = random_model(4, 6, 5, rng);
    const ComplexVector c = random_unit_vector(4, rng);
    const auto w = random_weights(5, rng);
    const auto f = build_quadratic(c, w, model);
    CHECK((f.q - f.q.adjoint()).norm() < 1e-10);
    const double base = weighted_gain(model.direct, w, c);
    for (int rep = 0; rep < 100; ++rep) {
      const auto mu = random_phases(6, rng);
      const double lhs = f.evaluate(mu.values()) + base;
      const double rhs = weighted_gain(effective_channel(model, mu), w, c);
      CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, rhs));
    }
  }
}

TEST_CASE("coordinate ascent") {
  Rng rng(3);
  SUBCASE("linear objective is solved in one sweep") {
    QuadraticForm f{ComplexMatrix::Zero(3, 3), ComplexVector(3)};
    f.a << cd(1, 2), cd(-3, 0.5), cd(0, -1);
    const auto mu = bcd_phase_update(f, PhaseVector::ones(3), 1);
    for (int m = 0; m < 3; ++m) CHECK(std::abs(mu[m] - f.a(m) / std::abs(f.a(m))) < 1e-12);
  }
  SUBCASE("single element") {
    QuadraticForm f{ComplexMatrix::Constant(1, 1, 2.5), ComplexVector::Constant(1, cd(-1, 1))};
    const auto mu = bcd_phase_update(f, PhaseVector::ones(1), 1);
    CHECK(std::abs(mu[0] - cd(-1, 1) / std::sqrt(2.0)) < 1e-12);
  }
  SUBCASE("zero gradient leaves the element unchanged") {
    QuadraticForm f{ComplexMatrix::Zero(2, 2), ComplexVector::Zero(2)};
    const auto start = PhaseVector::from_angles({0.3, 1.9});
    CHECK(bcd_phase_update(f, start, 2).values() == start.values());
  }
  SUBCASE("objective never decreases") {
    for (int rep = 0; rep < 50; ++rep) {
      const auto model = random_model(3, 8, 6, rng);
      const auto f = build_quadratic(random_unit_vector(3, rng), random_weights(6, rng), model);
      const auto start = random_phases(8, rng);
      double last = f.evaluate(start.values());
      int violations = 0;
      bcd_phase_update(f, start, 5, [&](double v) {
        violations += v < last - 1e-12 * std::max(1.0, std::abs(last));
        last = v;
      });
      CHECK(violations == 0);
    }
  }
  SUBCASE("two elements reach the grid-search maximum") {
    for (int rep = 0; rep < 10; ++rep) {
      const auto model = random_model(2, 2, 3, rng);
      const auto f = build_quadratic(random_unit_vector(2, rng), random_weights(3, rng), model);
      const auto mu = bcd_phase_update(f, PhaseVector::ones(2), 200);
      const double grid = grid_maximum(f, 1000);
      CHECK(f.evaluate(mu.values()) >= grid - 1e-3);
    }
  }
}

TEST_CASE("joint tuning") {
  Rng rng(4);
  SUBCASE("no elements reproduces matching pursuit bit for bit") {
    for (int rep = 0; rep < 30; ++rep) {
      const auto h = sample_iid_gaussian(4, 10, rng);
      const IrsChannelModel model{h, ComplexMatrix(4, 0), ComplexMatrix(0, 10)};
      const std::vector<double> phi(10, 1.0);
      const double gamma = gamma_from_db(uniform(rng, -6, 8));
      const auto tuned = schedule_mp_tuned(model, phi, gamma, WeightPolicy(), PhaseVector::ones(0));
      const auto plain = schedule_mp(h, phi, gamma, WeightPolicy());
      CHECK(tuned.schedule.active == plain.active);
      CHECK(tuned.schedule.receiver == plain.receiver);
      CHECK(tuned.schedule.iterations == plain.iterations);
    }
  }
  SUBCASE("zero cascades give the same schedule") {
    for (int rep = 0; rep < 20; ++rep) {
      auto model = random_model(4, 6, 10, rng);
      model.cascade.setZero();
      const std::vector<double> phi(10, 1.0);
      const double gamma = gamma_from_db(uniform(rng, -6, 8));
      const auto tuned = schedule_mp_tuned(model, phi, gamma, WeightPolicy(), PhaseVector::ones(6));
      CHECK(tuned.schedule.active == schedule_mp(model.direct, phi, gamma, WeightPolicy()).active);
    }
  }
  SUBCASE("outputs are certified on the tuned channel") {
    for (int rep = 0; rep < 30; ++rep) {
      const auto model = random_model(3, 4, 8, rng);
      const std::vector<double> phi(8, 1.0);
      const double gamma = gamma_from_db(uniform(rng, -10, 5));
      const auto out = schedule_mp_tuned(model, phi, gamma, WeightPolicy(), PhaseVector::ones(4));
      CHECK(satisfies_certificate(effective_channel(model, out.phases), phi, gamma,
                                  out.schedule.active, out.schedule.receiver));
    }
  }
  SUBCASE("alternating objective does not increase") {
    for (int rep = 0; rep < 20; ++rep) {
      const auto model = random_model(4, 8, 10, rng);
      const std::vector<double> phi(10, 1.0);
      TuningOptions opts;
      int last_outer = -1, violations = 0;
      double last = INFINITY;
      opts.on_alternation = [&](int outer, double objective) {
        if (outer != last_outer) {
          last_outer = outer;
          last = INFINITY;
        }
        violations += objective > last + 1e-9 * std::max(1.0, std::abs(last));
        last = objective;
      };
      schedule_mp_tuned(model, phi, gamma_from_db(-3), WeightPolicy(), PhaseVector::ones(8), opts);
      CHECK(violations == 0);
    }
  }
  SUBCASE("tuning helps against frozen phases on average") {
    double tuned = 0, frozen = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const auto model = random_model(4, 8, 10, rng);
      const std::vector<double> phi(10, 1.0);
      const double gamma = gamma_from_db(-6);
      const auto mu0 = PhaseVector::ones(8);
      tuned += schedule_mp_tuned(model, phi, gamma, WeightPolicy(), mu0).schedule.size();
      frozen += schedule_mp(effective_channel(model, mu0), phi, gamma, WeightPolicy()).size();
    }
    CHECK(tuned >= frozen);
  }
}
