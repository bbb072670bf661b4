#include "otasched/irs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace otasched {
namespace {

constexpr double kUnitTol = 1e-10;
constexpr double kMinCoordinate = 1e-12;

}  // namespace

void IrsChannelModel::validate() const {
  if (direct.rows() < 1 || direct.cols() < 1)
    throw std::invalid_argument("IrsChannelModel: empty direct channel");
  if (reflect.rows() != direct.rows())
    throw std::invalid_argument("IrsChannelModel: reflect must have N rows");
  if (cascade.rows() != reflect.cols() || cascade.cols() != direct.cols())
    throw std::invalid_argument("IrsChannelModel: cascade must be M x K");
}

PhaseVector::PhaseVector(ComplexVector values) : values_(std::move(values)) {
  for (Eigen::Index m = 0; m < values_.size(); ++m)
    if (std::abs(std::abs(values_(m)) - 1.0) > kUnitTol)
      throw std::invalid_argument("PhaseVector: entry off the unit circle");
}

PhaseVector PhaseVector::ones(int m) {
  return PhaseVector(ComplexVector::Ones(m));
}

PhaseVector PhaseVector::from_angles(const std::vector<double>& angles) {
  ComplexVector v(angles.size());
  for (std::size_t m = 0; m < angles.size(); ++m) v(m) = std::polar(1.0, angles[m]);
  return PhaseVector(std::move(v));
}

double QuadraticForm::evaluate(const ComplexVector& mu) const {
  return mu.dot(q * mu).real() + 2.0 * mu.dot(a).real();
}

ChannelRealization effective_channel(const IrsChannelModel& model,
                                     const PhaseVector& mu) {
  model.validate();
  if (mu.size() != model.num_elements())
    throw std::invalid_argument("effective_channel: phase vector length != M");
  ChannelRealization h = model.direct;
  if (model.num_elements() == 0) return h;
  for (int k = 0; k < model.num_devices(); ++k)
    h.col(k) += model.reflect * model.cascade.col(k).cwiseProduct(mu.values());
  return h;
}

QuadraticForm build_quadratic(const ComplexVector& c,
                              const std::vector<double>& weights,
                              const IrsChannelModel& model) {
  model.validate();
  const int m = model.num_elements();
  QuadraticForm form{ComplexMatrix::Zero(m, m), ComplexVector::Zero(m)};
  if (m == 0) return form;
  // h_k(mu)^H c = h0_k^H c + mu^H b_k with b_k = G_k^H T^H c.
  const ComplexVector tc = model.reflect.adjoint() * c;
  for (int k = 0; k < model.num_devices(); ++k) {
    const double w = weights[k];
    if (w == 0.0) continue;
    const ComplexVector b = model.cascade.col(k).conjugate().cwiseProduct(tc);
    form.q.noalias() += w * b * b.adjoint();
    form.a += (w * c.dot(model.direct.col(k))) * b;
  }
  return form;
}

PhaseVector bcd_phase_update(const QuadraticForm& form, const PhaseVector& mu,
                             int sweeps,
                             const std::function<void(double)>& observer) {
  const int m = mu.size();
  if (form.q.rows() != m || form.a.size() != m)
    throw std::invalid_argument("bcd_phase_update: dimension mismatch");
  ComplexVector x = mu.values();
  // Running q * x, updated incrementally after each coordinate change.
  ComplexVector qx = form.q * x;
  for (int s = 0; s < sweeps; ++s) {
    for (int i = 0; i < m; ++i) {
      const std::complex<double> b = form.a(i) + qx(i) - form.q(i, i) * x(i);
      const double mag = std::abs(b);
      if (mag > kMinCoordinate) {
        const std::complex<double> next = b / mag;
        const std::complex<double> step = next - x(i);
        qx += form.q.col(i) * step;
        x(i) = next;
      }
      if (observer) observer(form.evaluate(x));
    }
  }
  return PhaseVector(std::move(x));
}

PhaseVector bcd_phase_update(const QuadraticForm& form, const PhaseVector& mu,
                             int sweeps) {
  return bcd_phase_update(form, mu, sweeps, {});
}

TunedOutcome schedule_mp_tuned(const IrsChannelModel& model,
                               std::span<const double> phi, double gamma,
                               const WeightPolicy& policy,
                               const PhaseVector& initial,
                               const TuningOptions& options) {
  model.validate();
  if (initial.size() != model.num_elements())
    throw std::invalid_argument("schedule_mp_tuned: phase vector length != M");
  PhaseVector phases = initial;
  int outer = 0;

  auto step = [&](const std::vector<double>& w) {
    ++outer;
    double phi_bar = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) phi_bar += w[k] * phi[k] * phi[k];
    auto objective = [&](const ChannelRealization& h, const ComplexVector& c) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < h.cols(); ++k)
        if (w[k] != 0.0) s += w[k] * std::norm(h.col(k).dot(c));
      return phi_bar - gamma * s;
    };

    PhaseVector mu = phases;
    ChannelRealization h = effective_channel(model, mu);
    ComplexVector c;
    double previous = std::numeric_limits<double>::infinity();
    for (int j = 0; j < options.max_alternations; ++j) {
      c = detail::weighted_leading_vector(h, w, options.power);
      if (model.num_elements() > 0) {
        mu = bcd_phase_update(build_quadratic(c, w, model), mu,
                              options.bcd_sweeps);
        h = effective_channel(model, mu);
      }
      const double current = objective(h, c);
      if (options.on_alternation) options.on_alternation(outer, current);
      if (model.num_elements() == 0) break;
      const double change = previous - current;
      previous = current;
      if (std::isfinite(change) &&
          change < options.relative_tol * std::max(1.0, std::abs(current)))
        break;
    }
    phases = mu;
    return detail::ReceiverUpdate{std::move(c), std::move(h)};
  };

  TunedOutcome out;
  out.schedule = detail::run_elimination(model.num_devices(), phi, gamma, policy,
                                         step, next_removal_index, false,
                                         options.record_trace);
  out.phases = phases;
  return out;
}

IrsChannelModel sample_irs_model(ComplexMatrix direct,
                                 const IrsScenario& scenario, Rng& rng) {
  IrsChannelModel model;
  const Eigen::Index n = direct.rows();
  const Eigen::Index k = direct.cols();
  const int m = scenario.num_elements;
  model.direct = std::move(direct);
  model.reflect.resize(n, m);
  model.cascade.resize(m, k);
  const double sr = std::sqrt(scenario.reflect_var);
  const double sc = std::sqrt(scenario.cascade_var);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) model.reflect(i, j) = sr * complex_normal(rng);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < m; ++i) model.cascade(i, j) = sc * complex_normal(rng);
  return model;
}

}  // namespace otasched
