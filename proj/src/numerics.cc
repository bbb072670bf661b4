#include "otasched/numerics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace otasched {
namespace {

constexpr std::uint64_t kStartSeed = 0x5eed5eed5eedULL;
// Plain iterations between squarings of the working operator. Squaring keeps
// the eigenvectors and raises the eigenvalue ratio to the second power, so
// pairs with a tiny spectral gap still converge inside the budget.
constexpr int kSquaringPeriod = 64;
constexpr double kPsdClip = -1e-9;

double hermitian_tolerance(const ComplexMatrix& r) {
  return 1e-10 * std::max(1.0, r.cwiseAbs().maxCoeff());
}

}  // namespace

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

SingularPair leading_eigenpair(const ComplexMatrix& gram,
                               const PowerIterationOptions& options) {
  if (gram.rows() < 1 || gram.rows() != gram.cols())
    throw DegenerateInputError("leading_eigenpair: matrix must be square");
  if (!(options.tol > 0.0))
    throw std::invalid_argument("leading_eigenpair: tol must be positive");
  if (!all_finite(gram))
    throw DegenerateInputError("leading_eigenpair: non-finite entries");
  const double scale = gram.cwiseAbs().maxCoeff();
  if (scale == 0.0)
    throw DegenerateInputError("leading_eigenpair: zero matrix");

  const Eigen::Index n = gram.rows();
  SingularPair pair;
  if (n == 1) {
    pair.vector = ComplexVector::Ones(1);
    pair.value = gram(0, 0).real();
    return pair;
  }

  Rng rng(kStartSeed);
  ComplexVector v = random_unit_vector(n, rng);
  ComplexMatrix op = gram / scale;
  ComplexVector gv(n);
  for (int it = 1; it <= options.max_iter; ++it) {
    ComplexVector next = op * v;
    double norm = next.norm();
    if (norm == 0.0) {
      // Start vector landed in the null space of op; restart from a column.
      Eigen::Index col = 0;
      op.colwise().norm().maxCoeff(&col);
      next = op.col(col);
      norm = next.norm();
    }
    v = next / norm;
    gv.noalias() = gram * v;
    const double rho = v.dot(gv).real();
    pair.vector = v;
    pair.value = std::max(rho, 0.0);
    pair.iterations = it;
    const double residual = (gv - rho * v).norm();
    if (residual <= options.tol * std::max(rho, scale * 1e-300)) return pair;
    if (it % kSquaringPeriod == 0) {
      ComplexMatrix sq = op * op;
      sq = 0.5 * (sq + sq.adjoint()).eval();
      const double s = sq.cwiseAbs().maxCoeff();
      if (s > 0.0) op = sq / s;
    }
  }
  std::ostringstream msg;
  msg << "leading_eigenpair: no convergence after " << options.max_iter
      << " iterations";
  throw ConvergenceError(msg.str(), pair);
}

SingularPair leading_left_singular_pair(const ComplexMatrix& m,
                                        const PowerIterationOptions& options) {
  if (m.rows() < 1 || m.cols() < 1)
    throw DegenerateInputError("leading_left_singular_pair: empty matrix");
  if (!all_finite(m))
    throw DegenerateInputError("leading_left_singular_pair: non-finite entries");
  if (m.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateInputError("leading_left_singular_pair: zero matrix");
  ComplexMatrix gram = m * m.adjoint();
  return leading_eigenpair(gram, options);
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& r) {
  if (r.rows() != r.cols() || r.rows() < 1)
    throw std::invalid_argument("hermitian_sqrt: matrix must be square");
  if ((r - r.adjoint()).cwiseAbs().maxCoeff() > hermitian_tolerance(r))
    throw std::invalid_argument("hermitian_sqrt: matrix is not Hermitian");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(r);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("hermitian_sqrt: eigendecomposition failed");
  Eigen::VectorXd lambda = eig.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < kPsdClip) {
      std::ostringstream msg;
      msg << "hermitian_sqrt: eigenvalue " << lambda(i)
          << " is below the PSD clip threshold " << kPsdClip;
      throw NotPositiveSemidefiniteError(msg.str(), lambda(i));
    }
    lambda(i) = std::sqrt(std::max(lambda(i), 0.0));
  }
  const ComplexMatrix& u = eig.eigenvectors();
  return u * lambda.asDiagonal() * u.adjoint();
}

ComplexVector random_unit_vector(Eigen::Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_unit_vector: n must be >= 1");
  ComplexVector v = complex_normal_vector(n, rng);
  double norm = v.norm();
  while (norm == 0.0) {
    v = complex_normal_vector(n, rng);
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace otasched
