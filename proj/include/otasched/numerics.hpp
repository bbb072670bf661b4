#pragma once

// Small complex linear-algebra kernel: dominant left singular pair via power
// iteration, Hermitian square roots and isotropic unit vectors.

#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "otasched/random.hpp"

namespace otasched {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Leading left singular vector of M together with the squared singular value
/// (equivalently the top eigenpair of M M^H).
struct SingularPair {
  ComplexVector vector;
  double value = 0.0;
  int iterations = 0;
};

struct PowerIterationOptions {
  double tol = 1e-10;
  int max_iter = 10000;
};

class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when power iteration exhausts its budget. Carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, SingularPair last)
      : std::runtime_error(what), last_iterate_(std::move(last)) {}
  const SingularPair& last_iterate() const { return last_iterate_; }

 private:
  SingularPair last_iterate_;
};

class NotPositiveSemidefiniteError : public std::domain_error {
 public:
  NotPositiveSemidefiniteError(const std::string& what, double eigenvalue)
      : std::domain_error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Top eigenpair of a Hermitian positive semidefinite matrix by power
/// iteration. Converged when ||G v - rho v|| <= tol * rho. The start vector is
/// drawn from a fixed seed, so the result is a pure function of `gram`.
SingularPair leading_eigenpair(const ComplexMatrix& gram,
                               const PowerIterationOptions& options = {});

/// Leading left singular pair of a rectangular matrix, computed as the top
/// eigenpair of M M^H.
SingularPair leading_left_singular_pair(
    const ComplexMatrix& m, const PowerIterationOptions& options = {});

/// B with B B^H = R for Hermitian PSD R. Eigenvalues in [-1e-9, 0) are
/// clipped to zero; anything more negative is rejected.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& r);

/// Uniform draw from the complex unit sphere in C^n.
ComplexVector random_unit_vector(Eigen::Index n, Rng& rng);

bool all_finite(const ComplexMatrix& m);

}  // namespace otasched
