#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace otasched {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

// Child stream for (master seed, grid index, trial index). Streams for
// distinct index pairs are seeded from distinct mixed words, so the result
// depends only on the indices and never on execution order.
Rng derive_stream(std::uint64_t master_seed, std::uint64_t grid_index,
                  std::uint64_t trial_index);

// Standard circularly-symmetric complex Gaussian CN(0, 1).
std::complex<double> complex_normal(Rng& rng);

Eigen::VectorXcd complex_normal_vector(Eigen::Index n, Rng& rng);

double uniform(Rng& rng, double lo, double hi);

}  // namespace otasched
