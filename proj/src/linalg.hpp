// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <Eigen/Dense>

namespace rismc
{

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

using Rng = std::mt19937_64;

// Eigendecomposition of the Hermitian part (A + A^H)/2; eigenvalues ascending.
struct HermitianEig
{
  RVec values;
  CMat vectors;
};

inline HermitianEig hermitian_eig(const CMat &a)
{
  const CMat sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> solver(sym);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Circularly-symmetric complex Gaussian with unit variance.
inline cplx complex_normal(Rng &rng)
{
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

inline double uniform(Rng &rng, double lo, double hi)
{
  std::uniform_real_distribution<double> ud(lo, hi);
  return ud(rng);
}

// Unit-modulus projection; zero entries map to 1.
inline cplx unit_phase(cplx z)
{
  return std::polar(1.0, std::arg(z));
}

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace rismc
