// Copyright 2026 The catsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CATSIM_LINALG_HPP
#define CATSIM_LINALG_HPP

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace catsim::linalg {

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct Eig {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // right eigenvectors, one per column
};

// General complex eigendecomposition (LAPACK zgeev).
Eig eig(const Eigen::MatrixXcd& a);

struct EigPairs {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd right;  // A v = lambda v
  Eigen::MatrixXcd left;   // w^H A = lambda w^H
};

// Eigendecomposition with matched left and right eigenvectors.
EigPairs eig_pairs(const Eigen::MatrixXcd& a);

struct HermEig {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // orthonormal columns
};

// Hermitian eigendecomposition (LAPACK zheevd). Uses the lower triangle.
HermEig heig(const Eigen::MatrixXcd& a);

struct Svd {
  Eigen::VectorXd singular_values;  // descending
  Eigen::MatrixXcd u;
  Eigen::MatrixXcd v;  // columns are right singular vectors
};

Svd svd(const Eigen::MatrixXcd& a);

// Orthonormal basis of the (approximate) null space: right singular vectors
// with singular value <= rel_tol * s_max. Columns ordered by descending
// singular-value gap (smallest singular value first).
Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& a, double rel_tol = 1e-10);

// LU factorization wrapper (zgetrf / zgetrs) for repeated solves.
class LuSolver {
 public:
  explicit LuSolver(Eigen::MatrixXcd a);
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& b) const;
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
  // Solves A^H x = b with the same factorization.
  Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& b) const;

 private:
  Eigen::MatrixXcd lu_;
  std::vector<int> ipiv_;
};

// Ritz approximations to the eigenpairs of `a` nearest zero, via Arnoldi
// iteration on (a - shift I)^{-1}. `shift` should be small, positive real,
// and outside the spectrum (Liouvillians have Re(lambda) <= 0, so any
// shift > 0 works). Returns up to `k` pairs sorted by ascending |lambda|.
struct RitzPairs {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd residuals;  // ||a v - lambda v||_2 per pair
};
RitzPairs eigs_near_zero(const Eigen::MatrixXcd& a, int k, std::complex<double> shift,
                         int krylov_dim = 0);

// Matched left/right Ritz pairs near zero. Reuses one LU factorization for
// both Krylov recursions; pairs are matched by eigenvalue.
struct RitzPairsTwoSided {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
  Eigen::VectorXd residuals;
};
RitzPairsTwoSided eigs_near_zero_two_sided(const Eigen::MatrixXcd& a, int k,
                                           std::complex<double> shift, int krylov_dim = 0);

// Matrix exponential, Pade-13 with scaling and squaring (Higham 2005).
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

}  // namespace catsim::linalg

#endif  // CATSIM_LINALG_HPP
