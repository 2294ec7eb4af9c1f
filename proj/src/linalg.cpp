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

#include "catsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <lapacke.h>

namespace catsim::linalg {

namespace {
lapack_complex_double* lp(Eigen::MatrixXcd& m) {
  return reinterpret_cast<lapack_complex_double*>(m.data());
}
lapack_complex_double* lp(Eigen::VectorXcd& v) {
  return reinterpret_cast<lapack_complex_double*>(v.data());
}
}  // namespace

Eig eig(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw SolverError("eig: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::MatrixXcd work = a;
  Eig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, lp(work), n,
                                  lp(out.values), nullptr, 1, lp(out.vectors), n);
  if (info != 0) throw SolverError("zgeev failed, info=" + std::to_string(info));
  return out;
}

EigPairs eig_pairs(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw SolverError("eig_pairs: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::MatrixXcd work = a;
  EigPairs out;
  out.values.resize(n);
  out.right.resize(n, n);
  out.left.resize(n, n);
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'V', 'V', n, lp(work), n,
                                  lp(out.values), lp(out.left), n, lp(out.right), n);
  if (info != 0) throw SolverError("zgeev failed, info=" + std::to_string(info));
  return out;
}

HermEig heig(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw SolverError("heig: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  HermEig out;
  out.vectors = a;
  out.values.resize(n);
  lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, lp(out.vectors), n, out.values.data());
  if (info != 0) throw SolverError("zheevd failed, info=" + std::to_string(info));
  return out;
}

Svd svd(const Eigen::MatrixXcd& a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Eigen::MatrixXcd work = a;
  Svd out;
  out.singular_values.resize(k);
  out.u.resize(m, k);
  Eigen::MatrixXcd vt(k, n);
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, lp(work), m,
                                   out.singular_values.data(), lp(out.u), m, lp(vt), k);
  if (info != 0) throw SolverError("zgesdd failed, info=" + std::to_string(info));
  out.v = vt.adjoint();
  return out;
}

Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& a, double rel_tol) {
  Svd s = svd(a);
  const auto& sv = s.singular_values;
  const double smax = sv.size() ? sv(0) : 0.0;
  const double cutoff = rel_tol * std::max(smax, 1e-300);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  const int nullity = static_cast<int>(sv.size()) - rank;
  Eigen::MatrixXcd out(a.cols(), nullity);
  // Smallest singular value first.
  for (int i = 0; i < nullity; ++i) out.col(i) = s.v.col(sv.size() - 1 - i);
  return out;
}

LuSolver::LuSolver(Eigen::MatrixXcd a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) throw SolverError("LuSolver: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  ipiv_.resize(n);
  lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lp(lu_), n, ipiv_.data());
  if (info != 0) throw SolverError("zgetrf failed, info=" + std::to_string(info));
}

Eigen::MatrixXcd LuSolver::solve(const Eigen::MatrixXcd& b) const {
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  if (b.rows() != n) throw SolverError("LuSolver::solve: dimension mismatch");
  Eigen::MatrixXcd x = b;
  Eigen::MatrixXcd& lu = const_cast<Eigen::MatrixXcd&>(lu_);
  lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, static_cast<lapack_int>(b.cols()),
                                   lp(lu), n, ipiv_.data(), lp(x), n);
  if (info != 0) throw SolverError("zgetrs failed, info=" + std::to_string(info));
  return x;
}

Eigen::VectorXcd LuSolver::solve(const Eigen::VectorXcd& b) const {
  return Eigen::VectorXcd(solve(Eigen::MatrixXcd(b)));
}

Eigen::VectorXcd LuSolver::solve_adjoint(const Eigen::VectorXcd& b) const {
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  if (b.rows() != n) throw SolverError("LuSolver::solve_adjoint: dimension mismatch");
  Eigen::VectorXcd x = b;
  Eigen::MatrixXcd& lu = const_cast<Eigen::MatrixXcd&>(lu_);
  lapack_int info =
      LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'C', n, 1, lp(lu), n, ipiv_.data(), lp(x), n);
  if (info != 0) throw SolverError("zgetrs failed, info=" + std::to_string(info));
  return x;
}

namespace {

// Arnoldi on op(v) with modified Gram-Schmidt; returns Ritz pairs of the
// ORIGINAL matrix given the Ritz values mu of the inverse map via
// lambda = shift + 1/mu.
RitzPairs arnoldi_near_zero(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op,
                            const Eigen::MatrixXcd& a_for_residual, bool adjoint_residual,
                            int n, int k, std::complex<double> shift, int krylov_dim) {
  Eigen::MatrixXcd q(n, krylov_dim + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(krylov_dim + 1, krylov_dim);
  Eigen::VectorXcd v0 = Eigen::VectorXcd::Ones(n);
  for (int i = 0; i < n; ++i) v0(i) += std::complex<double>(0.0, 1.0 / (i + 1.0));
  q.col(0) = v0 / v0.norm();
  int m = krylov_dim;
  for (int j = 0; j < krylov_dim; ++j) {
    Eigen::VectorXcd w = op(q.col(j));
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        std::complex<double> c = q.col(i).adjoint() * w;
        if (pass == 0) h(i, j) = c; else h(i, j) += c;
        w -= c * q.col(i);
      }
    }
    const double nrm = w.norm();
    h(j + 1, j) = nrm;
    if (nrm < 1e-14) { m = j + 1; break; }
    q.col(j + 1) = w / nrm;
  }

  Eig small = eig(h.topLeftCorner(m, m));
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    return std::abs(small.values(i)) > std::abs(small.values(j));
  });

  const int nk = std::min(k, m);
  RitzPairs out;
  out.values.resize(nk);
  out.vectors.resize(n, nk);
  out.residuals.resize(nk);
  for (int i = 0; i < nk; ++i) {
    const std::complex<double> mu = small.values(idx[i]);
    out.values(i) = shift + 1.0 / mu;
    Eigen::VectorXcd v = q.leftCols(m) * small.vectors.col(idx[i]);
    v.normalize();
    out.vectors.col(i) = v;
    if (adjoint_residual)
      out.residuals(i) = (a_for_residual.adjoint() * v - out.values(i) * v).norm();
    else
      out.residuals(i) = (a_for_residual * v - out.values(i) * v).norm();
  }
  return out;
}

}  // namespace

RitzPairs eigs_near_zero(const Eigen::MatrixXcd& a, int k, std::complex<double> shift,
                         int krylov_dim) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw SolverError("eigs_near_zero: matrix must be square");
  if (krylov_dim <= 0) krylov_dim = std::min(n, std::max(4 * k, 40));
  krylov_dim = std::min(krylov_dim, n);
  if (k > krylov_dim) k = krylov_dim;

  Eigen::MatrixXcd shifted = a;
  shifted.diagonal().array() -= shift;
  LuSolver lu(std::move(shifted));
  auto op = [&](const Eigen::VectorXcd& v) { return lu.solve(v); };
  return arnoldi_near_zero(op, a, false, n, k, shift, krylov_dim);
}

RitzPairsTwoSided eigs_near_zero_two_sided(const Eigen::MatrixXcd& a, int k,
                                           std::complex<double> shift, int krylov_dim) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw SolverError("eigs_near_zero_two_sided: matrix must be square");
  if (krylov_dim <= 0) krylov_dim = std::min(n, std::max(4 * k, 40));
  krylov_dim = std::min(krylov_dim, n);
  if (k > krylov_dim) k = krylov_dim;

  Eigen::MatrixXcd shifted = a;
  shifted.diagonal().array() -= shift;
  LuSolver lu(std::move(shifted));

  auto op_r = [&](const Eigen::VectorXcd& v) { return lu.solve(v); };
  RitzPairs right = arnoldi_near_zero(op_r, a, false, n, k, shift, krylov_dim);

  // (a - shift)^H x = b solves the adjoint problem with shift conj(shift);
  // the same factorization serves both recursions.
  auto op_l = [&](const Eigen::VectorXcd& v) { return lu.solve_adjoint(v); };
  RitzPairs left = arnoldi_near_zero(op_l, a, true, n, k, std::conj(shift), krylov_dim);

  // Match left pairs (values conj(lambda)) to right pairs (values lambda).
  RitzPairsTwoSided out;
  const int nk = static_cast<int>(right.values.size());
  out.values.resize(nk);
  out.right.resize(n, nk);
  out.left.resize(n, nk);
  out.residuals.resize(nk);
  for (int i = 0; i < nk; ++i) {
    out.values(i) = right.values(i);
    out.right.col(i) = right.vectors.col(i);
    out.residuals(i) = right.residuals(i);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < left.values.size(); ++j) {
      const double d = std::abs(std::conj(left.values(j)) - right.values(i));
      if (d < best_d) { best_d = d; best = j; }
    }
    out.left.col(i) = left.vectors.col(best);
  }
  return out;
}

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  // Higham's scaling-and-squaring with the [13/13] Pade approximant.
  static const double pade_coeffs[14] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const int n = static_cast<int>(a.rows());
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  const double theta13 = 5.371920351148152;
  Eigen::MatrixXcd as = a;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    as /= std::pow(2.0, squarings);
  }
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd a2 = as * as;
  const Eigen::MatrixXcd a4 = a2 * a2;
  const Eigen::MatrixXcd a6 = a2 * a4;
  Eigen::MatrixXcd u =
      as * (a6 * (pade_coeffs[13] * a6 + pade_coeffs[11] * a4 + pade_coeffs[9] * a2) +
            pade_coeffs[7] * a6 + pade_coeffs[5] * a4 + pade_coeffs[3] * a2 +
            pade_coeffs[1] * id);
  Eigen::MatrixXcd v =
      a6 * (pade_coeffs[12] * a6 + pade_coeffs[10] * a4 + pade_coeffs[8] * a2) +
      pade_coeffs[6] * a6 + pade_coeffs[4] * a4 + pade_coeffs[2] * a2 + pade_coeffs[0] * id;
  LuSolver lu(v - u);
  Eigen::MatrixXcd r = lu.solve(Eigen::MatrixXcd(v + u));
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace catsim::linalg
