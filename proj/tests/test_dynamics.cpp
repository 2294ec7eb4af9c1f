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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "catsim/dynamics.hpp"
#include "catsim/linalg.hpp"

using namespace catsim;
using dynamics::Dissipator;
using dynamics::Liouvillian;
using fock::Complex;
using fock::FockSpace;
using fock::Matrix;

namespace {

fock::Operator qubit_op(std::initializer_list<Complex> entries) {
  Matrix m(2, 2);
  int k = 0;
  for (Complex c : entries) m(k / 2, k % 2) = c, ++k;
  return fock::Operator(fock::CompositeSpace::single(2), m);
}

const fock::Operator kX = qubit_op({0, 1, 1, 0});
const fock::Operator kY = qubit_op({0, Complex(0, -1), Complex(0, 1), 0});
const fock::Operator kZ = qubit_op({1, 0, 0, -1});

Liouvillian ideal_two_photon(int dim, double kappa2, double alpha_sq) {
  FockSpace s(dim);
  auto a = fock::annihilation(s);
  auto jump = a * a - Complex(alpha_sq, 0) * fock::identity(a.space());
  return Liouvillian{0.0 * fock::identity(a.space()), {{kappa2, jump}}};
}

// Projector onto span{|alpha>, |-alpha>} by Gram orthogonalization.
Matrix cat_manifold_projector(int dim, double alpha) {
  FockSpace s(dim);
  Eigen::VectorXcd p = fock::coherent_state(s, alpha).amplitudes();
  Eigen::VectorXcd m = fock::coherent_state(s, -alpha).amplitudes();
  Eigen::VectorXcd e1 = p.normalized();
  Eigen::VectorXcd e2 = m - e1 * (e1.adjoint() * m);
  e2.normalize();
  return e1 * e1.adjoint() + e2 * e2.adjoint();
}

Matrix random_density(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
  Matrix rho = m * m.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_CASE("apply_dissipator basics") {
  FockSpace s(4);
  auto a = fock::annihilation(s);
  fock::DensityMatrix one(fock::fock_state(s, 1));
  Matrix d = dynamics::apply_dissipator({1.0, a}, one);
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 1;
  expected(1, 1) = -1;
  CHECK((d - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("two-photon dissipator annihilates the even cat state") {
  const int dim = 30;
  const double alpha = 1.5;
  FockSpace s(dim);
  auto a = fock::annihilation(s);
  auto jump = a * a - Complex(alpha * alpha, 0) * fock::identity(a.space());
  fock::DensityMatrix cat(fock::cat_state(s, alpha, +1));
  Matrix d = dynamics::apply_dissipator({1.0, jump}, cat);
  CHECK(d.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dissipators are trace preserving for random inputs") {
  std::mt19937 rng(3);
  std::normal_distribution<double> g(0, 1);
  Matrix l(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) l(i, j) = Complex(g(rng), g(rng));
  fock::Operator jump(fock::CompositeSpace::single(6), l);
  Matrix rho = random_density(6, 17);
  Matrix d = dynamics::apply_dissipator({0.7, jump}, rho);
  CHECK(std::abs(d.trace()) < 1e-12);
}

TEST_CASE("evolve reproduces single-photon decay") {
  FockSpace s(6);
  const double kappa1 = 1.0;
  Liouvillian l{0.0 * fock::identity(fock::CompositeSpace::single(6)),
                {{kappa1, fock::annihilation(s)}}};
  fock::DensityMatrix rho0(fock::fock_state(s, 1));
  std::vector<double> grid = {0.1, 0.5, 1.0, 2.0, 3.0};
  dynamics::EvolveOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-13;
  auto res = dynamics::evolve(l, rho0, grid, opts);
  auto n_op = fock::number_operator(s);
  for (size_t i = 0; i < grid.size(); ++i) {
    double n_mean = fock::expect(n_op, res.states[i]).real();
    CHECK(std::abs(n_mean - std::exp(-kappa1 * grid[i])) < 1e-7);
  }
  CHECK(res.max_trace_drift < 1e-8);
}

TEST_CASE("evolve matches the Pauli-channel closed forms") {
  const double gx = 0.31, gy = 0.17, gz = 0.56;
  Liouvillian l{0.0 * qubit_op({0, 0, 0, 0}), {{gx, kX}, {gy, kY}, {gz, kZ}}};
  // Initial state with both Z and X components.
  Matrix rho0m = 0.5 * (Matrix::Identity(2, 2) + (kX.matrix() + kZ.matrix()) / std::sqrt(2.0));
  fock::DensityMatrix rho0(fock::CompositeSpace::single(2), rho0m);
  const double z0 = (kZ.matrix() * rho0m).trace().real();
  const double x0 = (kX.matrix() * rho0m).trace().real();

  std::vector<double> grid = {0.05, 0.2, 0.5, 1.0, 1.7};
  dynamics::EvolveOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-13;
  opts.observables = {kZ, kX};
  auto res = dynamics::evolve(l, rho0, grid, opts);
  for (size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    CHECK(std::abs(res.observable_traces[0][i].real() - z0 * std::exp(-2 * (gx + gy) * t)) <
          1e-7);
    CHECK(std::abs(res.observable_traces[1][i].real() - x0 * std::exp(-2 * (gz + gy) * t)) <
          1e-7);
  }
}

TEST_CASE("ideal two-photon dissipation converges to the cat manifold") {
  const double alpha = std::sqrt(2.0);
  const int dim = 20;
  Liouvillian l = ideal_two_photon(dim, 1.0, alpha * alpha);
  fock::DensityMatrix rho0(fock::coherent_state(FockSpace(dim), alpha + 0.4));
  std::vector<double> grid = {10.0, 12.0};
  auto res = dynamics::evolve(l, rho0, grid);
  Matrix proj = cat_manifold_projector(dim, alpha);
  for (const auto& st : res.states) {
    const double fid = (proj * st.matrix() * proj).trace().real();
    CHECK(fid >= 0.999);
  }
}

TEST_CASE("schedule evolution equals segment-by-segment evolution bitwise") {
  FockSpace s(5);
  auto n_op = fock::number_operator(s);
  Liouvillian seg_a{2.0 * n_op, {{0.8, fock::annihilation(s)}}};
  Liouvillian seg_b{0.0 * n_op, {{0.3, fock::annihilation(s) * fock::annihilation(s)}}};
  dynamics::Schedule sched{{{0.7, seg_a}, {0.9, seg_b}}};
  fock::DensityMatrix rho0(fock::coherent_state(s, 0.9));

  std::vector<double> grid = {0.7, 1.6};
  auto joint = dynamics::evolve(sched, rho0, grid);

  std::vector<double> g1 = {0.7};
  auto first = dynamics::evolve(seg_a, rho0, g1);
  std::vector<double> g2 = {0.9};
  auto second = dynamics::evolve(seg_b, first.states[0], g2);

  // The handoff is the exact internal state; exported states are trace
  // renormalized, so the two-step path agrees to rounding.
  CHECK((joint.states[0].matrix() - first.states[0].matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((joint.states[1].matrix() - second.states[0].matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("evolve rejects grids beyond the schedule and bad tolerances") {
  FockSpace s(3);
  Liouvillian l{0.0 * fock::identity(fock::CompositeSpace::single(3)),
                {{1.0, fock::annihilation(s)}}};
  dynamics::Schedule sched{{{1.0, l}}};
  fock::DensityMatrix rho0(fock::fock_state(s, 1));
  std::vector<double> too_far = {0.5, 2.0};
  CHECK_THROWS_AS(dynamics::evolve(sched, rho0, too_far), fock::DimensionError);

  std::vector<double> ok = {0.5};
  dynamics::EvolveOptions opts;
  opts.rel_tol = -1;
  CHECK_THROWS_AS(dynamics::evolve(l, rho0, ok, opts), fock::DimensionError);
}

TEST_CASE("steady state of photon loss is vacuum") {
  FockSpace s(8);
  Liouvillian l{0.0 * fock::identity(fock::CompositeSpace::single(8)),
                {{1.3, fock::annihilation(s)}}};
  auto ss = dynamics::steady_state(l);
  REQUIRE(ss.basis.size() == 1);
  Matrix expected = Matrix::Zero(8, 8);
  expected(0, 0) = 1;
  CHECK((ss.state.matrix() - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ideal two-photon dissipation has a 4-dimensional steady subspace") {
  const double alpha = std::sqrt(2.0);
  const int dim = 25;
  Liouvillian l = ideal_two_photon(dim, 1.0, alpha * alpha);
  auto ss = dynamics::steady_state(l);
  REQUIRE(ss.basis.size() == 4);

  // Orthonormalized targets |sigma alpha><sigma' alpha| via QR in vec space.
  FockSpace s(dim);
  Eigen::VectorXcd cp = fock::coherent_state(s, alpha).amplitudes();
  Eigen::VectorXcd cm = fock::coherent_state(s, -alpha).amplitudes();
  Eigen::MatrixXcd targets(dim * dim, 4);
  int col = 0;
  for (const auto& u : {cp, cm})
    for (const auto& v : {cp, cm}) {
      Matrix t = u * v.adjoint();
      targets.col(col++) = Eigen::Map<Eigen::VectorXcd>(t.data(), dim * dim);
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(targets);
  Eigen::MatrixXcd tq = qr.householderQ() * Eigen::MatrixXcd::Identity(dim * dim, 4);

  Eigen::MatrixXcd basis(dim * dim, 4);
  for (int i = 0; i < 4; ++i)
    basis.col(i) = Eigen::Map<const Eigen::VectorXcd>(ss.basis[i].data(), dim * dim);
  for (int i = 0; i < 4; ++i) {
    const double fid = (basis.adjoint() * tq.col(i)).squaredNorm();
    CHECK(fid >= 0.999);
  }

  // The representative state should have <n> = alpha^2 up to truncation.
  double n_mean = fock::expect(fock::number_operator(s), ss.state).real();
  CHECK(n_mean == doctest::Approx(alpha * alpha).epsilon(0.01));
}

TEST_CASE("pure two-photon dissipation confines into the 0/1 photon sector") {
  const int dim = 16;
  Liouvillian l = ideal_two_photon(dim, 1.0, 0.0);
  auto ss = dynamics::steady_state(l);
  REQUIRE(ss.basis.size() == 4);
  // Steady subspace = span{|0><0|, |1><1|, |0><1|, |1><0|}: every basis
  // element is supported on the first two Fock levels.
  for (const auto& b : ss.basis) {
    Matrix outside = b;
    outside.topLeftCorner(2, 2).setZero();
    CHECK(outside.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("steady-state generator residual is small relative to scale") {
  const double alpha_sq = 2.0;
  Liouvillian l = ideal_two_photon(20, 0.7, alpha_sq);
  auto ss = dynamics::steady_state(l);
  const double scale = l.magnitude_scale();
  CHECK(dynamics::apply_generator(l, ss.state.matrix()).cwiseAbs().maxCoeff() <=
        1e-8 * scale);
}

TEST_CASE("liouvillian spectra are contractive") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g(0, 1);
  const int dim = 5;
  Matrix hm(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) hm(i, j) = Complex(g(rng), g(rng));
  hm = 0.5 * (hm + hm.adjoint());
  Matrix lm(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) lm(i, j) = Complex(g(rng), g(rng));
  auto space = fock::CompositeSpace::single(dim);
  Liouvillian l{fock::Operator(space, hm),
                {{0.9, fock::Operator(space, lm)}, {0.4, fock::annihilation(FockSpace(dim))}}};
  auto es = linalg::eig(dynamics::superoperator(l));
  CHECK(es.values.real().maxCoeff() <= 1e-9);
}

TEST_CASE("slowest decay rate of Pauli channels and photon loss") {
  Liouvillian flip{0.0 * kZ, {{0.25, kX}}};
  auto mode = dynamics::slowest_decay_rate(flip, kZ);
  CHECK(mode.rate == doctest::Approx(2 * 0.25).epsilon(1e-10));

  FockSpace s(12);
  const double kappa1 = 0.8;
  Liouvillian loss{0.0 * fock::identity(fock::CompositeSpace::single(12)),
                   {{kappa1, fock::annihilation(s)}}};
  auto x_op = fock::annihilation(s) + fock::creation(s);
  auto mode2 = dynamics::slowest_decay_rate(loss, x_op);
  CHECK(mode2.rate == doctest::Approx(kappa1 / 2).epsilon(1e-9));
}

TEST_CASE("spectral gap agrees with a trajectory fit of Z(t)") {
  // Ideal stabilization plus dephasing: the decay of the coherent-state
  // population difference is slow but fittable at alpha^2 = 1.5.
  const double alpha = std::sqrt(1.5);
  const int dim = 12;
  const double kappa2 = 1.0, kappa_phi = 0.05;
  FockSpace s(dim);
  auto a = fock::annihilation(s);
  auto jump = a * a - Complex(alpha * alpha, 0) * fock::identity(a.space());
  Liouvillian l{0.0 * fock::identity(a.space()),
                {{kappa2, jump}, {kappa_phi, fock::number_operator(s)}}};

  // Z-like observable: population difference of Gram-orthogonalized |±alpha>.
  Eigen::VectorXcd cp = fock::coherent_state(s, alpha).amplitudes();
  Eigen::VectorXcd cm = fock::coherent_state(s, -alpha).amplitudes();
  Matrix z_like = cp * cp.adjoint() - cm * cm.adjoint();
  fock::Operator z_op(a.space(), z_like);

  auto mode = dynamics::slowest_decay_rate(l, z_op);

  fock::DensityMatrix rho0(fock::coherent_state(s, alpha));
  std::vector<double> grid;
  const double horizon = 1.2 / mode.rate;
  for (int i = 1; i <= 10; ++i) grid.push_back(horizon * i / 10.0);
  auto res = dynamics::evolve(l, rho0, grid);
  // Log-linear fit of the Z trace.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double z = fock::expect(z_op, res.states[i]).real();
    REQUIRE(z > 0);
    sx += grid[i];
    sy += std::log(z);
    sxx += grid[i] * grid[i];
    sxy += grid[i] * std::log(z);
  }
  const int n = static_cast<int>(grid.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(-slope == doctest::Approx(mode.rate).epsilon(0.02));
}

TEST_CASE("cycle decay rate of a static schedule matches the static gap") {
  Liouvillian flip{0.0 * kZ, {{0.12, kX}, {0.02, kY}}};
  auto static_mode = dynamics::slowest_decay_rate(flip, kZ);
  dynamics::Schedule cycle{{{0.4, flip}, {0.6, flip}}};
  auto cyc_mode = dynamics::cycle_decay_rate(cycle, kZ);
  CHECK(cyc_mode.rate == doctest::Approx(static_mode.rate).epsilon(1e-8));
}

TEST_CASE("slowest_decay_rate error paths") {
  FockSpace s(4);
  Liouvillian loss{0.0 * fock::identity(fock::CompositeSpace::single(4)),
                   {{1.0, fock::annihilation(s)}}};
  // The zero observable cannot overlap any eigenoperator.
  CHECK_THROWS_AS(
      dynamics::slowest_decay_rate(loss, fock::Operator(loss.space(), Matrix::Zero(4, 4))),
      dynamics::SpectralError);
}
