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

#include "catsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "catsim/linalg.hpp"

namespace catsim::dynamics {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix unvec(const Eigen::VectorXcd& v, int d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Eigen::VectorXcd vec(const Matrix& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

double hs_overlap(const Matrix& a, const Matrix& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs((a.adjoint() * b).trace()) / (na * nb);
}

}  // namespace

void Liouvillian::validate() const {
  hamiltonian.require_hermitian(1e-10 * std::max(1.0, hamiltonian.matrix().cwiseAbs().maxCoeff()));
  for (const auto& d : dissipators) {
    if (d.rate < 0) throw fock::DimensionError("Dissipator rate must be >= 0");
    if (d.jump.space() != space())
      throw fock::DimensionError("Dissipator jump operator lives on a different space");
  }
}

double Liouvillian::magnitude_scale() const {
  double scale = hamiltonian.matrix().cwiseAbs().maxCoeff();
  for (const auto& d : dissipators) {
    const double l = d.jump.matrix().cwiseAbs().maxCoeff();
    scale = std::max(scale, d.rate * l * l);
  }
  return scale;
}

double Schedule::total_duration() const {
  double t = 0;
  for (const auto& seg : segments) t += seg.duration;
  return t;
}

void Schedule::validate() const {
  if (segments.empty()) throw fock::DimensionError("Schedule has no segments");
  const auto& space = segments.front().liouvillian.space();
  for (const auto& seg : segments) {
    if (seg.duration <= 0) throw fock::DimensionError("Schedule segment duration must be > 0");
    if (seg.liouvillian.space() != space)
      throw fock::DimensionError("Schedule segments live on different spaces");
    seg.liouvillian.validate();
  }
}

Matrix apply_dissipator(const Dissipator& d, const Matrix& rho) {
  const Matrix& l = d.jump.matrix();
  if (l.rows() != rho.rows()) throw fock::DimensionError("apply_dissipator: dimension mismatch");
  const Matrix ldl = l.adjoint() * l;
  return d.rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
}

Matrix apply_dissipator(const Dissipator& d, const fock::DensityMatrix& rho) {
  if (d.jump.space() != rho.space())
    throw fock::DimensionError("apply_dissipator: spaces differ");
  return apply_dissipator(d, rho.matrix());
}

Matrix apply_generator(const Liouvillian& l, const Matrix& rho) {
  const Complex minus_i(0, -1);
  Matrix out = minus_i * (l.hamiltonian.matrix() * rho - rho * l.hamiltonian.matrix());
  for (const auto& d : l.dissipators) out += apply_dissipator(d, rho);
  return out;
}

Matrix superoperator(const Liouvillian& l) {
  const int d = l.space().total_dim();
  const Matrix id = Matrix::Identity(d, d);
  const Complex i(0, 1);
  const Matrix& h = l.hamiltonian.matrix();
  Matrix s = -i * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& dis : l.dissipators) {
    const Matrix& jump = dis.jump.matrix();
    const Matrix ldl = jump.adjoint() * jump;
    s += dis.rate * (kron(jump.conjugate(), jump) - 0.5 * kron(id, ldl) -
                     0.5 * kron(ldl.transpose(), id));
  }
  return s;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384,      0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct Stepper {
  const Liouvillian* l;
  double rel_tol, abs_tol;
  long steps = 0;
  long max_steps;

  Matrix k[7];

  // One accepted adaptive step from (t, rho); updates rho and t in place and
  // returns the step size actually used; h is updated to the proposal.
  void integrate_to(Matrix& rho, double t0, double t1, double& h) {
    double t = t0;
    bool have_k0 = false;
    while (t < t1) {
      if (!have_k0) {
        k[0] = apply_generator(*l, rho);
        have_k0 = true;
      }
      bool clipped = false;
      double h_try = h;
      if (t + h_try >= t1) {
        h_try = t1 - t;
        clipped = true;
      }
      if (h_try <= std::abs(t) * 1e-14 + 1e-300)
        throw StiffnessError("evolve: step size underflow (stiff problem?)");

      for (int s = 1; s < 7; ++s) {
        Matrix y = rho;
        for (int j = 0; j < s; ++j)
          if (kA[s][j] != 0.0) y += (h_try * kA[s][j]) * k[j];
        k[s] = apply_generator(*l, y);
      }
      Matrix y5 = rho;
      for (int s = 0; s < 7; ++s)
        if (kB5[s] != 0.0) y5 += (h_try * kB5[s]) * k[s];
      Matrix err = Matrix::Zero(rho.rows(), rho.cols());
      for (int s = 0; s < 7; ++s) {
        const double d = kB5[s] - kB4[s];
        if (d != 0.0) err += (h_try * d) * k[s];
      }
      double acc = 0.0;
      const auto* py = rho.data();
      const auto* py5 = y5.data();
      const auto* pe = err.data();
      for (Eigen::Index i = 0; i < rho.size(); ++i) {
        const double sc = abs_tol + rel_tol * std::max(std::abs(py[i]), std::abs(py5[i]));
        const double r = std::abs(pe[i]) / sc;
        acc += r * r;
      }
      const double err_norm = std::sqrt(acc / static_cast<double>(rho.size()));
      if (++steps > max_steps) throw IntegrationError("evolve: max step count exceeded");

      if (err_norm <= 1.0) {
        t += h_try;
        rho = std::move(y5);
        k[0] = k[6];  // FSAL
        const double grow = err_norm > 0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
        const double factor = std::clamp(grow, 0.2, 5.0);
        h = clipped ? std::max(h, h_try * factor) : h_try * factor;
      } else {
        const double factor = std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 1.0);
        h = h_try * factor;
        have_k0 = true;  // k[0] still valid at (t, rho)
      }
    }
  }
};

double initial_step(const Liouvillian& l, const Matrix& rho, double rel_tol, double abs_tol) {
  (void)rel_tol;
  (void)abs_tol;
  const Matrix f = apply_generator(l, rho);
  const double nf = f.norm();
  if (nf < 1e-300) return 1e-6;
  return 0.01 * std::max(rho.norm(), 1.0) / nf;
}

EvolutionResult evolve_segments(const std::vector<Schedule::Segment>& segments,
                                const fock::DensityMatrix& rho0,
                                std::span<const double> t_grid, const EvolveOptions& opts) {
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] <= t_grid[i - 1])
      throw fock::DimensionError("evolve: t_grid must be strictly ascending");
  if (!t_grid.empty() && t_grid.front() < 0)
    throw fock::DimensionError("evolve: t_grid must be non-negative");
  if (opts.rel_tol <= 0 || opts.abs_tol <= 0)
    throw fock::DimensionError("evolve: tolerances must be > 0");
  for (const auto& ob : opts.observables)
    if (ob.space() != rho0.space())
      throw fock::DimensionError("evolve: observable space mismatch");

  EvolutionResult res;
  res.observable_traces.resize(opts.observables.size());
  res.min_eigenvalue = 1.0;
  Matrix rho = rho0.matrix();

  auto record = [&](double t, const Matrix& m) {
    res.times.push_back(t);
    const double trace_drift = std::abs(m.trace() - 1.0);
    const double herm_drift = (m - m.adjoint()).cwiseAbs().maxCoeff();
    res.max_trace_drift = std::max(res.max_trace_drift, trace_drift);
    res.max_hermiticity_drift = std::max(res.max_hermiticity_drift, herm_drift);
    if (trace_drift > 100 * opts.rel_tol)
      throw IntegrationError("evolve: trace drift " + std::to_string(trace_drift) +
                             " exceeds 100*tol");
    if (herm_drift > 100 * opts.rel_tol)
      throw IntegrationError("evolve: hermiticity drift exceeds 100*tol");
    Matrix herm = 0.5 * (m + m.adjoint());
    if (opts.check_positivity) {
      linalg::HermEig es = linalg::heig(herm);
      res.min_eigenvalue = std::min(res.min_eigenvalue, es.values.minCoeff());
      if (es.values.minCoeff() < -1e-6)
        throw IntegrationError("evolve: output state has eigenvalue below -1e-6");
    }
    for (size_t i = 0; i < opts.observables.size(); ++i)
      res.observable_traces[i].push_back((opts.observables[i].matrix() * m).trace());
    if (opts.keep_states) {
      herm /= herm.trace().real();
      res.states.emplace_back(rho0.space(), std::move(herm));
    }
  };

  size_t next = 0;
  if (next < t_grid.size() && t_grid[next] == 0.0) {
    record(0.0, rho);
    ++next;
  }

  double seg_start = 0.0;
  for (const auto& seg : segments) {
    const double seg_end = seg_start + seg.duration;
    Stepper st{&seg.liouvillian, opts.rel_tol, opts.abs_tol, 0, opts.max_steps};
    double h = initial_step(seg.liouvillian, rho, opts.rel_tol, opts.abs_tol);
    double t = seg_start;
    while (next < t_grid.size() && t_grid[next] <= seg_end + seg_end * 1e-15) {
      const double target = std::min(t_grid[next], seg_end);
      st.integrate_to(rho, t, target, h);
      t = target;
      record(t_grid[next], rho);
      ++next;
    }
    if (t < seg_end) {
      st.integrate_to(rho, t, seg_end, h);
      t = seg_end;
    }
    res.steps += st.steps;
    seg_start = seg_end;
  }
  if (next < t_grid.size())
    throw fock::DimensionError("evolve: t_grid extends beyond the schedule duration");
  return res;
}

}  // namespace

EvolutionResult evolve(const Liouvillian& l, const fock::DensityMatrix& rho0,
                       std::span<const double> t_grid, const EvolveOptions& opts) {
  l.validate();
  if (l.space() != rho0.space()) throw fock::DimensionError("evolve: state space mismatch");
  const double horizon = t_grid.empty() ? 0.0 : t_grid.back();
  std::vector<Schedule::Segment> segs;
  if (horizon > 0) segs.push_back({horizon, l});
  return evolve_segments(segs, rho0, t_grid, opts);
}

EvolutionResult evolve(const Schedule& s, const fock::DensityMatrix& rho0,
                       std::span<const double> t_grid, const EvolveOptions& opts) {
  s.validate();
  if (s.segments.front().liouvillian.space() != rho0.space())
    throw fock::DimensionError("evolve: state space mismatch");
  return evolve_segments(s.segments, rho0, t_grid, opts);
}

namespace {

// Tie-break ordering and hermitization of the steady-subspace basis, shared
// by the dense and Arnoldi paths.
SteadyStateResult finish_steady_state(const Liouvillian& l, const fock::CompositeSpace& space,
                                      Eigen::MatrixXcd null_basis) {
  const int d = space.total_dim();
  if (null_basis.cols() == 0)
    throw SpectralError("steady_state: no null vector within tolerance (non-convergent generator)");

  std::vector<Matrix> basis;
  std::vector<double> residuals;
  for (int i = 0; i < null_basis.cols(); ++i) {
    Matrix m = unvec(null_basis.col(i), d);
    basis.push_back(m);
    residuals.push_back(apply_generator(l, m).cwiseAbs().maxCoeff());
  }

  // Representative density matrix: project the maximally mixed state onto the
  // steady subspace, then hermitize and normalize.
  Eigen::VectorXcd id_vec = vec(Matrix::Identity(d, d) / static_cast<double>(d));
  Eigen::VectorXcd proj = Eigen::VectorXcd::Zero(d * d);
  for (int i = 0; i < null_basis.cols(); ++i)
    proj += null_basis.col(i) * (null_basis.col(i).adjoint() * id_vec);
  Matrix rho = unvec(proj, d);
  rho = 0.5 * (rho + rho.adjoint());
  const double tr = rho.trace().real();
  if (std::abs(tr) < 1e-12)
    throw SpectralError("steady_state: null space carries no trace-full element");
  rho /= tr;
  // Clip tiny negative eigenvalues from rounding so the result is a state.
  linalg::HermEig es = linalg::heig(rho);
  Eigen::VectorXd vals = es.values.cwiseMax(0.0);
  rho = es.vectors * vals.asDiagonal() * es.vectors.adjoint();
  rho /= rho.trace().real();
  return SteadyStateResult{fock::DensityMatrix(space, rho), std::move(basis),
                           std::move(residuals)};
}

}  // namespace

SteadyStateResult steady_state(const Liouvillian& l, const SteadyStateOptions& opts) {
  l.validate();
  const int d = l.space().total_dim();
  const int n = d * d;
  if (n <= 1600) {
    Matrix s = superoperator(l);
    Eigen::MatrixXcd basis = linalg::null_space(s, opts.rel_tol);
    return finish_steady_state(l, l.space(), std::move(basis));
  }
  // Large problem: Arnoldi around zero on the dense superoperator.
  const double scale = std::max(l.magnitude_scale(), 1e-300);
  Matrix s = superoperator(l) / scale;
  linalg::RitzPairs pairs =
      linalg::eigs_near_zero(s, opts.max_null_dim + 4, Complex(1e-8, 0),
                             std::max(40, 6 * opts.max_null_dim));
  std::vector<int> null_idx;
  for (int i = 0; i < pairs.values.size(); ++i)
    if (std::abs(pairs.values(i)) < 1e-10 && pairs.residuals(i) < 1e-8) null_idx.push_back(i);
  Eigen::MatrixXcd basis(n, null_idx.size());
  for (size_t i = 0; i < null_idx.size(); ++i) basis.col(i) = pairs.vectors.col(null_idx[i]);
  // Orthonormalize (Ritz vectors are not exactly orthogonal).
  if (basis.cols() > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(basis);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, basis.cols());
    basis = q;
  }
  return finish_steady_state(l, l.space(), std::move(basis));
}

namespace {

struct ModeCluster {
  Complex value;
  std::vector<int> members;
};

// Groups (numerically) degenerate eigenvalues so the overlap filter can pick
// the best eigenoperator inside each degenerate subspace.
std::vector<ModeCluster> cluster_eigenvalues(const Eigen::VectorXcd& values, double tol) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(values(a)) < std::abs(values(b)); });
  std::vector<ModeCluster> clusters;
  for (int idx : order) {
    bool placed = false;
    for (auto& c : clusters) {
      if (std::abs(values(idx) - c.value) <= tol) {
        c.members.push_back(idx);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({values(idx), {idx}});
  }
  return clusters;
}

// The observable's participation in an eigenvalue cluster is measured with
// the spectral (oblique) projector onto the cluster: for matched right
// vectors V and left vectors W, the observable-side projector is
// P^H = W (V^H W)^+ V^H. This is basis-independent inside degenerate
// clusters and does not dilute when the slow eigenoperator has large
// Hilbert-Schmidt norm (e.g. phase-space basin indicators).
DecayMode best_mode(const Eigen::VectorXcd& values, const Eigen::MatrixXcd& right,
                    const Eigen::MatrixXcd& left, const fock::Operator& observable,
                    double cluster_tol, const std::function<double(Complex)>& rate_of) {
  const int d = observable.dim();
  const Eigen::VectorXcd obs_vec = vec(observable.matrix());
  const double obs_norm = obs_vec.norm();
  if (obs_norm < 1e-14)
    throw SpectralError("no eigenoperator passes the symmetry-observable overlap filter");
  std::vector<ModeCluster> clusters = cluster_eigenvalues(values, cluster_tol);

  std::optional<DecayMode> best;
  for (const auto& c : clusters) {
    const int m = static_cast<int>(c.members.size());
    Eigen::MatrixXcd v(d * d, m), w(d * d, m);
    for (int i = 0; i < m; ++i) {
      v.col(i) = right.col(c.members[i]).normalized();
      w.col(i) = left.col(c.members[i]).normalized();
    }
    Eigen::MatrixXcd gram = v.adjoint() * w;
    Eigen::VectorXcd coef =
        gram.completeOrthogonalDecomposition().solve(Eigen::VectorXcd(v.adjoint() * obs_vec));
    Eigen::VectorXcd comp = w * coef;
    const double fraction = comp.norm() / obs_norm;
    if (fraction < 0.5) continue;
    const double rate = rate_of(c.value);
    if (!best || rate < best->rate) {
      DecayMode mcand;
      mcand.rate = rate;
      mcand.eigenvalue = c.value;
      mcand.eigenoperator = unvec(comp, d) / comp.norm();
      mcand.overlap = fraction;
      best = std::move(mcand);
    }
  }
  if (!best)
    throw SpectralError("no eigenoperator passes the symmetry-observable overlap filter");
  return *best;
}

}  // namespace

DecayMode slowest_decay_rate(const Liouvillian& l, const fock::Operator& observable) {
  l.validate();
  if (observable.space() != l.space())
    throw fock::DimensionError("slowest_decay_rate: observable space mismatch");
  const double scale = std::max(l.magnitude_scale(), 1e-300);
  const int n = l.space().total_dim() * l.space().total_dim();

  Eigen::VectorXcd values;
  Eigen::MatrixXcd right, left;
  if (n <= 2500) {
    Matrix s = superoperator(l) / scale;
    linalg::EigPairs es = linalg::eig_pairs(s);
    values = es.values;
    right = es.right;
    left = es.left;
  } else {
    Matrix s = superoperator(l) / scale;
    linalg::RitzPairsTwoSided pairs =
        linalg::eigs_near_zero_two_sided(s, 16, Complex(1e-8, 0), 80);
    values = pairs.values;
    right = pairs.right;
    left = pairs.left;
  }
  DecayMode m = best_mode(values, right, left, observable, 1e-12,
                          [](Complex v) { return std::abs(v.real()); });
  m.rate *= scale;
  m.eigenvalue *= scale;
  return m;
}

DecayMode cycle_decay_rate(const Schedule& cycle, const fock::Operator& observable) {
  cycle.validate();
  if (observable.space() != cycle.segments.front().liouvillian.space())
    throw fock::DimensionError("cycle_decay_rate: observable space mismatch");
  const double t_cycle = cycle.total_duration();
  const int d = observable.dim();
  Matrix map = Matrix::Identity(d * d, d * d);
  for (const auto& seg : cycle.segments)
    map = linalg::expm(Matrix(superoperator(seg.liouvillian) * seg.duration)) * map;
  linalg::EigPairs es = linalg::eig_pairs(map);
  DecayMode m = best_mode(es.values, es.right, es.left, observable, 1e-12, [&](Complex v) {
    const double mag = std::abs(v);
    if (mag <= 0) return std::numeric_limits<double>::infinity();
    return -std::log(mag) / t_cycle;
  });
  return m;
}

}  // namespace catsim::dynamics
