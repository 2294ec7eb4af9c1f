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

#ifndef CATSIM_DYNAMICS_HPP
#define CATSIM_DYNAMICS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catsim/fock.hpp"

namespace catsim::dynamics {

using fock::Complex;
using fock::Matrix;

class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

class StiffnessError : public IntegrationError {
 public:
  explicit StiffnessError(const std::string& what) : IntegrationError(what) {}
};

class SpectralError : public std::runtime_error {
 public:
  explicit SpectralError(const std::string& what) : std::runtime_error(what) {}
};

struct Dissipator {
  double rate;  // >= 0, units 1/time
  fock::Operator jump;
};

// Hamiltonian in angular-frequency units plus Lindblad dissipators, all on
// one shared composite space.
struct Liouvillian {
  fock::Operator hamiltonian;
  std::vector<Dissipator> dissipators;

  const fock::CompositeSpace& space() const { return hamiltonian.space(); }
  // Checks hermiticity (1e-10), shared spaces, and non-negative rates.
  void validate() const;
  // max(|H|_max, max_k rate_k * |L_k|_max^2): the magnitude scale used for
  // relative spectral tolerances.
  double magnitude_scale() const;
};

struct Schedule {
  struct Segment {
    double duration;  // > 0
    Liouvillian liouvillian;
  };
  std::vector<Segment> segments;

  double total_duration() const;
  void validate() const;
};

struct EvolveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  bool keep_states = true;
  bool check_positivity = true;
  long max_steps = 200'000'000;
  // Observables recorded at every grid time (works with keep_states = false).
  std::vector<fock::Operator> observables;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<fock::DensityMatrix> states;               // empty if !keep_states
  std::vector<std::vector<Complex>> observable_traces;   // one vector per observable
  long steps = 0;
  double max_trace_drift = 0.0;
  double max_hermiticity_drift = 0.0;
  double min_eigenvalue = 0.0;
};

// rate * (L rho L^dag - {L^dag L, rho}/2). The result is traceless and not a
// density matrix, hence plain matrices.
Matrix apply_dissipator(const Dissipator& d, const fock::DensityMatrix& rho);
Matrix apply_dissipator(const Dissipator& d, const Matrix& rho);

// Full generator: -i[H, rho] + sum_k D_k(rho).
Matrix apply_generator(const Liouvillian& l, const Matrix& rho);

// Dense superoperator on column-major vec(rho), dimension d^2 x d^2.
Matrix superoperator(const Liouvillian& l);

// Adaptive Dormand-Prince 5(4) integration of the master equation. States
// are reported exactly at the (ascending) grid times; t = 0 is the initial
// state. Throws StiffnessError on step underflow and IntegrationError when
// trace drift exceeds 100 * rel_tol.
EvolutionResult evolve(const Liouvillian& l, const fock::DensityMatrix& rho0,
                       std::span<const double> t_grid, const EvolveOptions& opts = {});

// Segment-by-segment integration with exact state handoff. Grid times are
// absolute; they must not exceed the schedule duration.
EvolutionResult evolve(const Schedule& s, const fock::DensityMatrix& rho0,
                       std::span<const double> t_grid, const EvolveOptions& opts = {});

struct SteadyStateResult {
  fock::DensityMatrix state;          // hermitized, trace-normalized null element
  std::vector<Matrix> basis;          // orthonormal basis of the steady subspace
  std::vector<double> residuals;      // |generator(basis_i)|_max per element
};

struct SteadyStateOptions {
  double rel_tol = 1e-10;   // null-space cutoff relative to the largest singular value
  int max_null_dim = 8;     // upper bound used by the large-dimension solver
};

// Null space of the vectorized generator. Dense SVD for small problems and
// shift-inverted Arnoldi for large ones.
SteadyStateResult steady_state(const Liouvillian& l, const SteadyStateOptions& opts = {});

struct DecayMode {
  double rate = 0.0;        // |Re lambda| (or -ln|lambda|/T for cycle maps)
  Complex eigenvalue;
  Matrix eigenoperator;
  double overlap = 0.0;     // normalized Hilbert-Schmidt overlap with the observable
};

// Smallest |Re lambda| among Liouvillian eigenmodes whose eigenoperator has
// normalized overlap >= 0.5 with `observable`. Degenerate eigenvalue clusters
// are rotated to maximize the overlap before filtering, so the result does
// not depend on the eigensolver's basis choice inside a degenerate subspace.
DecayMode slowest_decay_rate(const Liouvillian& l, const fock::Operator& observable);

// Analogue for one period of a piecewise-constant schedule: eigenvalues of
// the cycle propagator exp(S_n t_n) ... exp(S_1 t_1), converted to rates via
// -ln|lambda| / T_cycle.
DecayMode cycle_decay_rate(const Schedule& cycle, const fock::Operator& observable);

}  // namespace catsim::dynamics

#endif  // CATSIM_DYNAMICS_HPP
