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

#ifndef CATSIM_CATMODEL_HPP
#define CATSIM_CATMODEL_HPP

#include <complex>
#include <optional>
#include <span>

#include "catsim/dynamics.hpp"
#include "catsim/fock.hpp"

namespace catsim::catmodel {

using fock::Complex;

// Dispersively coupled lossy mode (e.g. a thermally excited tunable coupler)
// added to the full model as a bit-flip aggressor.
struct AggressorParams {
  double chi_sc = 0;      // angular frequency
  double kappa_c = 0;     // 1/time
  double kappa_c_up = 0;  // 1/time
  int coupler_levels = 2;
};

// All rates are angular frequencies / inverse seconds. Frequencies quoted as
// nu in scenario files are converted by 2*pi exactly once, at model build.
struct CatParams {
  double g2 = 0;         // three-wave-mixing strength (angular)
  double alpha_sq = 0;   // target mean photon number |alpha|^2
  double kappa_b = 0;    // buffer loss rate
  double kappa_1 = 0;    // storage single-photon loss
  double kappa_phi = 0;  // storage white-noise dephasing
  double K_s = 0;        // storage self-Kerr (angular)
  double chi_sb = 0;     // storage-buffer cross-Kerr (angular)
  std::optional<AggressorParams> aggressor;

  // chi_sb * alpha^2 / kappa_b: the adiabatic-elimination distortion scale.
  double distortion_parameter() const;
};

// kappa_1 = 1/T1;  1/T2 = kappa_1/2 + kappa_phi/2. `kappa_phi_factor`
// rescales the white-noise dephasing rate (1.0 by default; 0.5 reproduces the
// empirically reduced variant).
void set_rates_from_T1_T2(CatParams& p, double T1, double T2, double kappa_phi_factor = 1.0);

enum class ModelKind { FullTwoMode, EffectiveExact, EffectiveFirstOrder };

struct PulseSchedule {
  double t_cycle = 0;  // seconds
  double t_on = 0;     // 0 < t_on <= t_cycle
  int n_cycles = 1;
};

// kappa_2 = 4 g2^2 / kappa_b.
double kappa2_from_g2(double g2, double kappa_b);

// Kerr-reapportioned steady amplitude: alpha'^2 = alpha^2 / (1 + i K_s/kappa_2).
Complex kerr_reapportioned_alpha(double alpha_sq, double K_s, double kappa2);

// Full storage (x) buffer model:
//   H = g2 (a^2 - alpha^2) b^dag + h.c. + chi_sb n_a n_b + (K_s/2) a^dag2 a^2
// with dissipators kappa_b D[b], kappa_1 D[a], kappa_phi D[n_a]. The
// aggressor block appends chi_sc n_a n_c and kappa_c D[c], kappa_c_up D[c^dag]
// on a third factor with `coupler_levels` levels.
dynamics::Liouvillian build_full(const CatParams& p, int storage_dim, int buffer_dim);

// Storage-only model with the buffer adiabatically eliminated. FirstOrder
// uses the series-expanded distortion (1 - 2i chi_sb n/kappa_b); Exact keeps
// the diagonal resolvent 2i/(kappa_b + 2i chi_sb n).
dynamics::Liouvillian build_effective(const CatParams& p, int storage_dim, ModelKind kind);

// Stabilization for t_on, then free evolution (g2 = 0, buffer drive off,
// keeping kappa_1 / kappa_phi / K_s and, in the full model, the undriven
// lossy buffer) for t_cycle - t_on, repeated n_cycles times. Dynamics are in
// the rotating frame of the Stark-shifted modes, so the pulsed-phase tracking
// of the hardware is implicit in the frame convention.
dynamics::Schedule build_pulsed(const CatParams& p, int storage_dim, ModelKind kind,
                                const PulseSchedule& schedule, int buffer_dim = 3);

// Z-basis estimator from displaced parity readout:
//   Z ~ <P after D(-alpha)> - <P after D(+alpha)>,
// normalized so that Z = +1 on |+alpha><+alpha|. `space` is the composite
// space of the model; the storage mode must be factor 0.
fock::Operator bit_flip_observable(double alpha, const fock::CompositeSpace& space);

// Photon-number parity of the storage mode, embedded in `space`.
fock::Operator parity_observable(const fock::CompositeSpace& space);

struct TraceResult {
  std::vector<double> times;
  std::vector<double> values;
};

// Z(t) from rho0 = |+alpha><+alpha| (x) vacuum under the chosen model.
TraceResult run_bit_flip(const CatParams& p, ModelKind kind, std::span<const double> t_grid,
                         int storage_dim, int buffer_dim = 3,
                         const dynamics::EvolveOptions& opts = {});

// Parity trace from an initial cat state of the given parity (+1 or -1).
TraceResult run_phase_flip(const CatParams& p, ModelKind kind, std::span<const double> t_grid,
                           int storage_dim, int parity = +1, int buffer_dim = 3,
                           const dynamics::EvolveOptions& opts = {});

// Liouvillian-gap bit-flip rate (gamma_X = |Re lambda_Z| / 2, i.e. the
// inverse bit-flip time 1/T_bitflip = gamma_X).
double bit_flip_rate_gap(const CatParams& p, ModelKind kind, int storage_dim,
                         int buffer_dim = 3);

// Same for one pulsed-stabilization cycle via the cycle propagator.
double pulsed_bit_flip_rate(const CatParams& p, ModelKind kind, const PulseSchedule& schedule,
                            int storage_dim, int buffer_dim = 3);

}  // namespace catsim::catmodel

#endif  // CATSIM_CATMODEL_HPP
