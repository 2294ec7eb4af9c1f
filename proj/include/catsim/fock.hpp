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

#ifndef CATSIM_FOCK_HPP
#define CATSIM_FOCK_HPP

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace catsim::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Guard violation for displacements/coherent amplitudes too large for the
// truncated space (|beta|^2 > dim/4).
class TruncationError : public std::runtime_error {
 public:
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// A single truncated bosonic mode with Fock states |0>, ..., |dim-1>.
struct FockSpace {
  int dim;
  explicit FockSpace(int d) : dim(d) {
    if (d < 2) throw DimensionError("FockSpace dim must be >= 2, got " + std::to_string(d));
  }
};

// Ordered tensor product of Fock spaces. Factor order is fixed at
// construction; all index arithmetic uses that order (first factor is the
// slowest index, Kronecker convention).
class CompositeSpace {
 public:
  CompositeSpace() = default;
  explicit CompositeSpace(std::vector<int> dims);
  static CompositeSpace single(int dim) { return CompositeSpace({dim}); }

  int factor_count() const { return static_cast<int>(dims_.size()); }
  int dim(int which) const;
  int total_dim() const { return total_dim_; }
  const std::vector<int>& dims() const { return dims_; }

  bool operator==(const CompositeSpace& other) const { return dims_ == other.dims_; }
  bool operator!=(const CompositeSpace& other) const { return !(*this == other); }

 private:
  std::vector<int> dims_;
  int total_dim_ = 0;
};

// Dense operator on a composite space. Values are immutable by convention:
// all free functions return fresh operators.
class Operator {
 public:
  Operator(CompositeSpace space, Matrix m);

  const CompositeSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  bool is_hermitian(double tol = 1e-12) const;
  // Throws if the matrix is not hermitian to tol.
  void require_hermitian(double tol = 1e-12) const;

  Operator dagger() const { return Operator(space_, m_.adjoint()); }

  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(Complex s, const Operator& a);
  friend Operator operator*(double s, const Operator& a);

 private:
  CompositeSpace space_;
  Matrix m_;
};

class Ket {
 public:
  Ket(CompositeSpace space, Vector amplitudes);

  const CompositeSpace& space() const { return space_; }
  const Vector& amplitudes() const { return v_; }

 private:
  CompositeSpace space_;
  Vector v_;
};

class DensityMatrix {
 public:
  DensityMatrix(CompositeSpace space, Matrix rho);
  explicit DensityMatrix(const Ket& psi);

  const CompositeSpace& space() const { return space_; }
  const Matrix& matrix() const { return rho_; }

 private:
  CompositeSpace space_;
  Matrix rho_;
};

Operator identity(const CompositeSpace& space);
Operator annihilation(const FockSpace& space);
Operator creation(const FockSpace& space);
Operator number_operator(const FockSpace& space);
Operator parity_operator(const FockSpace& space);

// exp(beta a^dag - beta* a), built by eigendecomposition of the hermitian
// generator so the result is unitary up to rounding. Enforces the
// |beta|^2 <= dim/4 truncation guard.
Operator displacement(const FockSpace& space, Complex beta);

// Fock basis state |n>.
Ket fock_state(const FockSpace& space, int n);
// Truncated coherent state, renormalized. Guarded like displacement.
Ket coherent_state(const FockSpace& space, Complex beta);
// (|+alpha> + parity |-alpha>) / sqrt(2(1 + parity exp(-2|alpha|^2))),
// parity = +1 or -1.
Ket cat_state(const FockSpace& space, Complex alpha, int parity);

// W(beta) = (2/pi) Tr[D(beta) P D(beta)^dag rho] per grid point.
std::vector<double> wigner(const DensityMatrix& rho, std::span<const Complex> grid);

Operator tensor(std::span<const Operator> ops);
Operator tensor(const Operator& a, const Operator& b);
Ket tensor(std::span<const Ket> kets);
Ket tensor(const Ket& a, const Ket& b);

// Lifts a single-factor operator to `space`, acting on factor `which`.
Operator embed(const Operator& op, const CompositeSpace& space, int which);

// Traces out all factors except `keep`, preserving factor order.
Matrix partial_trace(const Matrix& rho, const CompositeSpace& space, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

Complex expect(const Operator& op, const Ket& psi);
Complex expect(const Operator& op, const DensityMatrix& rho);

}  // namespace catsim::fock

#endif  // CATSIM_FOCK_HPP
