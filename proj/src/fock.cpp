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

#include "catsim/fock.hpp"

#include <cmath>
#include <map>

#include "catsim/linalg.hpp"

namespace catsim::fock {

namespace {

void check_guard(int dim, Complex beta, const char* what) {
  const double n = std::norm(beta);
  if (n > dim / 4.0) {
    throw TruncationError(std::string(what) + ": |beta|^2 = " + std::to_string(n) +
                          " exceeds dim/4 = " + std::to_string(dim / 4.0));
  }
}

void check_same_space(const CompositeSpace& a, const CompositeSpace& b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": operands live on different spaces");
}

}  // namespace

CompositeSpace::CompositeSpace(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("CompositeSpace needs at least one factor");
  total_dim_ = 1;
  for (int d : dims_) {
    if (d < 2) throw DimensionError("CompositeSpace factor dim must be >= 2");
    total_dim_ *= d;
  }
}

int CompositeSpace::dim(int which) const {
  if (which < 0 || which >= factor_count())
    throw DimensionError("CompositeSpace factor index out of range");
  return dims_[which];
}

Operator::Operator(CompositeSpace space, Matrix m) : space_(std::move(space)), m_(std::move(m)) {
  if (m_.rows() != space_.total_dim() || m_.cols() != space_.total_dim())
    throw DimensionError("Operator matrix shape does not match its space");
}

bool Operator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void Operator::require_hermitian(double tol) const {
  if (!is_hermitian(tol)) throw DimensionError("operator is not hermitian to tolerance");
}

Operator operator+(const Operator& a, const Operator& b) {
  check_same_space(a.space_, b.space_, "operator+");
  return Operator(a.space_, a.m_ + b.m_);
}

Operator operator-(const Operator& a, const Operator& b) {
  check_same_space(a.space_, b.space_, "operator-");
  return Operator(a.space_, a.m_ - b.m_);
}

Operator operator*(const Operator& a, const Operator& b) {
  check_same_space(a.space_, b.space_, "operator*");
  return Operator(a.space_, a.m_ * b.m_);
}

Operator operator*(Complex s, const Operator& a) { return Operator(a.space_, s * a.m_); }
Operator operator*(double s, const Operator& a) { return Operator(a.space_, s * a.m_); }

Ket::Ket(CompositeSpace space, Vector amplitudes)
    : space_(std::move(space)), v_(std::move(amplitudes)) {
  if (v_.size() != space_.total_dim()) throw DimensionError("Ket length does not match space");
  if (std::abs(v_.norm() - 1.0) > 1e-10) throw DimensionError("Ket is not normalized to 1e-10");
}

DensityMatrix::DensityMatrix(CompositeSpace space, Matrix rho)
    : space_(std::move(space)), rho_(std::move(rho)) {
  if (rho_.rows() != space_.total_dim() || rho_.cols() != space_.total_dim())
    throw DimensionError("DensityMatrix shape does not match space");
  if (std::abs(rho_.trace() - 1.0) > 1e-10)
    throw DimensionError("DensityMatrix trace deviates from 1 beyond 1e-10");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw DimensionError("DensityMatrix is not hermitian to 1e-10");
}

DensityMatrix::DensityMatrix(const Ket& psi)
    : space_(psi.space()), rho_(psi.amplitudes() * psi.amplitudes().adjoint()) {}

Operator identity(const CompositeSpace& space) {
  return Operator(space, Matrix::Identity(space.total_dim(), space.total_dim()));
}

Operator annihilation(const FockSpace& space) {
  Matrix m = Matrix::Zero(space.dim, space.dim);
  for (int n = 1; n < space.dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(CompositeSpace::single(space.dim), std::move(m));
}

Operator creation(const FockSpace& space) { return annihilation(space).dagger(); }

Operator number_operator(const FockSpace& space) {
  Matrix m = Matrix::Zero(space.dim, space.dim);
  for (int n = 0; n < space.dim; ++n) m(n, n) = n;
  return Operator(CompositeSpace::single(space.dim), std::move(m));
}

Operator parity_operator(const FockSpace& space) {
  Matrix m = Matrix::Zero(space.dim, space.dim);
  for (int n = 0; n < space.dim; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return Operator(CompositeSpace::single(space.dim), std::move(m));
}

Operator displacement(const FockSpace& space, Complex beta) {
  check_guard(space.dim, beta, "displacement");
  // D = exp(i H) with H = -i(beta a^dag - beta* a) hermitian.
  const Matrix a = annihilation(space).matrix();
  const Matrix gen = beta * a.adjoint() - std::conj(beta) * a;
  const Matrix h = Complex(0, -1) * gen;
  linalg::HermEig es = linalg::heig(h);
  Vector phases(space.dim);
  for (int i = 0; i < space.dim; ++i)
    phases(i) = std::exp(Complex(0, 1) * Complex(es.values(i), 0));
  Matrix d = es.vectors * phases.asDiagonal() * es.vectors.adjoint();
  return Operator(CompositeSpace::single(space.dim), std::move(d));
}

Ket fock_state(const FockSpace& space, int n) {
  if (n < 0 || n >= space.dim) throw DimensionError("fock_state index out of range");
  Vector v = Vector::Zero(space.dim);
  v(n) = 1.0;
  return Ket(CompositeSpace::single(space.dim), std::move(v));
}

Ket coherent_state(const FockSpace& space, Complex beta) {
  check_guard(space.dim, beta, "coherent_state");
  Vector v(space.dim);
  // <n|beta> = exp(-|beta|^2/2) beta^n / sqrt(n!), built by recurrence.
  Complex c = std::exp(-0.5 * std::norm(beta));
  v(0) = c;
  for (int n = 1; n < space.dim; ++n) {
    c *= beta / std::sqrt(static_cast<double>(n));
    v(n) = c;
  }
  v.normalize();  // renormalize after truncation
  return Ket(CompositeSpace::single(space.dim), std::move(v));
}

Ket cat_state(const FockSpace& space, Complex alpha, int parity) {
  if (parity != 1 && parity != -1) throw DimensionError("cat_state parity must be +1 or -1");
  check_guard(space.dim, alpha, "cat_state");
  const Vector plus = coherent_state(space, alpha).amplitudes();
  const Vector minus = coherent_state(space, -alpha).amplitudes();
  Vector v = plus + static_cast<double>(parity) * minus;
  v.normalize();
  return Ket(CompositeSpace::single(space.dim), std::move(v));
}

std::vector<double> wigner(const DensityMatrix& rho, std::span<const Complex> grid) {
  if (rho.space().factor_count() != 1)
    throw DimensionError("wigner expects a single-mode density matrix");
  const int dim = rho.space().total_dim();
  for (const Complex& b : grid) check_guard(dim, b, "wigner");

  // rho = sum_k p_k |psi_k><psi_k|; W = (2/pi) sum_k p_k sum_n (-1)^n |<n|D(b)^dag psi_k>|^2.
  linalg::HermEig es = linalg::heig(rho.matrix());
  std::vector<int> kept;
  for (int k = 0; k < dim; ++k)
    if (es.values(k) > 1e-14) kept.push_back(k);

  // D(b) = R(theta) D(|b|) R(theta)^dag with R = diag(exp(i n theta)), so one
  // eigendecomposition per distinct radius serves the whole grid.
  const FockSpace fs(dim);
  std::map<long long, Matrix> radial_cache;
  auto displacement_for = [&](Complex b) -> Matrix {
    const double r = std::abs(b);
    const long long key = static_cast<long long>(std::llround(r * 1e12));
    auto it = radial_cache.find(key);
    if (it == radial_cache.end())
      it = radial_cache.emplace(key, displacement(fs, Complex(r, 0)).matrix()).first;
    if (r == 0.0) return it->second;
    const double theta = std::arg(b);
    Vector ph(dim);
    for (int n = 0; n < dim; ++n) ph(n) = std::exp(Complex(0, 1) * (theta * n));
    return ph.asDiagonal() * it->second * ph.conjugate().asDiagonal();
  };

  std::vector<double> w(grid.size(), 0.0);
  for (size_t g = 0; g < grid.size(); ++g) {
    const Matrix d = displacement_for(grid[g]);
    double acc = 0.0;
    for (int k : kept) {
      const Vector shifted = d.adjoint() * es.vectors.col(k);
      double s = 0.0;
      for (int n = 0; n < dim; ++n) {
        const double p = std::norm(shifted(n));
        s += (n % 2 == 0) ? p : -p;
      }
      acc += es.values(k) * s;
    }
    w[g] = acc * 2.0 / M_PI;
  }
  return w;
}

Operator tensor(const Operator& a, const Operator& b) {
  std::vector<int> dims = a.space().dims();
  for (int d : b.space().dims()) dims.push_back(d);
  const int ra = a.dim(), rb = b.dim();
  Matrix m(ra * rb, ra * rb);
  for (int i = 0; i < ra; ++i)
    for (int j = 0; j < ra; ++j)
      m.block(i * rb, j * rb, rb, rb) = a.matrix()(i, j) * b.matrix();
  return Operator(CompositeSpace(std::move(dims)), std::move(m));
}

Operator tensor(std::span<const Operator> ops) {
  if (ops.empty()) throw DimensionError("tensor of zero operators");
  Operator out = ops[0];
  for (size_t i = 1; i < ops.size(); ++i) out = tensor(out, ops[i]);
  return out;
}

Ket tensor(const Ket& a, const Ket& b) {
  std::vector<int> dims = a.space().dims();
  for (int d : b.space().dims()) dims.push_back(d);
  const int ra = static_cast<int>(a.amplitudes().size());
  const int rb = static_cast<int>(b.amplitudes().size());
  Vector v(ra * rb);
  for (int i = 0; i < ra; ++i) v.segment(i * rb, rb) = a.amplitudes()(i) * b.amplitudes();
  return Ket(CompositeSpace(std::move(dims)), std::move(v));
}

Ket tensor(std::span<const Ket> kets) {
  if (kets.empty()) throw DimensionError("tensor of zero kets");
  Ket out = kets[0];
  for (size_t i = 1; i < kets.size(); ++i) out = tensor(out, kets[i]);
  return out;
}

Operator embed(const Operator& op, const CompositeSpace& space, int which) {
  if (op.space().factor_count() != 1)
    throw DimensionError("embed expects a single-factor operator");
  if (which < 0 || which >= space.factor_count())
    throw DimensionError("embed factor index out of range");
  if (op.dim() != space.dim(which))
    throw DimensionError("embed operator dim does not match target factor");
  int left = 1, right = 1;
  for (int i = 0; i < which; ++i) left *= space.dim(i);
  for (int i = which + 1; i < space.factor_count(); ++i) right *= space.dim(i);
  const int d = op.dim();
  Matrix m = Matrix::Zero(space.total_dim(), space.total_dim());
  for (int l = 0; l < left; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const Complex val = op.matrix()(i, j);
        if (val == Complex(0, 0)) continue;
        const int row0 = (l * d + i) * right;
        const int col0 = (l * d + j) * right;
        for (int r = 0; r < right; ++r) m(row0 + r, col0 + r) = val;
      }
  return Operator(space, std::move(m));
}

Matrix partial_trace(const Matrix& rho, const CompositeSpace& space, std::span<const int> keep) {
  if (rho.rows() != space.total_dim() || rho.cols() != space.total_dim())
    throw DimensionError("partial_trace: matrix does not match space");
  const int nf = space.factor_count();
  std::vector<bool> kept(nf, false);
  for (int k : keep) {
    if (k < 0 || k >= nf) throw DimensionError("partial_trace: factor index out of range");
    kept[k] = true;
  }
  int kept_dim = 1;
  for (int f = 0; f < nf; ++f)
    if (kept[f]) kept_dim *= space.dim(f);

  // Strides for mixed-radix index decomposition (factor 0 slowest).
  std::vector<int> stride(nf, 1);
  for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * space.dim(f + 1);

  auto kept_index = [&](int full) {
    int idx = 0;
    for (int f = 0; f < nf; ++f) {
      const int digit = (full / stride[f]) % space.dim(f);
      if (kept[f]) idx = idx * space.dim(f) + digit;
    }
    return idx;
  };
  auto traced_index = [&](int full) {
    int idx = 0;
    for (int f = 0; f < nf; ++f) {
      const int digit = (full / stride[f]) % space.dim(f);
      if (!kept[f]) idx = idx * space.dim(f) + digit;
    }
    return idx;
  };

  Matrix out = Matrix::Zero(kept_dim, kept_dim);
  const int total = space.total_dim();
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) {
      if (traced_index(i) != traced_index(j)) continue;
      out(kept_index(i), kept_index(j)) += rho(i, j);
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  Matrix m = partial_trace(rho.matrix(), rho.space(), keep);
  std::vector<int> dims;
  for (int k : keep) dims.push_back(rho.space().dim(k));
  return DensityMatrix(CompositeSpace(std::move(dims)), std::move(m));
}

Complex expect(const Operator& op, const Ket& psi) {
  check_same_space(op.space(), psi.space(), "expect");
  return psi.amplitudes().adjoint() * op.matrix() * psi.amplitudes();
}

Complex expect(const Operator& op, const DensityMatrix& rho) {
  check_same_space(op.space(), rho.space(), "expect");
  return (op.matrix() * rho.matrix()).trace();
}

}  // namespace catsim::fock
