#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>

#include "dmme/errors.hpp"

// Two-qubit operator algebra.  Basis ordering throughout the library:
// index 0 = |00>, 1 = |01>, 2 = |10>, 3 = |11>, with sigma_z|0> = +|0>.
// Units: hbar = k_B = 1.

namespace dmme {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;
using Mat16 = Eigen::Matrix<cplx, 16, 16>;
using Vec16 = Eigen::Matrix<cplx, 16, 1>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cplx iu{0.0, 1.0};

inline Mat2 pauli2(char axis) {
  Mat2 m = Mat2::Zero();
  switch (axis) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, -iu, iu, 0; break;
    case 'z': m << 1, 0, 0, -1; break;
    case 'i': m = Mat2::Identity(); break;
    default: throw validation_error("pauli axis must be one of x,y,z,i");
  }
  return m;
}

inline Mat4 kron2(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

// Single-qubit Pauli embedded in the pair space; qubit is 1 or 2.
inline Mat4 pauli(char axis, int qubit) {
  if (qubit == 1) return kron2(pauli2(axis), Mat2::Identity());
  if (qubit == 2) return kron2(Mat2::Identity(), pauli2(axis));
  throw validation_error("qubit index must be 1 or 2");
}

// System Hamiltonian: exchange J*pi*sx(x)sx plus a common longitudinal
// drive f on both qubits.
inline Mat4 hamiltonian(double f, double J) {
  return J * pi * pauli('x', 1) * pauli('x', 2) +
         f * (pauli('z', 1) + pauli('z', 2));
}

// Collective transverse coupling to the reservoir.
inline Mat4 bath_coupling() { return pauli('x', 1) + pauli('x', 2); }

// Six mutually commuting-sector generators: the first triple acts on
// span{|00>,|11>}, the second on span{|01>,|10>}; each triple satisfies
// [G_a, G_b] = 2i eps_abc G_c and generators across triples commute.
enum sector_generator_index {
  uv1 = 0,  // diag(1,0,0,-1)
  uv2 = 1,  // i|00><11| - i|11><00|
  uv3 = 2,  // |00><11| + |11><00|
  ab1 = 3,  // |01><10| + |10><01|
  ab2 = 4,  // diag(0,1,-1,0)
  ab3 = 5,  // i|01><10| - i|10><01|
};

inline std::array<Mat4, 6> sector_generators() {
  std::array<Mat4, 6> g;
  for (auto& m : g) m = Mat4::Zero();
  g[uv1](0, 0) = 1;  g[uv1](3, 3) = -1;
  g[uv2](0, 3) = iu; g[uv2](3, 0) = -iu;
  g[uv3](0, 3) = 1;  g[uv3](3, 0) = 1;
  g[ab1](1, 2) = 1;  g[ab1](2, 1) = 1;
  g[ab2](1, 1) = 1;  g[ab2](2, 2) = -1;
  g[ab3](1, 2) = iu; g[ab3](2, 1) = -iu;
  return g;
}

inline Mat4 commutator(const Mat4& a, const Mat4& b) { return a * b - b * a; }
inline Mat4 anticommutator(const Mat4& a, const Mat4& b) { return a * b + b * a; }

inline Vec4 ket(int index) {
  if (index < 0 || index > 3) throw validation_error("basis index must be 0..3");
  Vec4 v = Vec4::Zero();
  v(index) = 1;
  return v;
}

// (|00> - |11>)/sqrt(2): the entangled state every protocol here steers into.
inline Vec4 target_state() {
  Vec4 v = Vec4::Zero();
  v(0) = 1.0 / std::sqrt(2.0);
  v(3) = -1.0 / std::sqrt(2.0);
  return v;
}

inline double fidelity(const Mat4& rho, const Vec4& psi) {
  return std::real(psi.dot(rho * psi));
}

// Uhlmann fidelity for two mixed states, (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity(const Mat4& rho, const Mat4& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho + rho.adjoint()));
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Mat4 sqrt_rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  Mat4 inner = sqrt_rho * sigma * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<Mat4> es2(0.5 * (inner + inner.adjoint()));
  double tr = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return tr * tr;
}

struct density_report {
  double trace_defect = 0;        // |tr(rho) - 1|
  double hermiticity_defect = 0;  // max_ij |rho - rho^dagger|
  double min_eigenvalue = 0;      // smallest eigenvalue of the hermitized state
  bool ok = false;
};

inline density_report check_density(const Mat4& rho, double tol = 1e-8) {
  density_report rep;
  rep.trace_defect = std::abs(rho.trace() - cplx(1.0));
  rep.hermiticity_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho + rho.adjoint()));
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  rep.ok = rep.trace_defect <= tol && rep.hermiticity_defect <= tol &&
           rep.min_eigenvalue >= -tol;
  return rep;
}

// Column-major vectorization: vec(A X B) = (B^T (x) A) vec(X).
inline Vec16 vectorize(const Mat4& m) {
  Vec16 v;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) v(4 * j + i) = m(i, j);
  return v;
}

inline Mat4 unvectorize(const Vec16& v) {
  Mat4 m;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) m(i, j) = v(4 * j + i);
  return m;
}

inline Mat16 kron4(const Mat4& a, const Mat4& b) {
  Mat16 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

// Superoperators for left/right multiplication on vectorized states.
inline Mat16 spre(const Mat4& a) { return kron4(Mat4::Identity(), a); }
inline Mat16 spost(const Mat4& b) { return kron4(b.transpose(), Mat4::Identity()); }

}  // namespace dmme
