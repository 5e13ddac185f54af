#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spinsync {

using Complex = std::complex<double>;

/// Dense complex matrix. Storage is column-major (Eigen default); entry (r,c)
/// lives at flat index c*rows + r. All operators in this library are dense:
/// the largest object is the 256x256 Liouvillian of the four-spin system.
using ComplexMatrix = Eigen::MatrixXcd;

/// Pure state amplitudes in the computational z-basis.
///
/// Basis convention (frozen; every module relies on it):
///   - |up> = e0, |down> = e1 for a single spin, so sigma_z|up> = +|up>.
///   - site 1 is the leftmost (most significant) tensor factor: basis index
///     b addresses site j with bit (n_spins - j), value 0 meaning "up".
using StateVector = Eigen::VectorXcd;

namespace tol {
/// Hermiticity / unitarity predicate tolerance.
inline constexpr double hermiticity = 1e-10;
/// Zero-classification threshold for Liouvillian eigenvalues (eps_spec).
inline constexpr double spectral = 1e-8;
/// Allowed deviation of |psi| from 1 after a normalization call.
inline constexpr double state_norm = 1e-10;
/// Residual bound for dark-state membership and pseudo-density checks.
inline constexpr double dark_residual = 1e-8;
}  // namespace tol

enum class PauliAxis { X, Y, Z, Plus, Minus };

/// The 2x2 Pauli matrix for `axis`; sigma^- = (sigma^x - i sigma^y)/2.
ComplexMatrix pauli(PauliAxis axis);

/// Kronecker product a (x) b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// I (x) ... (x) op (x) ... (x) I with `op` (2x2) at 1-based `site`;
/// site 1 is the leftmost factor. Result has dimension 2^n_spins.
ComplexMatrix embed(const ComplexMatrix& op, int site, int n_spins);

// -- matrix primitives with explicit shape checks ---------------------------

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scale(Complex factor, const ComplexMatrix& a);
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& a);
Complex trace_of(const ComplexMatrix& a);
double frobenius_norm(const ComplexMatrix& a);

/// A |psi>.
StateVector apply(const ComplexMatrix& a, const StateVector& psi);

/// <psi| A |psi>. For Hermitian A the imaginary part is below
/// tol::hermiticity * |A|; callers wanting the real value use .real().
Complex expectation(const StateVector& psi, const ComplexMatrix& a);

// -- predicates and normalization --------------------------------------------

bool is_hermitian(const ComplexMatrix& a, double tolerance = tol::hermiticity);
bool is_unitary(const ComplexMatrix& a, double tolerance = tol::hermiticity);

/// psi / |psi|. Throws std::runtime_error if |psi| < floor (norm collapse).
StateVector normalized(const StateVector& psi, double floor = 1e-12);

}  // namespace spinsync
