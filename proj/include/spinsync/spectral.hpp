#pragma once

#include <string>
#include <vector>

#include "spinsync/model.hpp"

namespace spinsync {

/// Column-stacking vectorization: vec(rho) stacks the columns of rho, so
/// entry (r,c) maps to flat index c*D + r and vec(A rho B) = (B^T (x) A) vec(rho).
Eigen::VectorXcd vec(const ComplexMatrix& rho);
ComplexMatrix unvec(const Eigen::VectorXcd& v);

/// Dense Liouvillian superoperator under the column-stacking convention:
///   L = -i(I (x) H - H^T (x) I)
///       + sum_k [ conj(O_k) (x) O_k - 1/2 I (x) (O_k^dag O_k)
///                                   - 1/2 (O_k^dag O_k)^T (x) I ].
/// Applying it to vec(rho) reproduces -i[H,rho] + D[rho].
ComplexMatrix build_liouvillian(const Lindbladian& lind);

enum class ModeFlag { Zero, PurelyImaginary, Decaying };

struct EigenMode {
  Complex value;
  ModeFlag flag = ModeFlag::Decaying;
  ComplexMatrix right;        ///< rho_j, unit Frobenius norm (zero modes trace-normalized)
  ComplexMatrix left;         ///< dual: <left_j, right_k>_HS = delta_jk; empty if unavailable
  bool has_left = false;
  double residual = 0.0;      ///< |L v - lambda v| / |v| for the right vector
  int cluster = -1;           ///< index into SpectrumClassification::clusters
};

struct EigenCluster {
  Complex value;              ///< cluster representative (mean of members)
  std::vector<int> members;   ///< mode indices
  bool boundary = false;      ///< |Re value| < eps (zero or purely imaginary)
  bool semisimple = true;     ///< geometric multiplicity == algebraic (checked clusters)
  bool checked = false;       ///< null-space analysis was performed
  double pairing_condition = 1.0;  ///< cond of the left/right pairing block
};

/// Full spectral classification of a Liouvillian, sorted by descending real
/// part (ties: descending imaginary part).
///
/// Degenerate boundary clusters (|Re| < eps) are always resolved by a
/// block-wise null-space decomposition with exact within-cluster
/// biorthogonalization, so asymptotic propagation stays valid even when the
/// decaying part of the spectrum is defective. Global defectiveness (detected
/// through eigenpair residuals and the eigenvector-matrix condition number)
/// is reported as a warning state, not an error.
struct SpectrumClassification {
  std::vector<EigenMode> modes;
  std::vector<EigenCluster> clusters;
  double eps = tol::spectral;

  Complex adr{0.0, 0.0};       ///< eigenvalue with the largest nonzero real part
  bool has_adr = false;

  bool defective = false;
  std::string warning;         ///< human-readable account when defective
  double eigvec_rcond = 0.0;   ///< reciprocal condition estimate of the eigenvector matrix
  double max_residual = 0.0;

  /// True when every boundary cluster is semisimple with a well-conditioned
  /// pairing: the precondition for asymptotic_state.
  bool boundary_semisimple = false;

  int count(ModeFlag flag) const;
  /// Distinct values (clustered) carrying the given flag.
  std::vector<Complex> distinct_values(ModeFlag flag) const;
};

SpectrumClassification diagonalize(const ComplexMatrix& liouvillian,
                                   double eps = tol::spectral);

/// rho(t) with every decaying term dropped:
///   sum over modes with Re lambda ~ 0 of c_j e^{lambda_j t} rho_j,
///   c_j = <left_j, rho(0)>_HS.
/// Requires boundary_semisimple; throws otherwise, and for invalid rho0.
ComplexMatrix asymptotic_state(const SpectrumClassification& spec,
                               const ComplexMatrix& rho0, double t);

/// Checks rho against the density-matrix invariants (Hermitian, unit trace,
/// min eigenvalue >= -tolerance); throws std::invalid_argument on violation.
void validate_density_matrix(const ComplexMatrix& rho, double tolerance = 1e-8);

struct DarkState {
  double energy = 0.0;
  StateVector state;
};

/// Joint kernel of all jump operators intersected with the Hamiltonian
/// eigenbasis; predicted_frequencies are the distinct pairwise energy gaps.
struct DarkStateSet {
  std::vector<DarkState> states;
  std::vector<double> predicted_frequencies;
};

/// Rank-revealing decomposition of the stacked jump matrix, projection of H
/// into the kernel, diagonalization there; only kernel vectors that are true
/// H eigenstates (residual < tol::dark_residual) are returned. An empty
/// kernel yields an empty set (no persistent oscillation possible).
DarkStateSet find_dark_states(const Lindbladian& lind);

struct PseudoDensityCheck {
  int j = 0, l = 0;
  double omega_gap = 0.0;      ///< |omega_l - omega_j|
  double theta_observed = 0.0; ///< L vec(|psi_j><psi_l|) = i*theta * vec(...)
  double residual = 0.0;
  bool pass = false;
};

struct PseudoDensityReport {
  std::vector<PseudoDensityCheck> pairs;  ///< all ordered pairs (j,l)
  bool all_pass = false;
  double max_residual = 0.0;
  /// +1 when theta tracks +(omega_l - omega_j), -1 for the opposite sign,
  /// 0 if mixed or no nonzero gap was seen.
  int observed_sign = 0;
};

/// Applies the Liouvillian to every dark-pair outer product |psi_j><psi_l| and
/// verifies it is an eigenmatrix with purely imaginary eigenvalue of magnitude
/// |omega_l - omega_j|; records the sign convention actually observed.
PseudoDensityReport verify_pseudo_density(const ComplexMatrix& liouvillian,
                                          const DarkStateSet& dark);

}  // namespace spinsync
