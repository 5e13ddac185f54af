#include "spinsync/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace spinsync {

namespace {

// Eigenvalues closer than this are treated as one degenerate cluster.
constexpr double kClusterTol = 1e-7;
// Pairing blocks with condition beyond this refuse asymptotic propagation.
constexpr double kPairingCondLimit = 1e8;
// Eigenvector-matrix rcond below this flags the decomposition defective.
constexpr double kRcondLimit = 1e-8;

ModeFlag classify(Complex lambda, double eps) {
  if (std::abs(lambda.real()) < eps)
    return std::abs(lambda.imag()) < eps ? ModeFlag::Zero : ModeFlag::PurelyImaginary;
  return ModeFlag::Decaying;
}

}  // namespace

Eigen::VectorXcd vec(const ComplexMatrix& rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

ComplexMatrix unvec(const Eigen::VectorXcd& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  if (d * d != v.size())
    throw std::invalid_argument("liouvillian-spectral: unvec of a non-square vector");
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

ComplexMatrix build_liouvillian(const Lindbladian& lind) {
  const auto& h = lind.hamiltonian;
  if (!is_hermitian(h))
    throw std::invalid_argument("liouvillian-spectral: Hamiltonian is not Hermitian");
  const Eigen::Index d = h.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const Complex i_unit{0.0, 1.0};
  ComplexMatrix liou = -i_unit * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& op : lind.jumps) {
    if (op.rows() != d || op.cols() != d)
      throw std::invalid_argument(
          "liouvillian-spectral: jump operator dimension mismatch with H");
    const ComplexMatrix odo = op.adjoint() * op;
    liou += kron(op.conjugate(), op);
    liou -= 0.5 * kron(id, odo);
    liou -= 0.5 * kron(odo.transpose(), id);
  }
  return liou;
}

int SpectrumClassification::count(ModeFlag flag) const {
  return static_cast<int>(
      std::count_if(modes.begin(), modes.end(),
                    [flag](const EigenMode& m) { return m.flag == flag; }));
}

std::vector<Complex> SpectrumClassification::distinct_values(ModeFlag flag) const {
  std::vector<Complex> out;
  for (const auto& c : clusters) {
    bool carries = false;
    for (int idx : c.members) carries |= (modes[idx].flag == flag);
    if (carries) out.push_back(c.value);
  }
  return out;
}

SpectrumClassification diagonalize(const ComplexMatrix& liouvillian, double eps) {
  if (liouvillian.rows() != liouvillian.cols())
    throw std::invalid_argument("liouvillian-spectral: matrix must be square");
  const Eigen::Index n = liouvillian.rows();

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(liouvillian, true);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("liouvillian-spectral: eigensolver failed to converge");

  // Sort by descending real part, ties by descending imaginary part.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& raw_vals = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (raw_vals[a].real() != raw_vals[b].real())
      return raw_vals[a].real() > raw_vals[b].real();
    return raw_vals[a].imag() > raw_vals[b].imag();
  });

  SpectrumClassification spec;
  spec.eps = eps;
  spec.modes.resize(n);
  ComplexMatrix v_matrix(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    EigenMode& m = spec.modes[j];
    m.value = raw_vals[order[j]];
    m.flag = classify(m.value, eps);
    Eigen::VectorXcd v = solver.eigenvectors().col(order[j]);
    v /= v.norm();
    v_matrix.col(j) = v;
  }

  // Residuals |L v - lambda v| in one pass.
  const ComplexMatrix lv = liouvillian * v_matrix;
  for (Eigen::Index j = 0; j < n; ++j) {
    spec.modes[j].residual = (lv.col(j) - spec.modes[j].value * v_matrix.col(j)).norm();
    spec.max_residual = std::max(spec.max_residual, spec.modes[j].residual);
  }

  // Greedy clustering of the sorted eigenvalues.
  std::vector<char> used(n, 0);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (used[j]) continue;
    EigenCluster cluster;
    Complex sum{0.0, 0.0};
    for (Eigen::Index k = j; k < n; ++k) {
      if (used[k]) continue;
      if (std::abs(spec.modes[k].value - spec.modes[j].value) < kClusterTol) {
        used[k] = 1;
        cluster.members.push_back(static_cast<int>(k));
        sum += spec.modes[k].value;
      }
    }
    cluster.value = sum / double(cluster.members.size());
    cluster.boundary = std::abs(cluster.value.real()) < eps;
    const int cidx = static_cast<int>(spec.clusters.size());
    for (int idx : cluster.members) spec.modes[idx].cluster = cidx;
    spec.clusters.push_back(std::move(cluster));
  }

  // Block-wise resolution of every boundary cluster: orthonormal right/left
  // null-space bases of (L - mu I), biorthonormalized within the cluster.
  // This stays exact when other clusters are defective, because ordinary left
  // eigenvectors annihilate the generalized eigenspaces of all other values.
  spec.boundary_semisimple = true;
  const ComplexMatrix identity = ComplexMatrix::Identity(n, n);
  for (auto& cluster : spec.clusters) {
    if (!cluster.boundary) continue;
    cluster.checked = true;
    const auto m = static_cast<Eigen::Index>(cluster.members.size());
    Eigen::BDCSVD<ComplexMatrix> svd(liouvillian - cluster.value * identity,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double gap_tol = std::max(sv(0) * 1e-12, 1e-12);
    Eigen::Index geometric = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) < gap_tol) ++geometric;
    if (geometric < m) {
      cluster.semisimple = false;
      spec.boundary_semisimple = false;
      spec.defective = true;
      continue;
    }
    const ComplexMatrix right = svd.matrixV().rightCols(m);
    const ComplexMatrix left = svd.matrixU().rightCols(m);
    const ComplexMatrix pairing = left.adjoint() * right;
    Eigen::JacobiSVD<ComplexMatrix> psvd(pairing);
    cluster.pairing_condition =
        psvd.singularValues()(0) / psvd.singularValues()(m - 1);
    if (!(cluster.pairing_condition < kPairingCondLimit)) {
      cluster.semisimple = false;
      spec.boundary_semisimple = false;
      spec.defective = true;
      continue;
    }
    // duals = left * (pairing^-1)^dag  =>  duals^dag * right = I
    const ComplexMatrix duals =
        left * pairing.inverse().adjoint();
    for (Eigen::Index k = 0; k < m; ++k) {
      const int idx = cluster.members[k];
      spec.modes[idx].value = cluster.value;
      v_matrix.col(idx) = right.col(k);
      spec.modes[idx].residual =
          (liouvillian * right.col(k) - cluster.value * right.col(k)).norm();
      spec.modes[idx].left = unvec(duals.col(k));
      spec.modes[idx].has_left = true;
    }
  }

  // Global left duals via the eigenvector-matrix inverse when it is healthy.
  Eigen::PartialPivLU<ComplexMatrix> lu(v_matrix);
  spec.eigvec_rcond = lu.rcond();
  if (spec.eigvec_rcond >= kRcondLimit && spec.max_residual < 1e-6) {
    const ComplexMatrix w = lu.inverse();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (spec.modes[j].has_left) continue;  // keep the exact cluster duals
      // row j of V^-1 satisfies w_j^T v_k = delta_jk, so the dual under the
      // Hilbert-Schmidt pairing <L, R> = vec(L)^dag vec(R) is conj(w_j).
      spec.modes[j].left = unvec(w.row(j).adjoint());
      spec.modes[j].has_left = true;
    }
  } else {
    spec.defective = true;
  }
  if (spec.defective) {
    spec.warning =
        "spectrum is degenerate/defective beyond tolerance (eigenvector rcond " +
        std::to_string(spec.eigvec_rcond) +
        "); left duals are exact for boundary clusters only and decaying-mode "
        "coefficients are unavailable";
  }

  // Store right eigenmatrices; unit Frobenius norm, zero modes additionally
  // trace-normalized when their trace is away from zero.
  for (Eigen::Index j = 0; j < n; ++j) {
    EigenMode& m = spec.modes[j];
    Eigen::VectorXcd v = v_matrix.col(j);
    if (m.flag == ModeFlag::Zero) {
      const Complex tr = unvec(v).trace();
      if (std::abs(tr) > 1e-9) {
        v /= tr;
        if (m.has_left) m.left *= std::conj(tr);  // keep <left, right> = 1
      }
    }
    m.right = unvec(v);
  }

  // Asymptotic decay rate: largest nonzero real part.
  for (const auto& m : spec.modes) {
    if (m.flag != ModeFlag::Decaying) continue;
    if (!spec.has_adr || m.value.real() > spec.adr.real()) {
      spec.adr = m.value;
      spec.has_adr = true;
    }
  }
  return spec;
}

void validate_density_matrix(const ComplexMatrix& rho, double tolerance) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("density matrix must be square");
  if ((rho - rho.adjoint()).norm() > tolerance * std::max(1.0, rho.norm()))
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex{1.0, 0.0}) > tolerance)
    throw std::invalid_argument("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tolerance)
    throw std::invalid_argument("density matrix has a negative eigenvalue");
}

ComplexMatrix asymptotic_state(const SpectrumClassification& spec,
                               const ComplexMatrix& rho0, double t) {
  if (!spec.boundary_semisimple)
    throw std::runtime_error(
        "liouvillian-spectral: boundary clusters are defective or "
        "ill-conditioned; use direct master-equation integration instead");
  validate_density_matrix(rho0);
  const Complex i_unit{0.0, 1.0};
  ComplexMatrix out = ComplexMatrix::Zero(rho0.rows(), rho0.cols());
  for (const auto& m : spec.modes) {
    if (m.flag == ModeFlag::Decaying) continue;
    const Complex c = (vec(m.left).adjoint() * vec(rho0))(0);
    out += c * std::exp(m.value * t) * m.right;
  }
  // The exact sum is Hermitian with unit trace; enforce bit-level symmetry.
  out = 0.5 * (out + out.adjoint()).eval();
  if (std::abs(out.trace() - Complex{1.0, 0.0}) > 1e-8)
    throw std::runtime_error(
        "liouvillian-spectral: asymptotic state lost trace normalization");
  return out;
}

DarkStateSet find_dark_states(const Lindbladian& lind) {
  const auto& h = lind.hamiltonian;
  if (!is_hermitian(h))
    throw std::invalid_argument("liouvillian-spectral: Hamiltonian is not Hermitian");
  const Eigen::Index d = h.rows();
  DarkStateSet set;
  if (lind.jumps.empty()) return set;  // nothing is dark-constrained without dissipation

  ComplexMatrix stacked(d * static_cast<Eigen::Index>(lind.jumps.size()), d);
  for (std::size_t k = 0; k < lind.jumps.size(); ++k)
    stacked.middleRows(static_cast<Eigen::Index>(k) * d, d) = lind.jumps[k];

  Eigen::BDCSVD<ComplexMatrix> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double rank_tol = std::max(sv(0), 1.0) * 1e-12;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > rank_tol) ++rank;
  const Eigen::Index kernel_dim = d - rank;
  if (kernel_dim == 0) return set;

  const ComplexMatrix kernel = svd.matrixV().rightCols(kernel_dim);
  const ComplexMatrix h_proj = kernel.adjoint() * h * kernel;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h_proj);
  for (Eigen::Index i = 0; i < kernel_dim; ++i) {
    const double omega = es.eigenvalues()(i);
    StateVector psi = kernel * es.eigenvectors().col(i);
    psi /= psi.norm();
    const double h_res = (h * psi - omega * psi).norm();
    double jump_res = 0.0;
    for (const auto& op : lind.jumps) jump_res = std::max(jump_res, (op * psi).norm());
    if (h_res < tol::dark_residual && jump_res < tol::dark_residual)
      set.states.push_back({omega, std::move(psi)});
  }

  for (std::size_t j = 0; j < set.states.size(); ++j)
    for (std::size_t l = j + 1; l < set.states.size(); ++l) {
      const double gap = std::abs(set.states[l].energy - set.states[j].energy);
      if (gap <= tol::spectral) continue;
      bool known = false;
      for (double f : set.predicted_frequencies) known |= std::abs(f - gap) < 1e-9;
      if (!known) set.predicted_frequencies.push_back(gap);
    }
  std::sort(set.predicted_frequencies.begin(), set.predicted_frequencies.end());
  return set;
}

PseudoDensityReport verify_pseudo_density(const ComplexMatrix& liouvillian,
                                          const DarkStateSet& dark) {
  if (dark.states.empty())
    throw std::invalid_argument("liouvillian-spectral: empty dark-state set");
  PseudoDensityReport report;
  report.all_pass = true;
  bool sign_positive = true, sign_negative = true, saw_gap = false;
  for (std::size_t j = 0; j < dark.states.size(); ++j) {
    for (std::size_t l = 0; l < dark.states.size(); ++l) {
      const ComplexMatrix outer =
          dark.states[j].state * dark.states[l].state.adjoint();
      const Eigen::VectorXcd m = vec(outer);  // unit norm: dark states are normalized
      const Eigen::VectorXcd w = liouvillian * m;
      PseudoDensityCheck check;
      check.j = static_cast<int>(j);
      check.l = static_cast<int>(l);
      const double gap = dark.states[l].energy - dark.states[j].energy;
      check.omega_gap = std::abs(gap);
      const Complex rayleigh = m.dot(w);
      check.theta_observed = rayleigh.imag();
      check.residual = (w - Complex{0.0, 1.0} * check.theta_observed * m).norm();
      check.pass = check.residual < tol::dark_residual &&
                   std::abs(std::abs(check.theta_observed) - check.omega_gap) <
                       tol::dark_residual &&
                   std::abs(rayleigh.real()) < tol::dark_residual;
      report.max_residual = std::max(report.max_residual, check.residual);
      report.all_pass &= check.pass;
      if (check.omega_gap > tol::spectral) {
        saw_gap = true;
        sign_positive &= (check.theta_observed * gap > 0.0);
        sign_negative &= (check.theta_observed * gap < 0.0);
      }
      report.pairs.push_back(check);
    }
  }
  if (saw_gap) report.observed_sign = sign_positive ? 1 : (sign_negative ? -1 : 0);
  return report;
}

}  // namespace spinsync
