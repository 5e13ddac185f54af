#pragma once

#include <utility>
#include <vector>

#include "spinsync/algebra.hpp"

namespace spinsync {

enum class Topology { Ring, Chain };

/// One collective decay channel: the realized jump operator is
/// sqrt(rate) * sum_s weight_s * sigma^-_s over `sites`.
struct DissipatorSpec {
  std::vector<int> sites;       // 1-based
  std::vector<Complex> weights; // one per site
  double rate = 1.0;
};

/// Physical description of the experiment. Couplings and rates are in units
/// of gamma; time is in units of 1/gamma.
struct ModelSpec {
  int n_spins = 4;
  double jx = 1.0;
  double jy = 1.0;
  double jz = 0.9;
  double gamma = 1.0;
  Topology topology = Topology::Ring;
  std::vector<DissipatorSpec> dissipators;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Nearest-neighbor pair set: ring {(1,2),...,(n,1)}, chain {(1,2),...,(n-1,n)}.
std::vector<std::pair<int, int>> nearest_neighbor_pairs(Topology topology, int n_spins);

struct Lindbladian {
  ComplexMatrix hamiltonian;        // Hermitian, dim 2^n
  std::vector<ComplexMatrix> jumps; // sqrt(rate) folded in
  int n_spins = 0;

  Eigen::Index dim() const { return hamiltonian.rows(); }
};

/// H = sum_<j,l> (Jx sx_j sx_l + Jy sy_j sy_l + Jz sz_j sz_l) over the
/// topology's pair set. Couplings multiply gamma (the unit of energy).
ComplexMatrix build_hamiltonian(const ModelSpec& spec);

std::vector<ComplexMatrix> build_jumps(const ModelSpec& spec);

Lindbladian build_lindbladian(const ModelSpec& spec);

enum class Preset { Xxz, Xyz };

/// The two parameter sets studied in the experiment: gamma = 1, four spins on
/// a ring, collective lowering on the next-nearest-neighbor pairs (1,3) and
/// (2,4) with unit weights.
///   Xxz: Jx = 1,   Jy = 1, Jz = 0.9   (supports a persistent oscillation)
///   Xyz: Jx = 0.8, Jy = 1, Jz = 0.9   (relaxes to a stationary state)
ModelSpec paper_preset(Preset kind);

}  // namespace spinsync
