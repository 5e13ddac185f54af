#include "spinsync/model.hpp"

#include <cmath>

namespace spinsync {

void ModelSpec::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("model." + field + ": " + why);
  };
  if (n_spins < 2) fail("n_spins", "must be >= 2");
  if (n_spins > 10) fail("n_spins", "dense backend supports at most 10 spins");
  if (!(gamma > 0.0)) fail("gamma", "must be > 0");
  if (!std::isfinite(jx)) fail("jx", "must be finite");
  if (!std::isfinite(jy)) fail("jy", "must be finite");
  if (!std::isfinite(jz)) fail("jz", "must be finite");
  for (std::size_t k = 0; k < dissipators.size(); ++k) {
    const auto& d = dissipators[k];
    const std::string base = "dissipators[" + std::to_string(k) + "].";
    if (d.rate < 0.0) fail(base + "rate", "must be >= 0");
    if (d.sites.empty()) fail(base + "sites", "must not be empty");
    if (d.weights.size() != d.sites.size())
      fail(base + "weights", "must match the number of sites");
    for (int s : d.sites)
      if (s < 1 || s > n_spins)
        fail(base + "sites", "site " + std::to_string(s) + " out of range [1," +
                                 std::to_string(n_spins) + "]");
  }
}

std::vector<std::pair<int, int>> nearest_neighbor_pairs(Topology topology, int n_spins) {
  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j < n_spins; ++j) pairs.emplace_back(j, j + 1);
  if (topology == Topology::Ring && n_spins > 2) pairs.emplace_back(n_spins, 1);
  return pairs;
}

ComplexMatrix build_hamiltonian(const ModelSpec& spec) {
  spec.validate();
  const Eigen::Index dim = Eigen::Index{1} << spec.n_spins;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  const ComplexMatrix sx = pauli(PauliAxis::X);
  const ComplexMatrix sy = pauli(PauliAxis::Y);
  const ComplexMatrix sz = pauli(PauliAxis::Z);
  for (auto [j, l] : nearest_neighbor_pairs(spec.topology, spec.n_spins)) {
    h += spec.jx * (embed(sx, j, spec.n_spins) * embed(sx, l, spec.n_spins));
    h += spec.jy * (embed(sy, j, spec.n_spins) * embed(sy, l, spec.n_spins));
    h += spec.jz * (embed(sz, j, spec.n_spins) * embed(sz, l, spec.n_spins));
  }
  h *= spec.gamma;
  return h;
}

std::vector<ComplexMatrix> build_jumps(const ModelSpec& spec) {
  spec.validate();
  const Eigen::Index dim = Eigen::Index{1} << spec.n_spins;
  const ComplexMatrix sm = pauli(PauliAxis::Minus);
  std::vector<ComplexMatrix> jumps;
  jumps.reserve(spec.dissipators.size());
  for (const auto& d : spec.dissipators) {
    ComplexMatrix op = ComplexMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < d.sites.size(); ++i)
      op += d.weights[i] * embed(sm, d.sites[i], spec.n_spins);
    jumps.push_back(std::sqrt(d.rate * spec.gamma) * op);
  }
  return jumps;
}

Lindbladian build_lindbladian(const ModelSpec& spec) {
  Lindbladian l;
  l.hamiltonian = build_hamiltonian(spec);
  l.jumps = build_jumps(spec);
  l.n_spins = spec.n_spins;
  return l;
}

ModelSpec paper_preset(Preset kind) {
  ModelSpec spec;
  spec.n_spins = 4;
  spec.gamma = 1.0;
  spec.topology = Topology::Ring;
  spec.jy = 1.0;
  spec.jz = 0.9;
  spec.jx = (kind == Preset::Xxz) ? 1.0 : 0.8;
  spec.dissipators = {
      {{1, 3}, {Complex{1.0}, Complex{1.0}}, 1.0},
      {{2, 4}, {Complex{1.0}, Complex{1.0}}, 1.0},
  };
  return spec;
}

}  // namespace spinsync
