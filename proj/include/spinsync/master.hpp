#pragma once

#include <string>
#include <vector>

#include "spinsync/model.hpp"

namespace spinsync {

/// Uniformly sampled real-valued signal. `times` is strictly increasing;
/// series destined for the FFT must keep uniform spacing.
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string label;

  bool uniform(double rel_tol = 1e-9) const;
  double dt() const;
};

struct Observable {
  std::string label;
  ComplexMatrix op;
};

/// sigma^alpha on `site`, labelled like "sigma_y_A".
Observable site_observable(PauliAxis axis, int site, int n_spins);

/// The default diagnostic set {sigma_y_j} for j = A..D (all sites).
std::vector<Observable> default_observables(int n_spins);

/// rho = |psi><psi|.
ComplexMatrix pure_density(const StateVector& psi);

/// Product state from Bloch angles: site j carries
/// cos(theta_j/2)|up> + e^{i phi_j} sin(theta_j/2)|down>.
StateVector product_state(const std::vector<double>& theta,
                          const std::vector<double>& phi);

/// The frozen default initial state of the experiment: Bloch angles
/// theta = (3pi/5, 3pi/5, pi, pi), phi = 0 — spins A and B tilted 108 degrees
/// from +z, spins C and D pointing down. Identical-site product states are
/// symmetric under the 1<->3 and 2<->4 swaps and are therefore decoupled from
/// every oscillating Liouvillian mode; this state seeds them strongly.
StateVector default_initial_state(int n_spins);

/// -i[H, rho] + sum_k (O_k rho O_k^dag - 1/2 {O_k^dag O_k, rho}).
/// Direct matrix evaluation; deliberately independent of build_liouvillian.
ComplexMatrix lindblad_rhs(const Lindbladian& lind, const ComplexMatrix& rho);

enum class MasterIntegrator {
  Rk4,   ///< classic fixed-step RK4 on the density matrix
  Expm,  ///< exact stepping with a precomputed e^{L dt}
};

struct EvolveOptions {
  double t_final = 100.0;
  double dt = 1e-3;
  MasterIntegrator integrator = MasterIntegrator::Rk4;
  int record_stride = 1;           ///< store observables every k-th step
  bool record_purity = false;
  bool record_loschmidt = false;
  double invariant_tol = 1e-6;     ///< trace/Hermiticity drift signalling too-large dt
  int positivity_check_stride = 1000;
};

struct EvolveResult {
  std::vector<TimeSeries> series;  ///< one per requested observable
  TimeSeries purity_series;        ///< empty unless requested
  TimeSeries loschmidt_series;     ///< empty unless requested
  ComplexMatrix final_state;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;     ///< smallest eigenvalue seen at checkpoints
};

/// Integrates d rho/dt = L rho on a uniform grid, recording Tr[A rho(t)] for
/// every requested observable. Throws std::runtime_error when the trace or
/// positivity invariants drift beyond tolerance (too-large dt).
EvolveResult evolve(const Lindbladian& lind, const ComplexMatrix& rho0,
                    const EvolveOptions& opts,
                    const std::vector<Observable>& observables);

/// Tr[rho(t)^dag rho(0)]; real within 1e-10 for Hermitian inputs.
double loschmidt_echo(const ComplexMatrix& rho_t, const ComplexMatrix& rho0);

/// Tr[rho^2], in [1/dim, 1].
double purity(const ComplexMatrix& rho);

}  // namespace spinsync
