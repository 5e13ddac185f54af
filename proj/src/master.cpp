#include "spinsync/master.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "spinsync/spectral.hpp"

namespace spinsync {

bool TimeSeries::uniform(double rel_tol) const {
  if (times.size() < 2) return true;
  const double step = times[1] - times[0];
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs((times[i] - times[i - 1]) - step) > rel_tol * std::max(1.0, std::abs(step)))
      return false;
  return step > 0.0;
}

double TimeSeries::dt() const {
  if (times.size() < 2)
    throw std::invalid_argument("TimeSeries: need at least two samples for dt");
  return times[1] - times[0];
}

Observable site_observable(PauliAxis axis, int site, int n_spins) {
  const char* name = axis == PauliAxis::X   ? "sigma_x_"
                     : axis == PauliAxis::Y ? "sigma_y_"
                     : axis == PauliAxis::Z ? "sigma_z_"
                     : axis == PauliAxis::Plus ? "sigma_plus_" : "sigma_minus_";
  std::string label = name;
  label += static_cast<char>('A' + site - 1);
  return {std::move(label), embed(pauli(axis), site, n_spins)};
}

std::vector<Observable> default_observables(int n_spins) {
  std::vector<Observable> obs;
  for (int j = 1; j <= n_spins; ++j) obs.push_back(site_observable(PauliAxis::Y, j, n_spins));
  return obs;
}

ComplexMatrix pure_density(const StateVector& psi) {
  const StateVector n = normalized(psi);
  return n * n.adjoint();
}

StateVector product_state(const std::vector<double>& theta,
                          const std::vector<double>& phi) {
  if (theta.size() != phi.size() || theta.empty())
    throw std::invalid_argument("product_state: theta and phi must match and be non-empty");
  StateVector psi = StateVector::Ones(1);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    Eigen::Vector2cd site;
    site << std::cos(theta[j] / 2.0),
        std::exp(Complex{0.0, phi[j]}) * std::sin(theta[j] / 2.0);
    StateVector next(psi.size() * 2);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      next(2 * i) = psi(i) * site(0);
      next(2 * i + 1) = psi(i) * site(1);
    }
    psi = std::move(next);
  }
  return psi;
}

StateVector default_initial_state(int n_spins) {
  constexpr double pi = std::numbers::pi;
  std::vector<double> theta(n_spins, pi), phi(n_spins, 0.0);
  for (int j = 0; j < n_spins / 2; ++j) theta[j] = 0.6 * pi;
  return product_state(theta, phi);
}

ComplexMatrix lindblad_rhs(const Lindbladian& lind, const ComplexMatrix& rho) {
  const Complex i_unit{0.0, 1.0};
  ComplexMatrix out = -i_unit * (lind.hamiltonian * rho - rho * lind.hamiltonian);
  for (const auto& op : lind.jumps) {
    const ComplexMatrix odo = op.adjoint() * op;
    out += op * rho * op.adjoint();
    out -= 0.5 * (odo * rho + rho * odo);
  }
  return out;
}

namespace {

double min_eigenvalue_of(const ComplexMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

EvolveResult evolve(const Lindbladian& lind, const ComplexMatrix& rho0,
                    const EvolveOptions& opts,
                    const std::vector<Observable>& observables) {
  if (!(opts.dt > 0.0)) throw std::invalid_argument("master-evolver: dt must be > 0");
  if (!(opts.t_final >= 0.0))
    throw std::invalid_argument("master-evolver: t_final must be >= 0");
  if (opts.record_stride < 1)
    throw std::invalid_argument("master-evolver: record_stride must be >= 1");
  validate_density_matrix(rho0);
  for (const auto& o : observables)
    if (o.op.rows() != rho0.rows())
      throw std::invalid_argument("master-evolver: observable '" + o.label +
                                  "' dimension mismatch");

  const auto steps = static_cast<long>(std::llround(opts.t_final / opts.dt));
  EvolveResult result;
  result.series.resize(observables.size());
  for (std::size_t i = 0; i < observables.size(); ++i)
    result.series[i].label = observables[i].label;
  result.purity_series.label = "purity";
  result.loschmidt_series.label = "loschmidt";
  result.min_eigenvalue = 0.0;

  ComplexMatrix rho = rho0;
  ComplexMatrix exp_step;
  if (opts.integrator == MasterIntegrator::Expm) {
    exp_step = (build_liouvillian(lind) * opts.dt).exp();
  }
  ComplexMatrix k1, k2, k3, k4;

  const long expected = steps / opts.record_stride + 1;
  for (auto& s : result.series) {
    s.times.reserve(expected);
    s.values.reserve(expected);
  }

  double min_eig = 1.0;
  for (long step = 0;; ++step) {
    const double t = step * opts.dt;
    if (step % opts.record_stride == 0) {
      for (std::size_t i = 0; i < observables.size(); ++i) {
        result.series[i].times.push_back(t);
        result.series[i].values.push_back((observables[i].op * rho).trace().real());
      }
      if (opts.record_purity) {
        result.purity_series.times.push_back(t);
        result.purity_series.values.push_back(purity(rho));
      }
      if (opts.record_loschmidt) {
        result.loschmidt_series.times.push_back(t);
        result.loschmidt_series.values.push_back(loschmidt_echo(rho, rho0));
      }
    }
    const double trace_drift = std::abs(rho.trace().real() - 1.0) +
                               std::abs(rho.trace().imag());
    result.max_trace_drift = std::max(result.max_trace_drift, trace_drift);
    if (trace_drift > opts.invariant_tol)
      throw std::runtime_error(
          "master-evolver: trace drift " + std::to_string(trace_drift) +
          " exceeds " + std::to_string(opts.invariant_tol) + " at t=" +
          std::to_string(t) + " (reduce dt)");
    if (step % opts.positivity_check_stride == 0 || step == steps) {
      min_eig = std::min(min_eig, min_eigenvalue_of(rho));
      if (min_eig < -1e-6)
        throw std::runtime_error(
            "master-evolver: positivity violated (min eigenvalue " +
            std::to_string(min_eig) + ") at t=" + std::to_string(t) +
            " (reduce dt)");
    }
    if (step == steps) break;

    if (opts.integrator == MasterIntegrator::Expm) {
      rho = unvec(exp_step * vec(rho));
    } else {
      k1 = lindblad_rhs(lind, rho);
      k2 = lindblad_rhs(lind, rho + (0.5 * opts.dt) * k1);
      k3 = lindblad_rhs(lind, rho + (0.5 * opts.dt) * k2);
      k4 = lindblad_rhs(lind, rho + opts.dt * k3);
      rho += (opts.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();  // suppress Hermiticity drift
  }

  result.min_eigenvalue = min_eig;
  result.final_state = std::move(rho);
  return result;
}

double loschmidt_echo(const ComplexMatrix& rho_t, const ComplexMatrix& rho0) {
  if (rho_t.rows() != rho0.rows() || rho_t.cols() != rho0.cols())
    throw std::invalid_argument("master-evolver: Loschmidt echo dimension mismatch");
  const Complex value = (rho_t.adjoint() * rho0).trace();
  return value.real();
}

double purity(const ComplexMatrix& rho) {
  return (rho * rho).trace().real();
}

}  // namespace spinsync
