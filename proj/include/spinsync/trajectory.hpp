#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "spinsync/master.hpp"

namespace spinsync {

/// Deterministic per-trajectory seed from a master seed (splitmix64 finalizer
/// over master_seed + (index+1) * golden gamma). Scheduling-independent.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// Seeded Gaussian stream for the Wiener increments.
///
/// Contract: mt19937_64 with the given seed; uniforms are
/// ((x >> 11) + 1) * 2^-53 in (0, 1]; Gaussians come from Box-Muller
/// (z0 = sqrt(-2 ln u1) cos(2 pi u2), z1 = ... sin(...)), pairs cached.
/// The same seed yields the bit-identical sequence on any run of the same
/// binary; dW = gaussian() * sqrt(dt) has mean 0 and variance dt.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : rng_(seed) {}

  double gaussian();
  /// One increment per jump channel.
  void fill_increments(std::span<double> dw, double dt);

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

enum class SseScheme {
  /// Exact linear substep e^{-i H_eff dt}, Euler for the nonlinear feedback
  /// terms, Maruyama diffusion. Default: plain Euler distorts the relative
  /// weight of oscillating vs stationary asymptotic components by
  /// e^{omega^2 dt t / 2}, which is a ~2x error by t = 100 at dt = 1e-3.
  ExponentialEuler,
  /// Textbook Euler-Maruyama on the full drift.
  Euler,
};

/// Precomputed operators for stepping one Lindbladian at a fixed dt.
struct SseContext {
  ComplexMatrix h_eff;                 ///< H - (i/2) sum O_k^dag O_k
  ComplexMatrix exp_h_eff_dt;          ///< e^{-i H_eff dt} (ExponentialEuler)
  std::vector<ComplexMatrix> jumps;
  double dt = 1e-3;
  SseScheme scheme = SseScheme::ExponentialEuler;

  int n_channels() const { return static_cast<int>(jumps.size()); }
  Eigen::Index dim() const { return h_eff.rows(); }

  static SseContext make(const Lindbladian& lind, double dt,
                         SseScheme scheme = SseScheme::ExponentialEuler);
};

/// One diffusive step of the stochastic Schroedinger equation:
///   d|psi> = D1[psi] dt + sum_k D2_k[psi] dW_k,
///   D1 = [-i H_eff + sum_k ((s_k/2) O_k - s_k^2/8)] psi,
///   D2_k = (O_k - s_k/2) psi,  s_k = <psi| O_k + O_k^dag |psi>,
/// followed by explicit renormalization. `dw` carries one increment per
/// channel. Returns the pre-renormalization norm deviation |norm - 1| through
/// `norm_drift` when non-null; throws on norm collapse (instability).
StateVector sse_step(const StateVector& psi, const SseContext& ctx,
                     std::span<const double> dw, double* norm_drift = nullptr);

struct TrajectoryOptions {
  double t_final = 100.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  int record_stride = 1;        ///< observable recording stride
  int snapshot_stride = 0;      ///< 0 disables state snapshots
  double snapshot_t_min = 0.0;  ///< first time eligible for a snapshot
  SseScheme scheme = SseScheme::ExponentialEuler;
};

struct TrajectoryRun {
  std::uint64_t seed = 0;
  double dt = 1e-3;
  std::vector<TimeSeries> observables;
  std::vector<double> snapshot_times;
  std::vector<StateVector> snapshots;   ///< normalized states
  double median_norm_drift = 0.0;       ///< median pre-renormalization |norm-1|
};

/// Deterministic given (seed, dt, t_final): iterates sse_step on a uniform
/// grid and records <psi|A|psi> for every observable at the recording stride.
TrajectoryRun run_trajectory(const Lindbladian& lind, const StateVector& psi0,
                             const TrajectoryOptions& opts,
                             const std::vector<Observable>& observables);

struct EnsembleOptions {
  TrajectoryOptions trajectory;   ///< per-trajectory settings (seed is derived)
  int n_traj = 500;
  std::uint64_t master_seed = 0;
  int n_threads = 0;              ///< 0 = hardware concurrency
};

struct EnsembleResult {
  int n_traj = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<TimeSeries> mean;
  std::vector<TimeSeries> standard_error;
};

/// Called once per finished trajectory, possibly from a worker thread (the
/// hook must be thread-safe); `index` is the trajectory index.
using TrajectoryHook =
    std::function<void(std::size_t index, const TrajectoryRun& run)>;

/// Runs n_traj independent trajectories with seeds derive_seed(master_seed, i)
/// and reduces mean / standard error per time point in trajectory-index order,
/// so the result is identical for any thread count. A trajectory failure
/// aborts the ensemble with the offending seed in the error message.
EnsembleResult run_ensemble(const Lindbladian& lind, const StateVector& psi0,
                            const EnsembleOptions& opts,
                            const std::vector<Observable>& observables,
                            const TrajectoryHook& hook = {});

/// After each step the callback sees (step, t, psi_fiducial, psi_auxiliary)
/// and may return a replacement for the auxiliary state (the Lyapunov
/// estimator's reset); return std::nullopt to continue unchanged.
using PairStepCallback = std::function<std::optional<StateVector>(
    long step, double t, const StateVector& fiducial, const StateVector& auxiliary)>;

struct SharedNoisePair {
  TrajectoryRun fiducial;
  TrajectoryRun auxiliary;
};

/// Evolves two states through the identical noise stream, recording the given
/// observable for both. The callback enables mid-run auxiliary replacement.
SharedNoisePair run_shared_noise_pair(const Lindbladian& lind,
                                      const StateVector& psi_f0,
                                      const StateVector& psi_a0,
                                      const TrajectoryOptions& opts,
                                      const Observable& observable,
                                      const PairStepCallback& callback = {});

}  // namespace spinsync
