#pragma once

#include "spinsync/trajectory.hpp"

namespace spinsync {

enum class FftWindow { Rectangular, Hann };

struct SpectralPeak {
  double dominant_frequency = 0.0;  ///< cycles per unit time, non-DC
  double amplitude = 0.0;           ///< window-normalized peak magnitude
  double resolution = 0.0;          ///< 1 / segment duration
  TimeSeries spectrum;              ///< magnitudes over frequency (times = frequencies)
};

/// Drops the samples before `transient_cut`, subtracts the mean, applies the
/// window, and returns the non-DC bin of maximum magnitude up to Nyquist.
/// Errors: non-uniform grid, fewer than 64 samples after the cut, or no
/// non-DC content (constant series).
SpectralPeak dominant_frequency(const TimeSeries& series, double transient_cut,
                                FftWindow window = FftWindow::Rectangular);

/// C_jl = <s+_j s-_l> / sqrt(<s+_j s-_j> <s+_l s-_l>), sites 1-based.
/// |C| <= 1 by Cauchy-Schwarz. Throws std::domain_error when either
/// denominator expectation is below 1e-12 (undefined correlator).
Complex sync_correlator(const StateVector& psi, int j, int l, int n_spins);
Complex sync_correlator(const ComplexMatrix& rho, int j, int l, int n_spins);

struct SyncResult {
  int site_j = 0, site_l = 0;
  double modulus_mean = 0.0;   ///< time mean of |C| over the window
  double phase = 0.0;          ///< circular mean of arg C, in (-pi, pi]
  double phase_drift = 0.0;    ///< least-squares slope of unwrapped arg C
  double window_start = 0.0, window_end = 0.0;
  int n_samples = 0;
};

/// Evaluates the correlator at every stored snapshot inside [t1, t2].
/// Errors: window not covered by the run's snapshots, or the correlator
/// undefined at more than 10% of them.
SyncResult steady_sync(const TrajectoryRun& run, int j, int l, double t1,
                       double t2, int n_spins);

/// Circular mean of angles, in (-pi, pi].
double circular_mean(std::span<const double> angles);

struct LyapunovEvent {
  double time = 0.0;
  double growth_factor = 0.0;  ///< |Delta(t_k)| / Delta_0
};

/// Threshold-crossing bookkeeping for the largest-Lyapunov-exponent estimate
/// lambda(t) = (1/t) sum_k ln d_k. Pure arithmetic over an observable
/// distance; drivable by a quantum trajectory pair or any classical map.
class LyapunovAccumulator {
 public:
  LyapunovAccumulator(double delta0, double threshold);

  /// Feed |Delta| at time t; returns true when this is a threshold-crossing
  /// event (the caller then resets its auxiliary system).
  bool observe(double t, double distance);

  double lambda_at(double t) const;
  const std::vector<LyapunovEvent>& events() const { return events_; }
  double delta0() const { return delta0_; }
  double threshold() const { return threshold_; }

 private:
  double delta0_;
  double threshold_;
  double sum_log_ = 0.0;
  std::vector<LyapunovEvent> events_;
};

struct LyapunovOptions {
  double t_final = 50.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  double delta = 1e-3;        ///< perturbation size (<< 1); 0 = identical pair
  double delta_max = 0.05;    ///< distance threshold
  int lambda_stride = 100;    ///< lambda(t) recording stride
  SseScheme scheme = SseScheme::ExponentialEuler;
};

struct LyapunovTrace {
  double delta0 = 0.0;
  double threshold = 0.0;
  std::vector<LyapunovEvent> events;
  TimeSeries lambda;          ///< running estimate
  double lambda_final = 0.0;
  TimeSeries distance;        ///< Delta(t) at the lambda stride
};

/// Fiducial/auxiliary pair through identical noise; the auxiliary starts as
/// normalize(psi0 + delta * chi) with chi a seeded random direction
/// orthogonal to psi0. On |Delta(t0)| > delta_max the growth factor
/// |Delta(t0)|/Delta_0 is recorded and the auxiliary is reset to a fresh
/// delta-perturbation of the fiducial along the current difference direction.
/// delta = 0 is the documented identical-pair case (no events, zero trace);
/// otherwise Delta_0 < 1e-12 throws with advice to change the direction.
LyapunovTrace lyapunov(const Lindbladian& lind, const StateVector& psi0,
                       const Observable& observable, const LyapunovOptions& opts);

}  // namespace spinsync
